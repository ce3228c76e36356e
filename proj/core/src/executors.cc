// Copyright 2026 The adaptrag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adaptrag/executors.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "adaptrag/errors.h"
#include "adaptrag/prompts.h"
#include "adaptrag/text.h"

namespace adaptrag {

GatewayBackend::GatewayBackend(const ChatClient& client, Options options)
    : client_(client), options_(std::move(options)) {}

const std::string& GatewayBackend::ModelFor(ExecutorId role) const {
  const auto it = options_.role_models.find(role);
  return it == options_.role_models.end() ? options_.default_model : it->second;
}

ChatReply GatewayBackend::Complete(ExecutorId role,
                                   std::span<const ChatMessage> prompt) const {
  return client_.Chat(prompt, ModelFor(role), options_.temperature);
}

std::optional<double> GatewayBackend::PriceUsd(ExecutorId role,
                                               const TokenUsage& usage) const {
  const std::string& model = ModelFor(role);
  if (options_.pricing.Find(model) == nullptr) return std::nullopt;
  return UsageToUsd(usage, model, options_.pricing);
}

std::vector<std::string> ParseSubQuestions(std::string_view reply) {
  std::vector<std::string> out;
  for (const auto& raw : text::SplitLines(reply)) {
    std::string line = text::Trim(raw);
    // Tolerate list markers even though the prompts ask for none.
    size_t skip = 0;
    while (skip < line.size() &&
           (line[skip] == '-' || line[skip] == '*' || line[skip] == ' ')) {
      ++skip;
    }
    size_t digits = skip;
    while (digits < line.size() &&
           std::isdigit(static_cast<unsigned char>(line[digits]))) {
      ++digits;
    }
    if (digits > skip && digits < line.size() &&
        (line[digits] == '.' || line[digits] == ')')) {
      skip = digits + 1;
    }
    line = text::Trim(std::string_view(line).substr(skip));
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

std::optional<std::vector<size_t>> ParseDocumentSelection(
    std::string_view reply, size_t doc_count) {
  static constexpr std::string_view kTag = "Document";
  bool named_any = false;
  std::set<size_t> chosen;
  size_t pos = 0;
  while ((pos = reply.find(kTag, pos)) != std::string_view::npos) {
    pos += kTag.size();
    size_t end = pos;
    while (end < reply.size() &&
           std::isdigit(static_cast<unsigned char>(reply[end]))) {
      ++end;
    }
    if (end == pos || end - pos > 9) continue;
    named_any = true;
    const size_t index = std::stoul(std::string(reply.substr(pos, end - pos)));
    if (index < doc_count) chosen.insert(index);
    pos = end;
  }
  if (!named_any) return std::nullopt;
  return std::vector<size_t>(chosen.begin(), chosen.end());
}

std::string ExtractAnswer(std::string_view reply) {
  const size_t open = reply.find("**");
  if (open != std::string_view::npos) {
    const size_t close = reply.find("**", open + 2);
    if (close != std::string_view::npos) {
      return text::Trim(reply.substr(open + 2, close - open - 2));
    }
  }
  return text::Trim(reply);
}

std::string CleanRewrite(std::string_view reply) {
  for (const auto& raw : text::SplitLines(reply)) {
    std::string line = text::Trim(raw);
    while (line.size() >= 2 && ((line.front() == '"' && line.back() == '"') ||
                                (line.front() == '\'' && line.back() == '\''))) {
      line = text::Trim(std::string_view(line).substr(1, line.size() - 2));
    }
    if (!line.empty()) return line;
  }
  return "";
}

Executors::Executors(const Backend& backend, const CorpusIndex* index,
                     size_t retrieval_k)
    : backend_(backend), index_(index), retrieval_k_(retrieval_k) {
  if (retrieval_k_ == 0) throw PreconditionError("retrieval k must be >= 1");
}

template <typename T>
ExecutorOutcome<T> Executors::Wrap(ExecutorId role, T payload,
                                   const ChatReply& reply) const {
  ExecutorOutcome<T> outcome;
  outcome.payload = std::move(payload);
  outcome.usage = reply.usage;
  outcome.measured_usd = backend_.PriceUsd(role, reply.usage).value_or(0.0);
  return outcome;
}

namespace {

void RequireQuestion(std::string_view question) {
  if (text::Trim(question).empty()) {
    throw PreconditionError("executor question must be non-empty");
  }
}

}  // namespace

ExecutorOutcome<std::vector<std::string>> Executors::Decompose(
    ExecutorId role, std::string_view question) const {
  RequireQuestion(question);
  const auto prompt = prompts::Render(prompts::ForExecutor(role),
                                      {std::string(question), "", ""});
  const ChatReply reply = backend_.Complete(role, prompt);
  auto sub_questions = ParseSubQuestions(reply.text);
  if (sub_questions.empty()) {
    throw ExecutorError(std::string(ExecutorName(role)) +
                        ": reply contains no sub-questions");
  }
  if (sub_questions.size() > kMaxSubQuestions) {
    sub_questions.resize(kMaxSubQuestions);
  }
  return Wrap(role, std::move(sub_questions), reply);
}

ExecutorOutcome<std::vector<std::string>> Executors::DecomposeSerial(
    std::string_view question) const {
  return Decompose(ExecutorId::kQDS, question);
}

ExecutorOutcome<std::vector<std::string>> Executors::DecomposeParallel(
    std::string_view question) const {
  return Decompose(ExecutorId::kQDP, question);
}

ExecutorOutcome<std::string> Executors::Rewrite(
    std::string_view question) const {
  RequireQuestion(question);
  const auto prompt = prompts::Render(prompts::ForExecutor(ExecutorId::kQR),
                                      {std::string(question), "", ""});
  const ChatReply reply = backend_.Complete(ExecutorId::kQR, prompt);
  std::string rewritten = CleanRewrite(reply.text);
  if (rewritten.empty()) rewritten = std::string(question);
  return Wrap(ExecutorId::kQR, std::move(rewritten), reply);
}

ExecutorOutcome<std::vector<Document>> Executors::SelectDocuments(
    std::string_view question, std::span<const Document> docs) const {
  RequireQuestion(question);
  if (docs.empty()) {
    throw PreconditionError("DS needs at least one candidate document");
  }
  const auto prompt =
      prompts::Render(prompts::ForExecutor(ExecutorId::kDS),
                      {std::string(question), prompts::RenderDocuments(docs), ""});
  const ChatReply reply = backend_.Complete(ExecutorId::kDS, prompt);
  std::vector<Document> kept;
  if (const auto selection = ParseDocumentSelection(reply.text, docs.size())) {
    for (const size_t j : *selection) kept.push_back(docs[j]);
  } else {
    kept.assign(docs.begin(), docs.end());
  }
  return Wrap(ExecutorId::kDS, std::move(kept), reply);
}

std::vector<Document> Executors::Retrieve(std::string_view question) const {
  if (index_ == nullptr) {
    throw ExecutorError("RA: no corpus index configured");
  }
  std::vector<Document> docs;
  for (const auto& hit : index_->Search(question, retrieval_k_)) {
    docs.push_back(*hit.doc);
  }
  return docs;
}

ExecutorOutcome<std::string> Executors::GenerateAnswer(
    std::string_view question, std::span<const Document> docs) const {
  RequireQuestion(question);
  const auto prompt =
      prompts::Render(prompts::ForExecutor(ExecutorId::kAG),
                      {std::string(question), prompts::RenderDocuments(docs), ""});
  const ChatReply reply = backend_.Complete(ExecutorId::kAG, prompt);
  std::string answer = ExtractAnswer(reply.text);
  if (answer.empty()) throw ExecutorError("AG: empty answer");
  return Wrap(ExecutorId::kAG, std::move(answer), reply);
}

ExecutorOutcome<std::string> Executors::Summarize(
    std::string_view question, std::span<const SubQuestionSlot> slots) const {
  RequireQuestion(question);
  std::vector<prompts::QaPair> pairs;
  for (const auto& slot : slots) {
    if (!slot.answer) {
      throw PreconditionError("AS requires every sub-question to be answered");
    }
    pairs.push_back({slot.text, *slot.answer});
  }
  const auto prompt = prompts::Render(
      prompts::ForExecutor(ExecutorId::kAS),
      {std::string(question), "", prompts::RenderSubQuestionContext(pairs)});
  const ChatReply reply = backend_.Complete(ExecutorId::kAS, prompt);
  std::string answer = ExtractAnswer(reply.text);
  if (answer.empty()) throw ExecutorError("AS: empty answer");
  return Wrap(ExecutorId::kAS, std::move(answer), reply);
}

}  // namespace adaptrag
