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

#ifndef ADAPTRAG_EXECUTORS_H_
#define ADAPTRAG_EXECUTORS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/corpus_index.h"
#include "adaptrag/llm_gateway.h"
#include "adaptrag/rollout_context.h"
#include "adaptrag/workflow.h"

namespace adaptrag {

// Completes an executor's rendered prompt. Implementations must be safe to
// call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual ChatReply Complete(ExecutorId role,
                             std::span<const ChatMessage> prompt) const = 0;

  // Measured cost of a completion in USD, when the backend knows its prices.
  virtual std::optional<double> PriceUsd(ExecutorId /*role*/,
                                         const TokenUsage& /*usage*/) const {
    return std::nullopt;
  }
};

// Backend that forwards every role to a chat-completions endpoint.
class GatewayBackend : public Backend {
 public:
  struct Options {
    std::string default_model = "gpt-4o-mini";
    std::map<ExecutorId, std::string> role_models;
    double temperature = 0.0;
    PricingTable pricing;
  };

  GatewayBackend(const ChatClient& client, Options options);

  ChatReply Complete(ExecutorId role,
                     std::span<const ChatMessage> prompt) const override;
  std::optional<double> PriceUsd(ExecutorId role,
                                 const TokenUsage& usage) const override;

  const std::string& ModelFor(ExecutorId role) const;

 private:
  const ChatClient& client_;
  Options options_;
};

template <typename T>
struct ExecutorOutcome {
  T payload;
  TokenUsage usage;
  double measured_usd = 0.0;
};

// Reply parsing, exposed for tests.
std::vector<std::string> ParseSubQuestions(std::string_view reply);
// Indices named by "Document<j>" tokens that are < doc_count, in ascending
// order without duplicates. nullopt when the reply names no document at all.
std::optional<std::vector<size_t>> ParseDocumentSelection(
    std::string_view reply, size_t doc_count);
// Text inside the first **...** pair, else the whole reply, trimmed.
std::string ExtractAnswer(std::string_view reply);
// First non-empty line with surrounding whitespace and quotes removed.
std::string CleanRewrite(std::string_view reply);

// The seven executors, bound to a backend and (for RA) a corpus index.
// Stateless apart from those references; concurrent calls are safe.
class Executors {
 public:
  Executors(const Backend& backend, const CorpusIndex* index,
            size_t retrieval_k = 5);

  // 1..4 sub-questions; throws ExecutorError when the reply has none.
  ExecutorOutcome<std::vector<std::string>> DecomposeSerial(
      std::string_view question) const;
  ExecutorOutcome<std::vector<std::string>> DecomposeParallel(
      std::string_view question) const;
  // Falls back to the input question on an empty reply.
  ExecutorOutcome<std::string> Rewrite(std::string_view question) const;
  // Subset of docs in input order; an unparseable reply keeps every document.
  ExecutorOutcome<std::vector<Document>> SelectDocuments(
      std::string_view question, std::span<const Document> docs) const;
  // Top-k BM25 documents. No LLM usage; one retrieval call.
  std::vector<Document> Retrieve(std::string_view question) const;
  // Throws ExecutorError on an empty reply.
  ExecutorOutcome<std::string> GenerateAnswer(
      std::string_view question, std::span<const Document> docs) const;
  // Every slot must be answered (PreconditionError otherwise).
  ExecutorOutcome<std::string> Summarize(
      std::string_view question, std::span<const SubQuestionSlot> slots) const;

  size_t retrieval_k() const { return retrieval_k_; }
  const Backend& backend() const { return backend_; }

 private:
  ExecutorOutcome<std::vector<std::string>> Decompose(
      ExecutorId role, std::string_view question) const;
  template <typename T>
  ExecutorOutcome<T> Wrap(ExecutorId role, T payload,
                          const ChatReply& reply) const;

  const Backend& backend_;
  const CorpusIndex* index_;
  size_t retrieval_k_;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_EXECUTORS_H_
