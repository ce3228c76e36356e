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

#include "adaptrag/rollout_context.h"

#include <algorithm>
#include <set>

#include "adaptrag/errors.h"
#include "adaptrag/prompts.h"
#include "adaptrag/text.h"
#include "json.hpp"

namespace adaptrag {

std::string_view SlotModeName(SlotMode mode) {
  return mode == SlotMode::kSerial ? "serial" : "parallel";
}

RolloutContext::RolloutContext(std::string question)
    : initial_question_(std::move(question)) {
  if (text::Trim(initial_question_).empty()) {
    throw PreconditionError("rollout question must be non-empty");
  }
}

RolloutContext NewContext(std::string question) {
  return RolloutContext(std::move(question));
}

std::optional<SlotMode> RolloutContext::decomposition() const {
  if (slots_.empty()) return std::nullopt;
  return slots_.front().mode;
}

PlanningPhase RolloutContext::CurrentPhase() const {
  if (slots_.empty()) return PlanningPhase::kRoot;
  const bool all_answered =
      std::all_of(slots_.begin(), slots_.end(),
                  [](const SubQuestionSlot& s) { return s.answer.has_value(); });
  return all_answered ? PlanningPhase::kSummarizeReady
                      : PlanningPhase::kSubQuestion;
}

void RolloutContext::Decompose(SlotMode mode,
                               std::vector<std::string> sub_questions) {
  if (!slots_.empty()) {
    throw PreconditionError("a rollout may be decomposed only once");
  }
  if (predicted_answer_) {
    throw PreconditionError("cannot decompose an answered rollout");
  }
  if (sub_questions.empty()) {
    throw PreconditionError("decomposition produced no sub-questions");
  }
  if (sub_questions.size() > kMaxSubQuestions) {
    sub_questions.resize(kMaxSubQuestions);
  }
  for (auto& text : sub_questions) {
    slots_.push_back({std::move(text), mode, {}, std::nullopt});
  }
}

std::vector<size_t> RolloutContext::UnansweredSlots() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i].answer) out.push_back(i);
  }
  return out;
}

std::optional<size_t> RolloutContext::SlotIndexOf(std::string_view text) const {
  for (size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].text == text) return i;
  }
  return std::nullopt;
}

std::string RolloutContext::WorkingQuery(size_t slot) const {
  if (slot >= slots_.size()) throw PreconditionError("slot out of range");
  const auto& target = slots_[slot];
  std::string query = target.text;
  if (target.mode != SlotMode::kSerial || slot == 0) return query;
  std::string facts;
  for (size_t i = 0; i < slot; ++i) {
    if (!slots_[i].answer) continue;
    facts += " Sub-answer " + std::to_string(i + 1) + ": " + *slots_[i].answer +
             ".";
  }
  if (!facts.empty()) query += " Known facts:" + facts;
  return query;
}

void RolloutContext::SetSlotDocuments(size_t slot, std::vector<Document> docs) {
  if (slot >= slots_.size()) throw PreconditionError("slot out of range");
  slots_[slot].documents = std::move(docs);
}

void RolloutContext::CommitSlotAnswer(size_t slot, std::string answer) {
  if (slot >= slots_.size()) throw PreconditionError("slot out of range");
  auto& target = slots_[slot];
  if (target.answer) {
    throw PreconditionError("sub-answer " + std::to_string(slot + 1) +
                            " is already set");
  }
  if (target.mode == SlotMode::kSerial) {
    for (size_t i = 0; i < slot; ++i) {
      if (!slots_[i].answer) {
        throw PreconditionError("serial sub-questions must be answered in order");
      }
    }
  }
  target.answer = std::move(answer);
}

void RolloutContext::SetRootDocuments(std::vector<Document> docs) {
  root_documents_ = std::move(docs);
}

void RolloutContext::SetPredictedAnswer(std::string answer) {
  if (predicted_answer_) {
    throw PreconditionError("predicted answer is already set");
  }
  predicted_answer_ = std::move(answer);
}

void RolloutContext::AppendTurn(TurnRecord record) {
  if (!turn_log_.empty() && record.turn_index < turn_log_.back().turn_index) {
    throw PreconditionError("turn indices must not decrease");
  }
  turn_log_.push_back(std::move(record));
}

int RolloutContext::TurnCount() const {
  std::set<int> distinct;
  for (const auto& record : turn_log_) distinct.insert(record.turn_index);
  return static_cast<int>(distinct.size());
}

int RolloutContext::RetrievalCalls() const {
  int total = 0;
  for (const auto& record : turn_log_) total += record.retrieval_calls;
  return total;
}

namespace {

nlohmann::json DocumentsJson(const std::vector<Document>& docs) {
  auto out = nlohmann::json::array();
  for (const auto& doc : docs) {
    out.push_back({{"id", doc.id}, {"title", doc.title}, {"text", doc.text}});
  }
  return out;
}

}  // namespace

std::string RolloutContext::ToTraceJson(int indent) const {
  nlohmann::json trace;
  trace["question"] = initial_question_;
  if (const auto mode = decomposition()) {
    trace["decomposition"] = SlotModeName(*mode);
  } else {
    trace["decomposition"] = nullptr;
  }
  trace["sub_questions"] = nlohmann::json::array();
  for (const auto& slot : slots_) {
    trace["sub_questions"].push_back(
        {{"text", slot.text},
         {"mode", SlotModeName(slot.mode)},
         {"documents", DocumentsJson(slot.documents)},
         {"answer", slot.answer ? nlohmann::json(*slot.answer) : nullptr}});
  }
  trace["documents"] = DocumentsJson(root_documents_);
  trace["answer"] =
      predicted_answer_ ? nlohmann::json(*predicted_answer_) : nullptr;
  trace["turns"] = nlohmann::json::array();
  for (const auto& record : turn_log_) {
    trace["turns"].push_back({{"turn", record.turn_index},
                              {"target", record.target_question},
                              {"plan", RenderWorkflow(record.plan)},
                              {"prompt_tokens", record.usage.prompt_tokens},
                              {"completion_tokens", record.usage.completion_tokens},
                              {"retrieval_calls", record.retrieval_calls},
                              {"format_penalty", record.format_penalty},
                              {"forced", record.forced}});
  }
  trace["turn_number"] = TurnCount();
  trace["retrieval_calls"] = RetrievalCalls();
  return trace.dump(indent);
}

Observation RenderObservation(const RolloutContext& ctx,
                              std::string_view target) {
  Observation obs;
  obs.phase = ctx.CurrentPhase();
  obs.total_slots = ctx.slots().size();
  obs.answered_slots = obs.total_slots - ctx.UnansweredSlots().size();

  if (obs.phase != PlanningPhase::kSubQuestion) {
    if (target != ctx.initial_question()) {
      throw PreconditionError("observation target is not the initial question: " +
                              std::string(target));
    }
  } else {
    std::optional<size_t> slot;
    for (const size_t i : ctx.UnansweredSlots()) {
      if (ctx.slots()[i].text == target) {
        slot = i;
        break;
      }
    }
    if (!slot) {
      throw PreconditionError("observation target is not an open question: " +
                              std::string(target));
    }
    if (ctx.slots()[*slot].mode == SlotMode::kSerial &&
        ctx.UnansweredSlots().front() != *slot) {
      throw PreconditionError(
          "serial sub-question rendered before its predecessors");
    }
  }
  obs.question = std::string(target);

  std::vector<prompts::QaPair> pairs;
  for (const auto& slot : ctx.slots()) {
    pairs.push_back({slot.text, slot.answer.value_or("")});
  }
  obs.context_summary = prompts::RenderSubQuestionContext(pairs);
  const auto messages = prompts::Render(
      prompts::Planner(), {obs.question, "", obs.context_summary});
  obs.planner_prompt = prompts::Flatten(messages);
  return obs;
}

}  // namespace adaptrag
