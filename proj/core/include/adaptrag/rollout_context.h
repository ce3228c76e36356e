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

#ifndef ADAPTRAG_ROLLOUT_CONTEXT_H_
#define ADAPTRAG_ROLLOUT_CONTEXT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/corpus_index.h"
#include "adaptrag/llm_gateway.h"
#include "adaptrag/workflow.h"

namespace adaptrag {

inline constexpr size_t kMaxSubQuestions = 4;

enum class SlotMode { kSerial, kParallel };

std::string_view SlotModeName(SlotMode mode);

struct SubQuestionSlot {
  std::string text;
  SlotMode mode = SlotMode::kSerial;
  std::vector<Document> documents;
  std::optional<std::string> answer;
};

// One planner invocation and the plan that ran for it. Entries of a parallel
// turn share a turn_index.
struct TurnRecord {
  int turn_index = 0;
  std::string target_question;
  WorkflowPlan plan;
  TokenUsage usage;
  int retrieval_calls = 0;
  bool format_penalty = false;
  bool forced = false;  // terminal plan imposed at max_turn, not planned
};

// What the planner sees for one invocation.
struct Observation {
  std::string planner_prompt;
  std::string question;
  PlanningPhase phase = PlanningPhase::kRoot;
  std::string context_summary;
  size_t answered_slots = 0;
  size_t total_slots = 0;
};

// Accumulated state of one rollout: the question, its sub-questions with
// their documents and answers, and the per-turn log.
class RolloutContext {
 public:
  // Throws PreconditionError on an empty question.
  explicit RolloutContext(std::string question);

  const std::string& initial_question() const { return initial_question_; }
  const std::vector<SubQuestionSlot>& slots() const { return slots_; }
  const std::vector<Document>& root_documents() const { return root_documents_; }
  const std::optional<std::string>& predicted_answer() const {
    return predicted_answer_;
  }
  const std::vector<TurnRecord>& turn_log() const { return turn_log_; }
  std::optional<SlotMode> decomposition() const;

  PlanningPhase CurrentPhase() const;

  // Creates the sub-question slots. Allowed once per rollout; keeps at most
  // kMaxSubQuestions. Throws PreconditionError on a second call or an empty
  // list.
  void Decompose(SlotMode mode, std::vector<std::string> sub_questions);

  // Unanswered slots in index order.
  std::vector<size_t> UnansweredSlots() const;
  std::optional<size_t> SlotIndexOf(std::string_view text) const;

  // Slot text plus a "Known facts:" suffix listing the answers of earlier
  // serial slots. The slot text itself is never rewritten.
  std::string WorkingQuery(size_t slot) const;

  void SetSlotDocuments(size_t slot, std::vector<Document> docs);
  // Answers are immutable and serial slots are answered in order.
  void CommitSlotAnswer(size_t slot, std::string answer);
  void SetRootDocuments(std::vector<Document> docs);
  // May be called once.
  void SetPredictedAnswer(std::string answer);
  // turn_index must not decrease.
  void AppendTurn(TurnRecord record);

  // Number of distinct turn indices in the log.
  int TurnCount() const;
  int RetrievalCalls() const;

  // Rollout trace mirroring the case-study layout: question, sub-questions
  // with documents and answers, root documents, final answer, and turns.
  std::string ToTraceJson(int indent = 2) const;

 private:
  std::string initial_question_;
  std::vector<SubQuestionSlot> slots_;
  std::vector<Document> root_documents_;
  std::optional<std::string> predicted_answer_;
  std::vector<TurnRecord> turn_log_;
};

RolloutContext NewContext(std::string question);

// Renders the planner's view of target, which must be the initial question
// or the text of an unanswered slot. For a serial slot every earlier slot
// must already be answered. Throws PreconditionError otherwise.
Observation RenderObservation(const RolloutContext& ctx,
                              std::string_view target);

}  // namespace adaptrag

#endif  // ADAPTRAG_ROLLOUT_CONTEXT_H_
