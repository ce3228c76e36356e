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

#ifndef ADAPTRAG_WORKFLOW_H_
#define ADAPTRAG_WORKFLOW_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adaptrag {

// The seven executor agents a workflow can name.
enum class ExecutorId { kQDS, kQDP, kQR, kDS, kRA, kAG, kAS };

inline constexpr std::array<ExecutorId, 7> kAllExecutors = {
    ExecutorId::kQDS, ExecutorId::kQDP, ExecutorId::kQR, ExecutorId::kDS,
    ExecutorId::kRA,  ExecutorId::kAG,  ExecutorId::kAS};

std::string_view ExecutorName(ExecutorId id);
// Case-insensitive; nullopt for anything outside the seven abbreviations.
std::optional<ExecutorId> ExecutorFromName(std::string_view name);

// Which kind of question the planner is looking at.
enum class PlanningPhase {
  kRoot,            // the initial question, nothing decomposed yet
  kSubQuestion,     // an unanswered sub-question
  kSummarizeReady,  // every sub-question has an answer
};

std::string_view PhaseName(PlanningPhase phase);

struct WorkflowPlan {
  std::vector<ExecutorId> steps;

  bool Contains(ExecutorId id) const;
  bool operator==(const WorkflowPlan&) const = default;
};

// Comma-separated abbreviations, e.g. "QR, RA, AG".
std::string RenderWorkflow(const WorkflowPlan& plan);

struct ParseError {
  std::string token;
  size_t position = 0;  // 1-based token index; 0 when the input is empty
  std::string message;
};

using ParseResult = std::variant<WorkflowPlan, ParseError>;

// Splits on commas, trims whitespace, matches abbreviations
// case-insensitively. Never throws.
ParseResult ParseWorkflow(std::string_view text);

enum class ValidityRule {
  kSingletonOnly,       // V1: QDS, QDP, AS form a plan on their own
  kEndsWithAnswer,      // V2: linear plans end with exactly one AG
  kRewriteBeforeRetrieve,  // V3: QR is first and directly followed by RA
  kSelectAfterRetrieve,    // V4: DS at most once, after RA
  kSingleRetrieval,     // V5: RA at most once
  kSummarizeOnlyWhenReady,  // V6: AS iff every sub-question is answered
  kDecomposeOnlyAtRoot,     // V7: no nested decomposition
};

// "V1" .. "V7".
std::string_view RuleCode(ValidityRule rule);

struct Violation {
  ValidityRule rule;
  std::string detail;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(ValidityRule rule) const;
};

ValidityReport Validate(const WorkflowPlan& plan, PlanningPhase phase);

// Every valid plan for the phase, in a fixed order. This is the discrete
// action space of the compact planner policy.
const std::vector<WorkflowPlan>& EnumerateValid(PlanningPhase phase);

// Index of plan within EnumerateValid(phase), if present.
std::optional<size_t> ActionIndexOf(const WorkflowPlan& plan,
                                    PlanningPhase phase);

// Largest action count over all phases.
size_t MaxActionCount();

}  // namespace adaptrag

#endif  // ADAPTRAG_WORKFLOW_H_
