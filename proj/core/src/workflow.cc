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

#include "adaptrag/workflow.h"

#include <algorithm>

#include "adaptrag/text.h"

namespace adaptrag {

std::string_view ExecutorName(ExecutorId id) {
  switch (id) {
    case ExecutorId::kQDS:
      return "QDS";
    case ExecutorId::kQDP:
      return "QDP";
    case ExecutorId::kQR:
      return "QR";
    case ExecutorId::kDS:
      return "DS";
    case ExecutorId::kRA:
      return "RA";
    case ExecutorId::kAG:
      return "AG";
    case ExecutorId::kAS:
      return "AS";
  }
  return "?";
}

std::optional<ExecutorId> ExecutorFromName(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  for (const ExecutorId id : kAllExecutors) {
    if (ExecutorName(id) == upper) return id;
  }
  return std::nullopt;
}

std::string_view PhaseName(PlanningPhase phase) {
  switch (phase) {
    case PlanningPhase::kRoot:
      return "root";
    case PlanningPhase::kSubQuestion:
      return "sub_question";
    case PlanningPhase::kSummarizeReady:
      return "summarize_ready";
  }
  return "?";
}

bool WorkflowPlan::Contains(ExecutorId id) const {
  return std::find(steps.begin(), steps.end(), id) != steps.end();
}

std::string RenderWorkflow(const WorkflowPlan& plan) {
  std::string out;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    if (i > 0) out += ", ";
    out += ExecutorName(plan.steps[i]);
  }
  return out;
}

ParseResult ParseWorkflow(std::string_view text) {
  if (text::Trim(text).empty()) {
    return ParseError{"", 0, "empty workflow"};
  }
  WorkflowPlan plan;
  size_t position = 0;
  size_t start = 0;
  while (true) {
    const size_t comma = text.find(',', start);
    const std::string_view raw = text.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    ++position;
    const std::string token = text::Trim(raw);
    const auto id = ExecutorFromName(token);
    if (!id) {
      return ParseError{token, position,
                        token.empty() ? "empty token"
                                      : "unknown executor '" + token + "'"};
    }
    plan.steps.push_back(*id);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return plan;
}

std::string_view RuleCode(ValidityRule rule) {
  switch (rule) {
    case ValidityRule::kSingletonOnly:
      return "V1";
    case ValidityRule::kEndsWithAnswer:
      return "V2";
    case ValidityRule::kRewriteBeforeRetrieve:
      return "V3";
    case ValidityRule::kSelectAfterRetrieve:
      return "V4";
    case ValidityRule::kSingleRetrieval:
      return "V5";
    case ValidityRule::kSummarizeOnlyWhenReady:
      return "V6";
    case ValidityRule::kDecomposeOnlyAtRoot:
      return "V7";
  }
  return "V?";
}

bool ValidityReport::Has(ValidityRule rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule](const Violation& v) { return v.rule == rule; });
}

namespace {

bool IsSingletonExecutor(ExecutorId id) {
  return id == ExecutorId::kQDS || id == ExecutorId::kQDP ||
         id == ExecutorId::kAS;
}

size_t CountOf(const WorkflowPlan& plan, ExecutorId id) {
  return static_cast<size_t>(
      std::count(plan.steps.begin(), plan.steps.end(), id));
}

}  // namespace

ValidityReport Validate(const WorkflowPlan& plan, PlanningPhase phase) {
  ValidityReport report;
  auto flag = [&report](ValidityRule rule, std::string detail) {
    report.violations.push_back({rule, std::move(detail)});
  };
  const auto& steps = plan.steps;
  if (steps.empty()) {
    flag(ValidityRule::kEndsWithAnswer, "empty plan");
    if (phase == PlanningPhase::kSummarizeReady) {
      flag(ValidityRule::kSummarizeOnlyWhenReady, "expected the plan AS");
    }
    return report;
  }

  const bool has_singleton =
      std::any_of(steps.begin(), steps.end(), IsSingletonExecutor);
  if (has_singleton && steps.size() > 1) {
    flag(ValidityRule::kSingletonOnly,
         "QDS, QDP and AS must be the only step of their plan");
  }

  const bool linear = !has_singleton;
  if (linear) {
    if (steps.back() != ExecutorId::kAG || CountOf(plan, ExecutorId::kAG) != 1) {
      flag(ValidityRule::kEndsWithAnswer, "plan must end with a single AG");
    }
  }

  if (plan.Contains(ExecutorId::kQR)) {
    const bool placed = steps.front() == ExecutorId::kQR &&
                        CountOf(plan, ExecutorId::kQR) == 1 &&
                        steps.size() > 1 && steps[1] == ExecutorId::kRA;
    if (!placed) {
      flag(ValidityRule::kRewriteBeforeRetrieve,
           "QR must come first and be followed directly by RA");
    }
  }

  if (plan.Contains(ExecutorId::kDS)) {
    const auto ds = std::find(steps.begin(), steps.end(), ExecutorId::kDS);
    const bool retrieved_before =
        std::find(steps.begin(), ds, ExecutorId::kRA) != ds;
    if (!retrieved_before || CountOf(plan, ExecutorId::kDS) != 1) {
      flag(ValidityRule::kSelectAfterRetrieve,
           "DS appears once and needs RA earlier in the plan");
    }
  }

  if (CountOf(plan, ExecutorId::kRA) > 1) {
    flag(ValidityRule::kSingleRetrieval, "RA may appear at most once");
  }

  const bool is_summarize = steps.size() == 1 && steps[0] == ExecutorId::kAS;
  if (phase == PlanningPhase::kSummarizeReady) {
    if (!is_summarize) {
      flag(ValidityRule::kSummarizeOnlyWhenReady,
           "only AS is valid once every sub-question is answered");
    }
  } else if (plan.Contains(ExecutorId::kAS)) {
    flag(ValidityRule::kSummarizeOnlyWhenReady,
         "AS needs every sub-question answered");
  }

  if (phase != PlanningPhase::kRoot &&
      (plan.Contains(ExecutorId::kQDS) || plan.Contains(ExecutorId::kQDP))) {
    flag(ValidityRule::kDecomposeOnlyAtRoot,
         "decomposition is only allowed for the initial question");
  }
  return report;
}

const std::vector<WorkflowPlan>& EnumerateValid(PlanningPhase phase) {
  using E = ExecutorId;
  static const std::vector<WorkflowPlan> linear = {
      {{E::kAG}},
      {{E::kRA, E::kAG}},
      {{E::kQR, E::kRA, E::kAG}},
      {{E::kRA, E::kDS, E::kAG}},
      {{E::kQR, E::kRA, E::kDS, E::kAG}},
  };
  static const std::vector<WorkflowPlan> root = [] {
    auto plans = linear;
    plans.push_back({{E::kQDS}});
    plans.push_back({{E::kQDP}});
    return plans;
  }();
  static const std::vector<WorkflowPlan> summarize = {{{E::kAS}}};
  switch (phase) {
    case PlanningPhase::kRoot:
      return root;
    case PlanningPhase::kSubQuestion:
      return linear;
    case PlanningPhase::kSummarizeReady:
      return summarize;
  }
  return summarize;
}

std::optional<size_t> ActionIndexOf(const WorkflowPlan& plan,
                                    PlanningPhase phase) {
  const auto& plans = EnumerateValid(phase);
  const auto it = std::find(plans.begin(), plans.end(), plan);
  if (it == plans.end()) return std::nullopt;
  return static_cast<size_t>(it - plans.begin());
}

size_t MaxActionCount() {
  return std::max({EnumerateValid(PlanningPhase::kRoot).size(),
                   EnumerateValid(PlanningPhase::kSubQuestion).size(),
                   EnumerateValid(PlanningPhase::kSummarizeReady).size()});
}

}  // namespace adaptrag
