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

#ifndef ADAPTRAG_ORCHESTRATOR_H_
#define ADAPTRAG_ORCHESTRATOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptrag/errors.h"
#include "adaptrag/executors.h"
#include "adaptrag/planner_policy.h"
#include "adaptrag/reward.h"
#include "adaptrag/rollout_context.h"
#include "adaptrag/trajectory.h"

namespace adaptrag {

struct OrchestratorConfig {
  int max_turn = 6;
  // Replace an unparseable or invalid plan by the phase default instead of
  // failing the rollout. The format penalty is recorded either way.
  bool fallback_on_invalid = true;
  NominalCostTable costs = NominalCostTable::Defaults();
  TurnCostMode turn_cost_mode = TurnCostMode::kPerRound;
};

struct RolloutMetrics {
  TokenUsage usage;  // executors and planner
  double measured_usd = 0.0;
  double nominal_usd = 0.0;
  double token_cost = 0.0;  // scaled over every executed plan
  // Rollout-level cost penalty: scaled token cost, summed turn cost capped at
  // 1, and 1 if anything was retrieved.
  double r_cp = 0.0;
  int retrieval_calls = 0;
  int turn_number = 0;
  double wall_seconds = 0.0;
};

struct RolloutResult {
  RolloutContext context;
  std::vector<TrajectoryStep> trajectory;
  std::string predicted_answer;
  std::optional<double> f1;  // when gold answers were given
  RolloutMetrics metrics;
};

// Executor or planner failure inside a rollout, with the trace so far.
class RolloutError : public Error {
 public:
  RolloutError(const std::string& what, std::string partial_trace)
      : Error(what), partial_trace_(std::move(partial_trace)) {}
  const std::string& partial_trace() const { return partial_trace_; }

 private:
  std::string partial_trace_;
};

// Raised when a plan aborts part-way; carries what had been spent.
class PlanExecutionError : public Error {
 public:
  PlanExecutionError(const std::string& what, TokenUsage usage,
                     int retrieval_calls)
      : Error(what), usage_(usage), retrieval_calls_(retrieval_calls) {}
  const TokenUsage& usage() const { return usage_; }
  int retrieval_calls() const { return retrieval_calls_; }

 private:
  TokenUsage usage_;
  int retrieval_calls_;
};

// Effect of one plan, computed without touching the context.
struct PlanRun {
  std::optional<SlotMode> decomposition;
  std::vector<std::string> sub_questions;
  std::vector<Document> documents;
  std::optional<std::string> answer;
  TokenUsage usage;
  double measured_usd = 0.0;
  int retrieval_calls = 0;
};

// Runs the plan's executors left to right on `query`. Throws
// PlanExecutionError when an executor fails.
PlanRun RunPlan(const WorkflowPlan& plan, const std::string& query,
                const RolloutContext& ctx, const Executors& executors);

// Writes a run into the context. `slot` is empty for the initial question.
void ApplyRun(RolloutContext& ctx, std::optional<size_t> slot, PlanRun run);

struct ExecutionOutcome {
  TokenUsage usage;
  double measured_usd = 0.0;
  int retrieval_calls = 0;
};

// RunPlan followed by ApplyRun. The plan must be valid for the target.
ExecutionOutcome ExecuteWorkflow(const WorkflowPlan& plan, RolloutContext& ctx,
                                 std::optional<size_t> slot,
                                 const Executors& executors);

// The plan used when the planner's text is unusable.
WorkflowPlan FallbackPlan(PlanningPhase phase);

RolloutResult Rollout(const std::string& question,
                      std::span<const std::string> golds,
                      const Planner& planner, const Executors& executors,
                      const OrchestratorConfig& config, uint64_t seed);

}  // namespace adaptrag

#endif  // ADAPTRAG_ORCHESTRATOR_H_
