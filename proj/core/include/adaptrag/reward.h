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

#ifndef ADAPTRAG_REWARD_H_
#define ADAPTRAG_REWARD_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/workflow.h"

namespace adaptrag {

// How QDS and QDP translate into the latency term.
enum class TurnCostMode {
  // QDS adds one round per sub-question (0.25 each); QDP adds one round.
  kPerRound,
  // QDS costs a flat 0.25; QDP costs 0.25 per sub-question.
  kTable,
};

// Average USD token cost of each executor, and the per-query cost that maps
// to a scaled token cost of 1.0.
struct NominalCostTable {
  std::map<ExecutorId, double> executor_usd;
  double reference_max_usd = 6.02e-4;

  // QDS 0.91e-4, QDP 1.00e-4, QR 0.88e-4, DS 2.08e-4, AG 1.58e-4,
  // AS 1.48e-4; RA is free of LLM tokens.
  static NominalCostTable Defaults();

  double CostOf(ExecutorId id) const;
  // Throws PreconditionError on negative costs or reference_max <= 0.
  void Check() const;
};

// Lowercase, punctuation to spaces, drop a/an/the, split on whitespace.
std::vector<std::string> NormalizeAnswer(std::string_view text);

// Max over golds of bag-of-tokens F1. Two empty token lists score 1, one
// empty list scores 0. Throws PreconditionError when golds is empty.
double F1Score(std::string_view predicted, std::span<const std::string> golds);

// Nominal USD of the LLM-backed steps of a plan.
double PlanNominalUsd(const WorkflowPlan& plan, const NominalCostTable& table);

// Summed nominal cost of the plans over reference_max, clamped to [0, 1].
double TokenCostScaled(std::span<const WorkflowPlan> plans,
                       const NominalCostTable& table);

// n_sub_questions must lie in [0, 4].
double TurnCost(const WorkflowPlan& plan, size_t n_sub_questions,
                TurnCostMode mode = TurnCostMode::kPerRound);

int RetrievalIndicator(const WorkflowPlan& plan);

double CostPenalty(double token_cost, double turn_cost, int retrieval_indicator);

// 0 iff the text parsed and the plan passed validation for the phase.
int FormatPenalty(const ParseResult& parsed, PlanningPhase phase);

// r_f1 - alpha * r_cp - r_fp.
double TotalReward(double r_f1, double r_cp, int r_fp, double alpha);

struct RewardBreakdown {
  double r_f1 = 0.0;
  double token_cost = 0.0;
  double turn_cost = 0.0;
  int retrieval_indicator = 0;
  double r_cp = 0.0;
  int r_fp = 0;
  double alpha = 0.0;
  double total = 0.0;
};

// Cost terms of a single executed plan.
RewardBreakdown PlanCost(const WorkflowPlan& plan, size_t n_sub_questions,
                         const NominalCostTable& table,
                         TurnCostMode mode = TurnCostMode::kPerRound);

}  // namespace adaptrag

#endif  // ADAPTRAG_REWARD_H_
