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

#include "adaptrag/reward.h"

#include <algorithm>
#include <map>

#include "adaptrag/errors.h"
#include "adaptrag/text.h"

namespace adaptrag {

NominalCostTable NominalCostTable::Defaults() {
  NominalCostTable table;
  table.executor_usd = {
      {ExecutorId::kQDS, 0.91e-4}, {ExecutorId::kQDP, 1.00e-4},
      {ExecutorId::kQR, 0.88e-4},  {ExecutorId::kDS, 2.08e-4},
      {ExecutorId::kRA, 0.0},      {ExecutorId::kAG, 1.58e-4},
      {ExecutorId::kAS, 1.48e-4}};
  table.reference_max_usd = 6.02e-4;
  return table;
}

double NominalCostTable::CostOf(ExecutorId id) const {
  if (id == ExecutorId::kRA) return 0.0;
  const auto it = executor_usd.find(id);
  return it == executor_usd.end() ? 0.0 : it->second;
}

void NominalCostTable::Check() const {
  if (!(reference_max_usd > 0.0)) {
    throw PreconditionError("cost table reference_max must be > 0");
  }
  for (const auto& [id, usd] : executor_usd) {
    if (usd < 0.0) {
      throw PreconditionError("negative nominal cost for " +
                              std::string(ExecutorName(id)));
    }
  }
}

std::vector<std::string> NormalizeAnswer(std::string_view input) {
  std::string spaced;
  for (const char32_t cp : text::DecodeUtf8(input)) {
    if (text::IsAlnum(cp)) {
      text::AppendUtf8(text::ToLower(cp), spaced);
    } else {
      spaced.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < spaced.size()) {
    while (pos < spaced.size() && spaced[pos] == ' ') ++pos;
    size_t end = pos;
    while (end < spaced.size() && spaced[end] != ' ') ++end;
    if (end > pos) {
      std::string token = spaced.substr(pos, end - pos);
      if (token != "a" && token != "an" && token != "the") {
        tokens.push_back(std::move(token));
      }
    }
    pos = end;
  }
  return tokens;
}

namespace {

double TokenF1(const std::vector<std::string>& pred,
               const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string_view, int> gold_counts;
  for (const auto& token : gold) ++gold_counts[token];
  int overlap = 0;
  for (const auto& token : pred) {
    auto it = gold_counts.find(token);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / pred.size();
  const double recall = static_cast<double>(overlap) / gold.size();
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double F1Score(std::string_view predicted, std::span<const std::string> golds) {
  if (golds.empty()) throw PreconditionError("F1 needs at least one gold answer");
  const auto pred = NormalizeAnswer(predicted);
  double best = 0.0;
  for (const auto& gold : golds) {
    best = std::max(best, TokenF1(pred, NormalizeAnswer(gold)));
  }
  return best;
}

double PlanNominalUsd(const WorkflowPlan& plan, const NominalCostTable& table) {
  double usd = 0.0;
  for (const ExecutorId id : plan.steps) usd += table.CostOf(id);
  return usd;
}

double TokenCostScaled(std::span<const WorkflowPlan> plans,
                       const NominalCostTable& table) {
  double usd = 0.0;
  for (const auto& plan : plans) usd += PlanNominalUsd(plan, table);
  return std::clamp(usd / table.reference_max_usd, 0.0, 1.0);
}

double TurnCost(const WorkflowPlan& plan, size_t n_sub_questions,
                TurnCostMode mode) {
  if (n_sub_questions > 4) {
    throw PreconditionError("turn cost: at most 4 sub-questions");
  }
  const double rounds = static_cast<double>(n_sub_questions);
  if (plan.Contains(ExecutorId::kQDS)) {
    return mode == TurnCostMode::kPerRound ? 0.25 * rounds : 0.25;
  }
  if (plan.Contains(ExecutorId::kQDP)) {
    return mode == TurnCostMode::kPerRound ? 0.25 : 0.25 * rounds;
  }
  return 0.0;
}

int RetrievalIndicator(const WorkflowPlan& plan) {
  return plan.Contains(ExecutorId::kRA) ? 1 : 0;
}

double CostPenalty(double token_cost, double turn_cost,
                   int retrieval_indicator) {
  return token_cost + turn_cost + static_cast<double>(retrieval_indicator);
}

int FormatPenalty(const ParseResult& parsed, PlanningPhase phase) {
  const auto* plan = std::get_if<WorkflowPlan>(&parsed);
  if (plan == nullptr) return 1;
  return Validate(*plan, phase).ok() ? 0 : 1;
}

double TotalReward(double r_f1, double r_cp, int r_fp, double alpha) {
  return r_f1 - alpha * r_cp - static_cast<double>(r_fp);
}

RewardBreakdown PlanCost(const WorkflowPlan& plan, size_t n_sub_questions,
                         const NominalCostTable& table, TurnCostMode mode) {
  RewardBreakdown out;
  const WorkflowPlan plans[] = {plan};
  out.token_cost = TokenCostScaled(plans, table);
  out.turn_cost = TurnCost(plan, n_sub_questions, mode);
  out.retrieval_indicator = RetrievalIndicator(plan);
  out.r_cp = CostPenalty(out.token_cost, out.turn_cost, out.retrieval_indicator);
  return out;
}

}  // namespace adaptrag
