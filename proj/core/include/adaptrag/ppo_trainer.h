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

#ifndef ADAPTRAG_PPO_TRAINER_H_
#define ADAPTRAG_PPO_TRAINER_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "adaptrag/planner_policy.h"
#include "adaptrag/trajectory.h"

namespace adaptrag {

// Steps grouped by rollout; holds one batch.
class ReplayBuffer {
 public:
  void Add(std::vector<TrajectoryStep> rollout);
  const std::vector<std::vector<TrajectoryStep>>& rollouts() const {
    return rollouts_;
  }
  size_t StepCount() const;
  bool empty() const { return StepCount() == 0; }
  void Clear() { rollouts_.clear(); }

 private:
  std::vector<std::vector<TrajectoryStep>> rollouts_;
};

struct TrainConfig {
  double alpha = 0.0;
  double gamma = 1.0;
  double lambda = 0.95;
  double epsilon = 0.2;
  double beta = 0.01;
  double learning_rate = 0.1;
  size_t batch_size = 16;
  size_t epochs_per_batch = 1;
  size_t n_batches = 125;
  uint64_t seed = 1;
  int max_turn = 6;
  bool normalize_advantages = true;
  // Run GAE across the steps of a rollout instead of treating each planner
  // invocation as its own episode.
  bool chain_turns = false;
  // Throws PreconditionError when a value is out of range.
  void Check() const;
};

// total = r_f1 - alpha * r_cp - r_fp for every step.
void AssignRewards(std::span<TrajectoryStep> steps, double r_f1, double alpha);

double ShapedReward(double total_reward, double log_prob_current,
                    double log_prob_init, double beta, bool is_terminal);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Reverse accumulation with a zero bootstrap after the last step.
GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values, double gamma,
                     double lambda);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A), ratio = exp(new - old).
double ClippedSurrogate(double log_prob_new, double log_prob_old,
                        double advantage, double epsilon);

// max((v_new - target)^2, (clip(v_new, v_old - eps, v_old + eps) - target)^2).
double ClippedValueLoss(double v_new, double v_old, double v_target,
                        double epsilon);

// A step ready for the loss: inputs frozen at collection time.
struct PreparedStep {
  std::vector<double> features;
  PlanningPhase phase = PlanningPhase::kRoot;
  size_t action = 0;
  double log_prob_old = 0.0;
  double value_old = 0.0;
  double advantage = 0.0;
  double target = 0.0;
};

// Shaped rewards, advantages and value targets for the buffer's trainable
// steps. Throws PreconditionError when a step has no assigned reward.
std::vector<PreparedStep> PrepareBatch(const ReplayBuffer& buffer,
                                       const PolicyParams& params,
                                       const TrainConfig& config);

struct LossEvaluation {
  double loss = 0.0;  // actor_loss + critic_loss
  double actor_loss = 0.0;  // negated mean surrogate
  double critic_loss = 0.0;
  std::vector<double> actor_grad;
  std::vector<double> critic_grad;
};

LossEvaluation EvaluateLoss(const PolicyParams& params,
                            std::span<const PreparedStep> steps,
                            double epsilon);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8);
  void Step(std::vector<double>& weights, std::span<const double> grad,
            std::vector<double>& m, std::vector<double>& v);
  void Step(PolicyParams& params, const LossEvaluation& eval);

 private:
  double learning_rate_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> actor_m_, actor_v_, critic_m_, critic_v_;
};

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double kl = 0.0;  // mean log-prob gap between behavior and frozen init
  double entropy = 0.0;
  size_t steps = 0;
};

// One update on the buffer, which is cleared afterwards. Throws
// PreconditionError on an empty buffer.
UpdateStats PpoUpdate(ReplayBuffer& buffer, PolicyParams& params,
                      const TrainConfig& config, AdamOptimizer& optimizer);

struct Episode {
  std::vector<TrajectoryStep> steps;
  double f1 = 0.0;
};

// Runs one rollout of a dataset item with a sampling policy built from the
// given parameters and seed.
using RolloutProvider =
    std::function<Episode(size_t item, const PolicyParams& params, uint64_t seed)>;

struct BatchLog {
  size_t batch = 0;
  double mean_reward = 0.0;
  double mean_f1 = 0.0;
  double mean_r_cp = 0.0;
  UpdateStats stats;
};

// Collects batch_size rollouts per batch over a seeded item order, assigns
// rewards, and updates. Freezes the initial actor first. Writes one JSON line
// per batch to the log stream when one is given.
PolicyParams Train(const RolloutProvider& env, size_t dataset_size,
                   const TrainConfig& config, PolicyParams params,
                   std::ostream* log = nullptr,
                   const std::function<void(const BatchLog&,
                                            const PolicyParams&)>& on_batch = {});

}  // namespace adaptrag

#endif  // ADAPTRAG_PPO_TRAINER_H_
