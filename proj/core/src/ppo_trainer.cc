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

#include "adaptrag/ppo_trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "adaptrag/errors.h"
#include "json.hpp"

namespace adaptrag {

void ReplayBuffer::Add(std::vector<TrajectoryStep> rollout) {
  rollouts_.push_back(std::move(rollout));
}

size_t ReplayBuffer::StepCount() const {
  size_t n = 0;
  for (const auto& r : rollouts_) n += r.size();
  return n;
}

void TrainConfig::Check() const {
  if (alpha < 0.0) throw PreconditionError("alpha must be >= 0");
  if (gamma < 0.0 || gamma > 1.0) throw PreconditionError("gamma must be in [0,1]");
  if (lambda < 0.0 || lambda > 1.0) {
    throw PreconditionError("lambda must be in [0,1]");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw PreconditionError("epsilon must be in (0,1)");
  }
  if (beta < 0.0) throw PreconditionError("beta must be >= 0");
  if (!(learning_rate > 0.0)) throw PreconditionError("learning rate must be > 0");
  if (batch_size == 0) throw PreconditionError("batch size must be > 0");
  if (epochs_per_batch == 0) throw PreconditionError("epochs per batch must be > 0");
  if (max_turn < 1) throw PreconditionError("max_turn must be >= 1");
}

void AssignRewards(std::span<TrajectoryStep> steps, double r_f1, double alpha) {
  if (!(r_f1 >= 0.0 && r_f1 <= 1.0)) {
    throw PreconditionError("F1 reward must lie in [0,1]");
  }
  for (auto& step : steps) {
    step.total_reward = r_f1 - alpha * step.r_cp - step.r_fp;
    step.reward_assigned = true;
  }
}

double ShapedReward(double total_reward, double log_prob_current,
                    double log_prob_init, double beta, bool is_terminal) {
  if (!is_terminal) return 0.0;
  return total_reward - beta * (log_prob_current - log_prob_init);
}

GaeResult ComputeGae(std::span<const double> rewards,
                     std::span<const double> values, double gamma,
                     double lambda) {
  if (rewards.size() != values.size() || rewards.empty()) {
    throw PreconditionError("GAE needs equal, non-empty reward and value lists");
  }
  const size_t n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_advantage = 0.0;
  for (size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : 0.0;
    const double delta = rewards[i] + gamma * next_value - values[i];
    next_advantage = delta + gamma * lambda * next_advantage;
    out.advantages[i] = next_advantage;
    out.returns[i] = next_advantage + values[i];
  }
  return out;
}

double ClippedSurrogate(double log_prob_new, double log_prob_old,
                        double advantage, double epsilon) {
  const double ratio = std::exp(log_prob_new - log_prob_old);
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double ClippedValueLoss(double v_new, double v_old, double v_target,
                        double epsilon) {
  const double clipped = std::clamp(v_new, v_old - epsilon, v_old + epsilon);
  return std::max((v_new - v_target) * (v_new - v_target),
                  (clipped - v_target) * (clipped - v_target));
}

namespace {

double LogProbOf(std::span<const double> actor, std::span<const double> features,
                 PlanningPhase phase, size_t action) {
  const auto dist = ActorForward(actor, features, phase);
  const double top = *std::max_element(dist.logits.begin(), dist.logits.end());
  double sum = 0.0;
  for (const double l : dist.logits) sum += std::exp(l - top);
  return dist.logits[action] - top - std::log(sum);
}

}  // namespace

std::vector<PreparedStep> PrepareBatch(const ReplayBuffer& buffer,
                                       const PolicyParams& params,
                                       const TrainConfig& config) {
  std::vector<PreparedStep> out;
  for (const auto& rollout : buffer.rollouts()) {
    std::vector<const TrajectoryStep*> trainable;
    for (const auto& step : rollout) {
      if (!step.reward_assigned) {
        throw PreconditionError("trajectory step has no assigned reward");
      }
      if (step.action >= 0) trainable.push_back(&step);
    }
    if (trainable.empty()) continue;
    std::vector<double> rewards, values;
    for (const auto* step : trainable) {
      const double lp_init =
          LogProbOf(params.frozen_init, step->features, step->phase,
                    static_cast<size_t>(step->action));
      rewards.push_back(ShapedReward(step->total_reward, step->log_prob_behavior,
                                     lp_init, config.beta, true));
      values.push_back(step->value_estimate);
    }
    GaeResult gae;
    if (config.chain_turns) {
      gae = ComputeGae(rewards, values, config.gamma, config.lambda);
    } else {
      for (size_t i = 0; i < rewards.size(); ++i) {
        const auto single = ComputeGae(std::span(&rewards[i], 1),
                                       std::span(&values[i], 1), config.gamma,
                                       config.lambda);
        gae.advantages.push_back(single.advantages[0]);
        gae.returns.push_back(single.returns[0]);
      }
    }
    for (size_t i = 0; i < trainable.size(); ++i) {
      const auto* step = trainable[i];
      out.push_back({step->features, step->phase,
                     static_cast<size_t>(step->action), step->log_prob_behavior,
                     step->value_estimate, gae.advantages[i], gae.returns[i]});
    }
  }
  // A single step has nothing to normalize against.
  if (config.normalize_advantages && out.size() >= 2) {
    double mean = 0.0;
    for (const auto& s : out) mean += s.advantage;
    mean /= out.size();
    double var = 0.0;
    for (const auto& s : out) var += (s.advantage - mean) * (s.advantage - mean);
    const double sd = std::sqrt(var / out.size());
    for (auto& s : out) s.advantage = (s.advantage - mean) / (sd + 1e-8);
  }
  return out;
}

LossEvaluation EvaluateLoss(const PolicyParams& params,
                            std::span<const PreparedStep> steps,
                            double epsilon) {
  if (steps.empty()) throw PreconditionError("loss over an empty batch");
  const size_t width = params.action_count();
  LossEvaluation eval;
  eval.actor_grad.assign(params.actor.size(), 0.0);
  eval.critic_grad.assign(params.critic.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(steps.size());

  for (const auto& step : steps) {
    const auto dist = ActorForward(params, step.features, step.phase);
    const double top = *std::max_element(dist.logits.begin(), dist.logits.end());
    double sum = 0.0;
    for (const double l : dist.logits) sum += std::exp(l - top);
    const double lp_new = dist.logits[step.action] - top - std::log(sum);

    const double ratio = std::exp(lp_new - step.log_prob_old);
    const double a = step.advantage;
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    const double surrogate = std::min(ratio * a, clipped * a);
    eval.actor_loss -= surrogate * inv_n;

    // d surrogate / d log-prob: ratio * A unless the clipped branch binds
    // with the ratio outside the trust region.
    double d_lp = ratio * a;
    if (clipped * a < ratio * a && clipped != ratio) d_lp = 0.0;
    if (d_lp != 0.0) {
      for (size_t d = 0; d < kFeatureDim; ++d) {
        const double f = step.features[d];
        if (f == 0.0) continue;
        for (size_t b = 0; b < dist.probs.size(); ++b) {
          const double indicator = b == step.action ? 1.0 : 0.0;
          eval.actor_grad[d * width + b] -=
              inv_n * d_lp * (indicator - dist.probs[b]) * f;
        }
      }
    }

    const double v_new = CriticForward(params, step.features);
    const double v_clipped =
        std::clamp(v_new, step.value_old - epsilon, step.value_old + epsilon);
    const double plain = (v_new - step.target) * (v_new - step.target);
    const double bounded = (v_clipped - step.target) * (v_clipped - step.target);
    eval.critic_loss += std::max(plain, bounded) * inv_n;
    double d_v = 2.0 * (v_new - step.target);
    if (bounded > plain && v_clipped != v_new) d_v = 0.0;
    for (size_t d = 0; d < kFeatureDim; ++d) {
      eval.critic_grad[d] += inv_n * d_v * step.features[d];
    }
  }
  eval.loss = eval.actor_loss + eval.critic_loss;
  return eval;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2,
                             double eps)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::Step(std::vector<double>& weights,
                         std::span<const double> grad, std::vector<double>& m,
                         std::vector<double>& v) {
  if (m.size() != weights.size()) {
    m.assign(weights.size(), 0.0);
    v.assign(weights.size(), 0.0);
  }
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < weights.size(); ++i) {
    m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
    v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
    weights[i] -= learning_rate_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
  }
}

void AdamOptimizer::Step(PolicyParams& params, const LossEvaluation& eval) {
  ++t_;
  Step(params.actor, eval.actor_grad, actor_m_, actor_v_);
  Step(params.critic, eval.critic_grad, critic_m_, critic_v_);
}

UpdateStats PpoUpdate(ReplayBuffer& buffer, PolicyParams& params,
                      const TrainConfig& config, AdamOptimizer& optimizer) {
  if (buffer.empty()) throw PreconditionError("PPO update on an empty buffer");
  config.Check();
  params.Check();
  const auto steps = PrepareBatch(buffer, params, config);
  buffer.Clear();
  UpdateStats stats;
  stats.steps = steps.size();
  if (steps.empty()) return stats;

  for (const auto& step : steps) {
    const auto dist = ActorForward(params.frozen_init, step.features, step.phase);
    stats.kl += (step.log_prob_old - std::log(dist.probs[step.action])) /
                steps.size();
  }
  for (size_t epoch = 0; epoch < config.epochs_per_batch; ++epoch) {
    const auto eval = EvaluateLoss(params, steps, config.epsilon);
    if (epoch == 0) {
      stats.actor_loss = eval.actor_loss;
      stats.critic_loss = eval.critic_loss;
    }
    optimizer.Step(params, eval);
  }
  for (const auto& step : steps) {
    const auto dist = ActorForward(params, step.features, step.phase);
    double h = 0.0;
    for (const double p : dist.probs) {
      if (p > 0.0) h -= p * std::log(p);
    }
    stats.entropy += h / steps.size();
  }
  return stats;
}

PolicyParams Train(const RolloutProvider& env, size_t dataset_size,
                   const TrainConfig& config, PolicyParams params,
                   std::ostream* log,
                   const std::function<void(const BatchLog&,
                                            const PolicyParams&)>& on_batch) {
  if (dataset_size == 0) throw PreconditionError("training dataset is empty");
  config.Check();
  params.FreezeInit();
  params.Check();
  AdamOptimizer optimizer(config.learning_rate);
  std::mt19937_64 order_rng(config.seed);
  std::vector<size_t> order(dataset_size);
  std::iota(order.begin(), order.end(), 0);
  size_t cursor = dataset_size;
  uint64_t rollout_counter = 0;

  for (size_t batch = 0; batch < config.n_batches; ++batch) {
    ReplayBuffer buffer;
    BatchLog record;
    record.batch = batch;
    size_t step_total = 0;
    for (size_t r = 0; r < config.batch_size; ++r) {
      if (cursor == dataset_size) {
        for (size_t i = dataset_size; i > 1; --i) {
          std::swap(order[i - 1], order[order_rng() % i]);
        }
        cursor = 0;
      }
      const size_t item = order[cursor++];
      const uint64_t seed = config.seed * 0x9E3779B97F4A7C15ULL + rollout_counter++;
      Episode episode;
      try {
        episode = env(item, params, seed);
      } catch (const std::exception& e) {
        throw Error("rollout failed for item " + std::to_string(item) + ": " +
                    e.what());
      }
      AssignRewards(episode.steps, episode.f1, config.alpha);
      record.mean_f1 += episode.f1 / config.batch_size;
      for (const auto& step : episode.steps) {
        record.mean_reward += step.total_reward;
        record.mean_r_cp += step.r_cp;
        ++step_total;
      }
      buffer.Add(std::move(episode.steps));
    }
    if (step_total > 0) {
      record.mean_reward /= step_total;
      record.mean_r_cp /= step_total;
    }
    record.stats = PpoUpdate(buffer, params, config, optimizer);
    if (log != nullptr) {
      const nlohmann::json line = {{"batch", record.batch},
                                   {"mean_reward", record.mean_reward},
                                   {"mean_f1", record.mean_f1},
                                   {"mean_r_cp", record.mean_r_cp},
                                   {"actor_loss", record.stats.actor_loss},
                                   {"critic_loss", record.stats.critic_loss},
                                   {"kl", record.stats.kl},
                                   {"entropy", record.stats.entropy}};
      *log << line.dump() << '\n';
    }
    if (on_batch) on_batch(record, params);
  }
  return params;
}

}  // namespace adaptrag
