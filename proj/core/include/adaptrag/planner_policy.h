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

#ifndef ADAPTRAG_PLANNER_POLICY_H_
#define ADAPTRAG_PLANNER_POLICY_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/llm_gateway.h"
#include "adaptrag/rollout_context.h"
#include "adaptrag/workflow.h"

namespace adaptrag {

inline constexpr size_t kFeatureDim = 16;

// Feature layout.
namespace feature {
inline constexpr size_t kLength = 0;
inline constexpr size_t kWhFirst = 1;  // who, what, where, when, which, how, other
inline constexpr size_t kWhOther = 7;
inline constexpr size_t kComparative = 8;
inline constexpr size_t kConjunctions = 9;
inline constexpr size_t kPhaseFirst = 10;  // root, sub_question, summarize_ready
inline constexpr size_t kAnsweredFraction = 13;
inline constexpr size_t kFiller = 14;
inline constexpr size_t kBias = 15;
}  // namespace feature

std::vector<double> Featurize(const Observation& obs);

// Linear actor (kFeatureDim x MaxActionCount(), row-major by feature) and
// linear critic.
struct PolicyParams {
  std::vector<double> actor;
  std::vector<double> critic;
  std::vector<double> frozen_init;

  static PolicyParams Zeros();
  size_t action_count() const { return MaxActionCount(); }
  double& Actor(size_t d, size_t a) { return actor[d * action_count() + a]; }
  double Actor(size_t d, size_t a) const {
    return actor[d * action_count() + a];
  }
  // Copies the actor into frozen_init.
  void FreezeInit() { frozen_init = actor; }
  // Throws PreconditionError on wrong sizes or non-finite entries.
  void Check() const;
  bool operator==(const PolicyParams&) const = default;
};

struct ActionDistribution {
  PlanningPhase phase = PlanningPhase::kRoot;
  std::vector<double> probs;  // over EnumerateValid(phase)
  std::vector<double> logits;
};

// Masked softmax over the phase's valid plans, using the given actor matrix.
ActionDistribution ActorForward(std::span<const double> actor,
                                std::span<const double> features,
                                PlanningPhase phase);
ActionDistribution ActorForward(const PolicyParams& params,
                                std::span<const double> features,
                                PlanningPhase phase);
double CriticForward(const PolicyParams& params,
                     std::span<const double> features);

enum class SelectMode { kSample, kGreedy };

struct SelectedAction {
  size_t index = 0;
  double log_prob = 0.0;
};

// Greedy takes the argmax with the lowest index on ties.
SelectedAction SelectAction(const ActionDistribution& dist,
                            std::mt19937_64& rng, SelectMode mode);

// Checkpoint: JSON with the feature dimension, per-phase action lists, actor,
// critic and frozen init.
std::string PolicyToJson(const PolicyParams& params);
PolicyParams PolicyFromJson(std::string_view json);
void SavePolicy(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams LoadPolicy(const std::filesystem::path& path);

struct PolicyStepInfo {
  std::vector<double> features;
  size_t action = 0;
  double log_prob = 0.0;
  double value = 0.0;
};

struct PlanProposal {
  std::string text;
  std::optional<PolicyStepInfo> policy;
  TokenUsage usage;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlanProposal Propose(const Observation& obs,
                               std::mt19937_64& rng) const = 0;
};

class CompactPlanner : public Planner {
 public:
  CompactPlanner(const PolicyParams& params, SelectMode mode);
  PlanProposal Propose(const Observation& obs,
                       std::mt19937_64& rng) const override;

 private:
  PolicyParams params_;
  SelectMode mode_;
};

// Sends the rendered planner prompt to a chat model and returns its raw reply.
std::string LlmPlan(const Observation& obs, const ChatClient& client,
                    const std::string& model, TokenUsage* usage = nullptr);

class LlmPlanner : public Planner {
 public:
  LlmPlanner(const ChatClient& client, std::string model);
  PlanProposal Propose(const Observation& obs,
                       std::mt19937_64& rng) const override;

 private:
  const ChatClient& client_;
  std::string model_;
};

// Plans chosen by a caller-supplied function; used for replays and fixed
// per-kind strategies.
class ScriptedPlanner : public Planner {
 public:
  using Rule = std::function<std::string(const Observation&)>;
  explicit ScriptedPlanner(Rule rule);
  PlanProposal Propose(const Observation& obs,
                       std::mt19937_64& rng) const override;

 private:
  Rule rule_;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_PLANNER_POLICY_H_
