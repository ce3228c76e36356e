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

#include "adaptrag/planner_policy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "adaptrag/corpus_index.h"
#include "adaptrag/errors.h"
#include "adaptrag/prompts.h"
#include "json.hpp"

namespace adaptrag {

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>>& ComparativeMarkers() {
  static const std::set<std::string, std::less<>> kMarkers = {
      "higher", "lower",   "more",   "less",   "earlier", "later", "older",
      "younger", "larger", "smaller", "better", "worse",  "or"};
  return kMarkers;
}

const std::set<std::string, std::less<>>& Conjunctions() {
  static const std::set<std::string, std::less<>> kWords = {"and", "or", "but",
                                                            "nor", "that"};
  return kWords;
}

}  // namespace

std::vector<double> Featurize(const Observation& obs) {
  std::vector<double> f(kFeatureDim, 0.0);
  const auto tokens = TokenizeForIndex(obs.question);
  f[feature::kLength] = std::min(1.0, static_cast<double>(tokens.size()) / 32.0);

  static constexpr std::string_view kWh[] = {"who",  "what", "where",
                                             "when", "which", "how"};
  size_t wh = feature::kWhOther;
  for (const auto& token : tokens) {
    const auto* it = std::find(std::begin(kWh), std::end(kWh), token);
    if (it != std::end(kWh)) {
      wh = feature::kWhFirst + static_cast<size_t>(it - std::begin(kWh));
      break;
    }
  }
  f[wh] = 1.0;

  int conjunctions = 0;
  for (const auto& token : tokens) {
    if (ComparativeMarkers().count(token)) f[feature::kComparative] = 1.0;
    if (Conjunctions().count(token)) ++conjunctions;
    if (token == "please" || token == "kindly") f[feature::kFiller] = 1.0;
  }
  f[feature::kConjunctions] = std::min(1.0, conjunctions / 4.0);
  f[feature::kPhaseFirst + static_cast<size_t>(obs.phase)] = 1.0;
  if (obs.total_slots > 0) {
    f[feature::kAnsweredFraction] =
        static_cast<double>(obs.answered_slots) / obs.total_slots;
  }
  f[feature::kBias] = 1.0;
  return f;
}

PolicyParams PolicyParams::Zeros() {
  PolicyParams params;
  params.actor.assign(kFeatureDim * MaxActionCount(), 0.0);
  params.critic.assign(kFeatureDim, 0.0);
  params.frozen_init = params.actor;
  return params;
}

void PolicyParams::Check() const {
  const size_t actor_size = kFeatureDim * action_count();
  if (actor.size() != actor_size || frozen_init.size() != actor_size ||
      critic.size() != kFeatureDim) {
    throw PreconditionError("policy parameters have the wrong shape");
  }
  for (const auto* v : {&actor, &critic, &frozen_init}) {
    for (const double x : *v) {
      if (!std::isfinite(x)) {
        throw PreconditionError("policy parameters are not finite");
      }
    }
  }
}

ActionDistribution ActorForward(std::span<const double> actor,
                                std::span<const double> features,
                                PlanningPhase phase) {
  const size_t width = MaxActionCount();
  if (actor.size() != kFeatureDim * width || features.size() != kFeatureDim) {
    throw PreconditionError("actor forward: dimension mismatch");
  }
  const size_t n = EnumerateValid(phase).size();
  ActionDistribution dist;
  dist.phase = phase;
  dist.logits.assign(n, 0.0);
  for (size_t d = 0; d < kFeatureDim; ++d) {
    if (features[d] == 0.0) continue;
    for (size_t a = 0; a < n; ++a) {
      dist.logits[a] += actor[d * width + a] * features[d];
    }
  }
  const double top = *std::max_element(dist.logits.begin(), dist.logits.end());
  dist.probs.resize(n);
  double sum = 0.0;
  for (size_t a = 0; a < n; ++a) {
    dist.probs[a] = std::exp(dist.logits[a] - top);
    sum += dist.probs[a];
  }
  for (double& p : dist.probs) p /= sum;
  return dist;
}

ActionDistribution ActorForward(const PolicyParams& params,
                                std::span<const double> features,
                                PlanningPhase phase) {
  return ActorForward(params.actor, features, phase);
}

double CriticForward(const PolicyParams& params,
                     std::span<const double> features) {
  if (features.size() != params.critic.size()) {
    throw PreconditionError("critic forward: dimension mismatch");
  }
  double v = 0.0;
  for (size_t d = 0; d < features.size(); ++d) v += params.critic[d] * features[d];
  return v;
}

SelectedAction SelectAction(const ActionDistribution& dist,
                            std::mt19937_64& rng, SelectMode mode) {
  if (dist.probs.empty()) throw PreconditionError("empty action distribution");
  size_t pick = 0;
  if (mode == SelectMode::kGreedy) {
    for (size_t a = 1; a < dist.probs.size(); ++a) {
      if (dist.probs[a] > dist.probs[pick]) pick = a;
    }
  } else {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double cumulative = 0.0;
    pick = dist.probs.size() - 1;
    for (size_t a = 0; a < dist.probs.size(); ++a) {
      cumulative += dist.probs[a];
      if (u < cumulative) {
        pick = a;
        break;
      }
    }
  }
  // Log-prob from logits keeps precision for near-zero probabilities.
  double log_prob = std::log(dist.probs[pick]);
  if (dist.logits.size() == dist.probs.size()) {
    const double top = *std::max_element(dist.logits.begin(), dist.logits.end());
    double sum = 0.0;
    for (const double l : dist.logits) sum += std::exp(l - top);
    log_prob = dist.logits[pick] - top - std::log(sum);
  }
  return {pick, log_prob};
}

std::string PolicyToJson(const PolicyParams& params) {
  params.Check();
  json actions = json::object();
  for (const auto phase : {PlanningPhase::kRoot, PlanningPhase::kSubQuestion,
                           PlanningPhase::kSummarizeReady}) {
    json list = json::array();
    for (const auto& plan : EnumerateValid(phase)) {
      list.push_back(RenderWorkflow(plan));
    }
    actions[std::string(PhaseName(phase))] = list;
  }
  const json out = {{"format", "adaptrag-policy"},
                    {"version", 1},
                    {"feature_dim", kFeatureDim},
                    {"action_count", params.action_count()},
                    {"actions", actions},
                    {"actor", params.actor},
                    {"critic", params.critic},
                    {"frozen_init", params.frozen_init}};
  return out.dump(2);
}

PolicyParams PolicyFromJson(std::string_view text) {
  PolicyParams params;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "adaptrag-policy" || j.at("version") != 1) {
      throw InputError("policy", 0, "unsupported checkpoint format");
    }
    if (j.at("feature_dim").get<size_t>() != kFeatureDim ||
        j.at("action_count").get<size_t>() != MaxActionCount()) {
      throw InputError("policy", 0, "checkpoint dimensions do not match");
    }
    for (const auto phase : {PlanningPhase::kRoot, PlanningPhase::kSubQuestion,
                             PlanningPhase::kSummarizeReady}) {
      const auto& list = j.at("actions").at(std::string(PhaseName(phase)));
      const auto& valid = EnumerateValid(phase);
      if (list.size() != valid.size()) {
        throw InputError("policy", 0, "checkpoint action set differs");
      }
      for (size_t a = 0; a < valid.size(); ++a) {
        if (list[a].get<std::string>() != RenderWorkflow(valid[a])) {
          throw InputError("policy", 0, "checkpoint action set differs");
        }
      }
    }
    params.actor = j.at("actor").get<std::vector<double>>();
    params.critic = j.at("critic").get<std::vector<double>>();
    params.frozen_init = j.at("frozen_init").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError("policy", 0, e.what());
  }
  try {
    params.Check();
  } catch (const PreconditionError& e) {
    throw InputError("policy", 0, e.what());
  }
  return params;
}

void SavePolicy(const PolicyParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write policy checkpoint " + path.string());
  out << PolicyToJson(params) << '\n';
}

PolicyParams LoadPolicy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open policy checkpoint");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return PolicyFromJson(buffer.str());
}

CompactPlanner::CompactPlanner(const PolicyParams& params, SelectMode mode)
    : params_(params), mode_(mode) {
  params_.Check();
}

PlanProposal CompactPlanner::Propose(const Observation& obs,
                                     std::mt19937_64& rng) const {
  PolicyStepInfo info;
  info.features = Featurize(obs);
  const auto dist = ActorForward(params_, info.features, obs.phase);
  const auto chosen = SelectAction(dist, rng, mode_);
  info.action = chosen.index;
  info.log_prob = chosen.log_prob;
  info.value = CriticForward(params_, info.features);
  PlanProposal proposal;
  proposal.text = RenderWorkflow(EnumerateValid(obs.phase)[chosen.index]);
  proposal.policy = std::move(info);
  return proposal;
}

std::string LlmPlan(const Observation& obs, const ChatClient& client,
                    const std::string& model, TokenUsage* usage) {
  const auto messages = prompts::Render(
      prompts::Planner(), {obs.question, "", obs.context_summary});
  const ChatReply reply = client.Chat(messages, model, 0.0);
  if (usage != nullptr) *usage = reply.usage;
  return reply.text;
}

LlmPlanner::LlmPlanner(const ChatClient& client, std::string model)
    : client_(client), model_(std::move(model)) {}

PlanProposal LlmPlanner::Propose(const Observation& obs,
                                 std::mt19937_64& /*rng*/) const {
  PlanProposal proposal;
  proposal.text = LlmPlan(obs, client_, model_, &proposal.usage);
  return proposal;
}

ScriptedPlanner::ScriptedPlanner(Rule rule) : rule_(std::move(rule)) {}

PlanProposal ScriptedPlanner::Propose(const Observation& obs,
                                      std::mt19937_64& /*rng*/) const {
  PlanProposal proposal;
  proposal.text = rule_(obs);
  return proposal;
}

}  // namespace adaptrag
