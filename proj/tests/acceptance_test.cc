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


// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptrag/evaluation.h"
#include "adaptrag/orchestrator.h"
#include "adaptrag/ppo_trainer.h"
#include "adaptrag/reward.h"
#include "adaptrag/synthworld.h"
#include "adaptrag/workflow.h"
#include "test_support.h"

namespace adaptrag {
namespace {

namespace fs = std::filesystem;
using E = ExecutorId;

struct Args {
  fs::path f1_cases;
  fs::path cli;
  fs::path work_dir = "acceptance_work";
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double time_limit_seconds;
  std::function<Verdict()> check;
};

std::string Fixed(double v, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

std::string Sci(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3e", v);
  return buffer;
}

Verdict RewardArithmetic() {
  const auto table = NominalCostTable::Defaults();
  const std::vector<WorkflowPlan> full = {
      WorkflowPlan{{E::kQR, E::kRA, E::kDS, E::kAG}}, WorkflowPlan{{E::kAS}}};
  const std::vector<WorkflowPlan> answer_only = {WorkflowPlan{{E::kAG}}};
  const double full_cost = TokenCostScaled(full, table);
  const double ag_cost = TokenCostScaled(answer_only, table);
  const double total = TotalReward(0.8, 1.25, 0, 0.2);
  const bool ok = std::abs(full_cost - 1.0) <= 1e-12 &&
                  std::abs(ag_cost - 0.26246) <= 1e-5 && total == 0.55;
  return {ok, "full=" + Fixed(full_cost, 12) + " ag=" + Fixed(ag_cost, 6) +
                  " total=" + Fixed(total, 17)};
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out(1);
  for (const char c : s) {
    if (c == sep) {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

Verdict F1Table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return {false, "cannot open " + path.string()};
  std::string line;
  size_t cases = 0, matched = 0;
  std::string first_mismatch;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 3) return {false, "malformed row: " + line};
    const auto golds = SplitOn(fields[1], '|');
    const double expected = std::strtod(fields[2].c_str(), nullptr);
    const double got = F1Score(fields[0], golds);
    ++cases;
    if (got == expected) {
      ++matched;
    } else if (first_mismatch.empty()) {
      first_mismatch = " first mismatch: '" + fields[0] + "' got " +
                       Fixed(got, 17) + " want " + fields[2];
    }
  }
  return {cases == 25 && matched == cases,
          std::to_string(matched) + "/" + std::to_string(cases) + " exact" +
              first_mismatch};
}

Verdict Replays() {
  testing::TableBackend backend;
  testing::AddReplayReplies(backend);
  const auto index = CorpusIndex::Build(testing::ReplayCorpus());
  const Executors executors(backend, &index, 3);
  const ScriptedPlanner planner(testing::ReplayPlan);
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < testing::ReplayCases().size(); ++i) {
    const auto& c = testing::ReplayCases()[i];
    const std::vector<std::string> golds = {c.gold};
    const auto result = Rollout(c.question, golds, planner, executors, {}, 1);
    const bool match = result.metrics.turn_number == c.turns &&
                       result.metrics.retrieval_calls == c.retrieval_calls &&
                       result.predicted_answer == c.answer;
    ok = ok && match;
    detail += "case" + std::to_string(i + 1) + "=(" +
              std::to_string(result.metrics.turn_number) + "," +
              std::to_string(result.metrics.retrieval_calls) + ",\"" +
              result.predicted_answer + "\") ";
  }
  return {ok, detail};
}

Verdict GradientCheck() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int buffer = 0; buffer < 100; ++buffer) {
    const PolicyParams params = testing::RandomParams(rng, 0.5);
    const auto steps = testing::RandomPreparedSteps(params, rng, 5);
    worst = std::max(worst, testing::GradientCheckMaxRelativeError(params, steps, 0.2));
  }
  return {worst < 1e-4, "100 buffers, max relative error " + Sci(worst)};
}

Verdict Bandit() {
  const auto outcome = testing::RunWorkflowBandit(1, 500);
  const bool ok = outcome.best_action == 1 && outcome.best_probability >= 0.95;
  return {ok, "best-arm probability " + Fixed(outcome.best_probability) +
                  " after " + std::to_string(outcome.updates) + " updates"};
}

// Shared synthetic world with its index, backend and executors.
struct WorldStack {
  explicit WorldStack(const WorldOptions& options)
      : world(GenerateWorld(options)),
        index(CorpusIndex::Build(world.corpus)),
        backend(world),
        executors(backend, &index),
        dataset(ParseDatasetJsonl(WorldDatasetJsonl(world), "synthworld",
                                  "synthworld")) {}

  PolicyParams Train(double alpha, uint64_t seed, size_t* rollouts) const {
    TrainConfig config;
    config.alpha = alpha;
    config.seed = seed;
    const OrchestratorConfig orchestrator;
    const RolloutProvider env = [&](size_t item, const PolicyParams& params,
                                    uint64_t s) {
      const CompactPlanner planner(params, SelectMode::kSample);
      const auto& qa = dataset.items[item];
      auto result = Rollout(qa.question, qa.golden_answers, planner, executors,
                            orchestrator, s);
      return Episode{std::move(result.trajectory), result.f1.value_or(0.0)};
    };
    *rollouts = config.n_batches * config.batch_size;
    return adaptrag::Train(env, dataset.items.size(), config,
                           PolicyParams::Zeros());
  }

  DatasetMetrics Eval(const PolicyParams& params, SelectMode mode,
                      uint64_t seed = 1) const {
    const CompactPlanner planner(params, mode);
    EvalOptions options;
    options.seed = seed;
    const auto run = Evaluate(dataset, planner, executors, options);
    if (run.metrics.failures != 0) {
      throw Error("evaluation had " + std::to_string(run.metrics.failures) +
                  " failed items");
    }
    return run.metrics;
  }

  SynthWorld world;
  CorpusIndex index;
  ScriptedBackend backend;
  Executors executors;
  QaDataset dataset;
};

struct TrainedPolicies {
  std::optional<PolicyParams> zero_alpha;
  double zero_alpha_seconds = 0.0;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

Verdict ClosedLoop(const WorldStack& stack, TrainedPolicies& trained) {
  const auto started = std::chrono::steady_clock::now();
  size_t rollouts = 0;
  trained.zero_alpha = stack.Train(0.0, 1, &rollouts);
  trained.zero_alpha_seconds = Seconds(started);
  const auto learned = stack.Eval(*trained.zero_alpha, SelectMode::kGreedy);
  const auto uniform_greedy = stack.Eval(PolicyParams::Zeros(), SelectMode::kGreedy);
  // Sampled decoding of the uniform policy is noisy, so average many seeds.
  constexpr int kSampledSeeds = 20;
  double uniform_sampled = 0.0;
  for (int s = 1; s <= kSampledSeeds; ++s) {
    uniform_sampled +=
        stack.Eval(PolicyParams::Zeros(), SelectMode::kSample, s * 1000).f1 /
        kSampledSeeds;
  }
  const bool ok = stack.dataset.items.size() == 40 && rollouts <= 2000 &&
                  learned.f1 >= 90.0 && uniform_greedy.f1 <= 70.0 &&
                  uniform_sampled <= 70.0;
  return {ok, "trained F1 " + Fixed(learned.f1, 2) + " after " +
                  std::to_string(rollouts) + " rollouts; uniform F1 " +
                  Fixed(uniform_greedy.f1, 2) + " greedy, " +
                  Fixed(uniform_sampled, 2) + " sampled (mean of 20 seeds)"};
}

Verdict AlphaTradeOff(const WorldStack& stack, const TrainedPolicies& trained) {
  if (!trained.zero_alpha) return {false, "alpha=0 policy unavailable"};
  size_t rollouts = 0;
  const PolicyParams costly = stack.Train(0.5, 1, &rollouts);
  const auto cheap = stack.Eval(*trained.zero_alpha, SelectMode::kGreedy);
  const auto frugal = stack.Eval(costly, SelectMode::kGreedy);
  const bool ok = frugal.r_cp < cheap.r_cp &&
                  frugal.retrieval_calls <= cheap.retrieval_calls;
  return {ok, "alpha=0: r_cp " + Fixed(cheap.r_cp) + " retrieval " +
                  Fixed(cheap.retrieval_calls, 3) + " F1 " + Fixed(cheap.f1, 2) +
                  "; alpha=0.5: r_cp " + Fixed(frugal.r_cp) + " retrieval " +
                  Fixed(frugal.retrieval_calls, 3) + " F1 " + Fixed(frugal.f1, 2)};
}

Verdict GrammarTotality() {
  constexpr PlanningPhase kPhases[] = {PlanningPhase::kRoot,
                                       PlanningPhase::kSubQuestion,
                                       PlanningPhase::kSummarizeReady};
  std::mt19937_64 rng(7);
  const std::string alphabet = "QDSPRAG, \t\n\rqdsprag.;-x0\xC3\xA9";
  const std::vector<std::string> pieces = {"QDS", "QDP", "QR", "DS", "RA",
                                           "AG",  "AS",  ",",  " ", ""};
  size_t disagreements = 0, parsed_plans = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string input;
    const size_t len = rng() % 24;
    for (size_t j = 0; j < len; ++j) {
      input += rng() % 2 == 0 ? std::string(1, alphabet[rng() % alphabet.size()])
                              : pieces[rng() % pieces.size()];
    }
    const auto parsed = ParseWorkflow(input);
    if (const auto* plan = std::get_if<WorkflowPlan>(&parsed)) {
      ++parsed_plans;
      for (const auto phase : kPhases) {
        if (Validate(*plan, phase).ok() != testing::OracleValid(plan->steps, phase)) {
          ++disagreements;
        }
      }
    }
  }

  size_t enumerated_mismatch = 0, sequences = 0;
  for (const auto phase : kPhases) {
    std::vector<WorkflowPlan> found;
    std::vector<E> seq;
    const auto visit = [&](auto&& self, size_t depth) -> void {
      if (!seq.empty()) {
        ++sequences;
        const bool oracle = testing::OracleValid(seq, phase);
        if (Validate(WorkflowPlan{seq}, phase).ok() != oracle) ++disagreements;
        if (oracle) found.push_back(WorkflowPlan{seq});
      }
      if (depth == 5) return;
      for (const E id : kAllExecutors) {
        seq.push_back(id);
        self(self, depth + 1);
        seq.pop_back();
      }
    };
    visit(visit, 0);
    const auto& listed = EnumerateValid(phase);
    if (found.size() != listed.size()) ++enumerated_mismatch;
    for (const auto& plan : found) {
      if (std::find(listed.begin(), listed.end(), plan) == listed.end()) {
        ++enumerated_mismatch;
      }
    }
  }
  return {disagreements == 0 && enumerated_mismatch == 0,
          "10000 fuzz inputs (" + std::to_string(parsed_plans) + " parsed), " +
              std::to_string(sequences) + " sequences, " +
              std::to_string(disagreements + enumerated_mismatch) + " mismatches"};
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Verdict CliDeterminism(const Args& args, const TrainedPolicies& trained) {
  if (args.cli.empty()) return {false, "no --cli binary given"};
  const fs::path work = args.work_dir;
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path log = work / "cli.log";
  const auto run = [&](const std::string& line) {
    return std::system((Quote(args.cli) + " " + line + " >>" + Quote(log) + " 2>&1")
                           .c_str()) == 0;
  };
  if (!run("synth --seed 3 --out " + Quote(work / "world"))) {
    return {false, "synth failed, see " + log.string()};
  }
  std::string policy_flag;
  if (trained.zero_alpha) {
    SavePolicy(*trained.zero_alpha, work / "policy.json");
    policy_flag = " --policy " + Quote(work / "policy.json");
  }
  std::vector<std::string> outputs;
  for (int i = 1; i <= 2; ++i) {
    const fs::path csv = work / ("run" + std::to_string(i) + ".csv");
    if (!run("eval --world " + Quote(work / "world" / "world.json") +
             " --dataset " + Quote(work / "world" / "dataset.jsonl") +
             " --seed 7 --planner compact --mode greedy --backend scripted" +
             policy_flag + " --out " + Quote(csv))) {
      return {false, "eval failed, see " + log.string()};
    }
    outputs.push_back(ReadAll(csv));
  }
  const bool ok = !outputs[0].empty() && outputs[0] == outputs[1];
  return {ok, std::to_string(outputs[0].size()) + " bytes, " +
                  (ok ? "identical" : "different") +
                  (policy_flag.empty() ? " (untrained policy)" : " (trained policy)")};
}

Args ParseArgs(int argc, char** argv) {
  Args args;
  for (int i = 1; i < argc; ++i) {
    const std::string flag = argv[i];
    if (i + 1 >= argc) throw std::invalid_argument("missing value for " + flag);
    const std::string value = argv[++i];
    if (flag == "--f1-cases") {
      args.f1_cases = value;
    } else if (flag == "--cli") {
      args.cli = value;
    } else if (flag == "--work-dir") {
      args.work_dir = value;
    } else {
      throw std::invalid_argument("unknown flag " + flag);
    }
  }
  return args;
}

int Main(int argc, char** argv) {
  const Args args = ParseArgs(argc, argv);
  const WorldStack stack(WorldOptions{});
  TrainedPolicies trained;

  const std::vector<Criterion> criteria = {
      {1, "reward arithmetic", 1.0, RewardArithmetic},
      {2, "F1 oracle table", 1.0, [&] { return F1Table(args.f1_cases); }},
      {3, "case replays", 1.0, Replays},
      {4, "loss gradient check", 10.0, GradientCheck},
      {5, "workflow bandit", 30.0, Bandit},
      {6, "closed-loop learning", 300.0, [&] { return ClosedLoop(stack, trained); }},
      {7, "cost weight trade-off", 600.0,
       [&] { return AlphaTradeOff(stack, trained); }},
      {8, "grammar totality", 30.0, GrammarTotality},
      {9, "CLI determinism", 60.0, [&] { return CliDeterminism(args, trained); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = criterion.check();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    double seconds = Seconds(started);
    // The trade-off compares against the closed-loop policy, so its budget
    // covers both trainings.
    if (criterion.number == 7) seconds += trained.zero_alpha_seconds;
    const bool in_time = seconds < criterion.time_limit_seconds;
    const bool pass = verdict.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << criterion.number << "] "
              << criterion.name << ": " << verdict.detail << " (" << Fixed(seconds, 2)
              << " s, limit " << criterion.time_limit_seconds << " s"
              << (in_time ? "" : ", over time") << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace adaptrag

int main(int argc, char** argv) {
  try {
    return adaptrag::Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << std::endl;
    return 2;
  }
}
