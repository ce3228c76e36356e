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

// Command-line entry point: index, synth, run, train, eval, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adaptrag/config.h"
#include "adaptrag/corpus_index.h"
#include "adaptrag/errors.h"
#include "adaptrag/evaluation.h"
#include "adaptrag/executors.h"
#include "adaptrag/llm_gateway.h"
#include "adaptrag/orchestrator.h"
#include "adaptrag/planner_policy.h"
#include "adaptrag/ppo_trainer.h"
#include "adaptrag/synthworld.h"

namespace fs = std::filesystem;
using namespace adaptrag;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<double> alpha;
  std::string planner = "compact";
  std::string backend = "scripted";
  std::string dataset;
  std::string out;
  std::string world;
  std::string corpus;
  std::string policy;
  std::string mode = "greedy";
};

AppConfig ResolveConfig(const CommonFlags& flags) {
  AppConfig config = flags.config_path.empty() ? AppConfig{}
                                               : LoadConfig(flags.config_path);
  if (flags.seed) {
    config.train.seed = *flags.seed;
    config.world.seed = *flags.seed;
  }
  if (flags.alpha) config.train.alpha = *flags.alpha;
  if (!flags.world.empty()) config.world_path = flags.world;
  if (!flags.corpus.empty()) config.corpus_path = flags.corpus;
  if (!flags.dataset.empty()) config.dataset_path = flags.dataset;
  if (!flags.policy.empty()) config.policy_path = flags.policy;
  config.train.Check();
  return config;
}

void WriteFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Backend, corpus index and executors for one command.
class Stack {
 public:
  Stack(const AppConfig& config, const CommonFlags& flags) {
    if (flags.backend == "scripted") {
      if (config.world_path.empty()) {
        throw PreconditionError("the scripted backend needs a world file (--world)");
      }
      world_ = std::make_unique<SynthWorld>(LoadWorld(config.world_path));
      backend_ = std::make_unique<ScriptedBackend>(*world_);
      index_ = std::make_unique<CorpusIndex>(CorpusIndex::Build(world_->corpus));
    } else {
      if (config.corpus_path.empty()) {
        throw PreconditionError("the llm backend needs a corpus (--corpus)");
      }
      EnsureClient(config);
      backend_ = std::make_unique<GatewayBackend>(*client_, config.executor_models);
      index_ = std::make_unique<CorpusIndex>(
          CorpusIndex::Build(LoadCorpusJsonl(config.corpus_path)));
    }
    executors_ = std::make_unique<Executors>(*backend_, index_.get(),
                                             config.retrieval_k);
    if (flags.planner == "llm") {
      EnsureClient(config);
      planner_ = std::make_unique<LlmPlanner>(*client_, config.planner_model);
    } else {
      params_ = config.policy_path.empty() ? PolicyParams::Zeros()
                                           : LoadPolicy(config.policy_path);
      planner_ = std::make_unique<CompactPlanner>(
          params_, flags.mode == "sample" ? SelectMode::kSample
                                          : SelectMode::kGreedy);
    }
  }

  const Executors& executors() const { return *executors_; }
  const Planner& planner() const { return *planner_; }
  const SynthWorld* world() const { return world_.get(); }

 private:
  void EnsureClient(const AppConfig& config) {
    if (!client_) client_ = std::make_unique<ChatClient>(config.gateway);
  }

  std::unique_ptr<SynthWorld> world_;
  std::unique_ptr<ChatClient> client_;
  std::unique_ptr<Backend> backend_;
  std::unique_ptr<CorpusIndex> index_;
  std::unique_ptr<Executors> executors_;
  PolicyParams params_;
  std::unique_ptr<Planner> planner_;
};

QaDataset DatasetFor(const AppConfig& config, const Stack& stack) {
  if (!config.dataset_path.empty()) return LoadDataset(config.dataset_path);
  if (stack.world() != nullptr) {
    return ParseDatasetJsonl(WorldDatasetJsonl(*stack.world()), "world",
                             "synthworld");
  }
  throw PreconditionError("no dataset given (--dataset)");
}

int CmdIndex(const CommonFlags& flags) {
  const AppConfig config = ResolveConfig(flags);
  if (config.corpus_path.empty()) throw PreconditionError("--corpus is required");
  const auto index = CorpusIndex::Build(LoadCorpusJsonl(config.corpus_path));
  char line[256];
  std::snprintf(line, sizeof(line),
                "{\"documents\": %zu, \"terms\": %zu, \"avg_doc_length\": %.6f}\n",
                index.doc_count(), index.term_count(), index.avg_doc_length());
  if (flags.out.empty()) {
    std::cout << line;
  } else {
    WriteFile(flags.out, line);
  }
  return 0;
}

int CmdSynth(const CommonFlags& flags) {
  const AppConfig config = ResolveConfig(flags);
  const fs::path dir = flags.out.empty() ? fs::path("synthworld") : fs::path(flags.out);
  const SynthWorld world = GenerateWorld(config.world);
  WriteFile(dir / "world.json", WorldToJson(world) + "\n");
  WriteFile(dir / "corpus.jsonl", CorpusToJsonl(world.corpus));
  WriteFile(dir / "dataset.jsonl", WorldDatasetJsonl(world));
  std::cout << "wrote " << world.questions.size() << " questions and "
            << world.corpus.size() << " documents to " << dir.string() << "\n";
  return 0;
}

int CmdRun(const CommonFlags& flags, const std::string& question) {
  const AppConfig config = ResolveConfig(flags);
  const Stack stack(config, flags);
  const auto result = Rollout(question, {}, stack.planner(), stack.executors(),
                              config.orchestrator, config.train.seed);
  const std::string trace = result.context.ToTraceJson() + "\n";
  if (!flags.out.empty()) WriteFile(flags.out, trace);
  std::cout << trace;
  return 0;
}

int CmdTrain(const CommonFlags& flags, const std::string& log_path,
             size_t checkpoint_every) {
  if (flags.planner != "compact") {
    throw PreconditionError("only the compact planner can be trained");
  }
  AppConfig config = ResolveConfig(flags);
  config.orchestrator.max_turn = config.train.max_turn;
  const Stack stack(config, flags);
  const QaDataset dataset = DatasetFor(config, stack);
  const fs::path out = flags.out.empty() ? fs::path("policy.json") : fs::path(flags.out);

  const RolloutProvider env = [&](size_t item, const PolicyParams& params,
                                  uint64_t seed) {
    const CompactPlanner planner(params, SelectMode::kSample);
    const auto& qa = dataset.items[item];
    auto result = Rollout(qa.question, qa.golden_answers, planner,
                          stack.executors(), config.orchestrator, seed);
    return Episode{std::move(result.trajectory), *result.f1};
  };
  std::ofstream log;
  const fs::path log_file = log_path.empty() ? fs::path(out.string() + ".log.jsonl")
                                             : fs::path(log_path);
  if (log_file.has_parent_path()) fs::create_directories(log_file.parent_path());
  log.open(log_file, std::ios::binary);
  if (!log) throw Error("cannot write " + log_file.string());

  PolicyParams init = config.policy_path.empty() ? PolicyParams::Zeros()
                                                 : LoadPolicy(config.policy_path);
  const auto on_batch = [&](const BatchLog& record, const PolicyParams& params) {
    if (checkpoint_every > 0 && (record.batch + 1) % checkpoint_every == 0) {
      SavePolicy(params, out.string() + ".batch" + std::to_string(record.batch + 1));
    }
  };
  const PolicyParams trained = Train(env, dataset.items.size(), config.train,
                                     std::move(init), &log, on_batch);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  SavePolicy(trained, out);
  std::cout << "trained " << config.train.n_batches << " batches; policy written to "
            << out.string() << "\n";
  return 0;
}

int CmdEval(const CommonFlags& flags, const std::string& traces_dir) {
  const AppConfig config = ResolveConfig(flags);
  const Stack stack(config, flags);
  const QaDataset dataset = DatasetFor(config, stack);
  EvalOptions options;
  options.seed = config.train.seed;
  options.orchestrator = config.orchestrator;
  options.workers = config.eval_workers;
  const EvalRun run = Evaluate(dataset, stack.planner(), stack.executors(), options);
  MetricsReport report;
  report.rows.push_back(run.metrics);
  report.failures = run.failures;
  if (!flags.out.empty()) WriteFile(flags.out, RenderCsv(report));
  if (!traces_dir.empty()) {
    for (size_t i = 0; i < run.traces.size(); ++i) {
      if (run.traces[i].empty()) continue;
      WriteFile(fs::path(traces_dir) / ("trace_" + std::to_string(i) + ".json"),
                run.traces[i] + "\n");
    }
  }
  std::cout << RenderMarkdown(report);
  for (const auto& failure : run.failures) {
    std::cerr << "item " << failure.item << " failed: " << failure.message << "\n";
  }
  return 0;
}

int CmdReport(const CommonFlags& flags, const std::vector<std::string>& inputs) {
  MetricsReport merged;
  for (const auto& path : inputs) {
    MetricsReport part = ParseCsv(ReadFile(path));
    for (auto& row : part.rows) merged.rows.push_back(std::move(row));
  }
  if (!flags.out.empty()) WriteFile(flags.out, RenderCsv(merged));
  std::cout << RenderMarkdown(merged);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multi-agent retrieval-augmented QA"};
  app.require_subcommand(1);
  CommonFlags flags;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "INI configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--out", flags.out, "Output path");
  };
  const auto add_stack = [&](CLI::App* sub) {
    sub->add_option("--planner", flags.planner, "Planner mode")
        ->check(CLI::IsMember({"compact", "llm"}));
    sub->add_option("--backend", flags.backend, "Executor backend")
        ->check(CLI::IsMember({"scripted", "llm"}));
    sub->add_option("--world", flags.world, "Synthetic world file");
    sub->add_option("--corpus", flags.corpus, "Corpus JSONL");
    sub->add_option("--policy", flags.policy, "Policy checkpoint");
    sub->add_option("--alpha", flags.alpha, "Cost weight")->check(CLI::NonNegativeNumber);
  };

  auto* index = app.add_subcommand("index", "Build the BM25 index and print its size");
  add_common(index);
  index->add_option("--corpus", flags.corpus, "Corpus JSONL");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic world and dataset");
  add_common(synth);

  std::string question;
  auto* run = app.add_subcommand("run", "Answer one question and print its trace");
  add_common(run);
  add_stack(run);
  run->add_option("--mode", flags.mode, "Policy decoding")
      ->check(CLI::IsMember({"greedy", "sample"}));
  run->add_option("question", question, "Question text")->required();

  std::string log_path;
  size_t checkpoint_every = 0;
  auto* train = app.add_subcommand("train", "Train the compact planner with PPO");
  add_common(train);
  add_stack(train);
  train->add_option("--dataset", flags.dataset, "Dataset JSONL");
  train->add_option("--log", log_path, "Training log (JSON lines)");
  train->add_option("--checkpoint-every", checkpoint_every, "Batches between checkpoints");

  std::string traces_dir;
  auto* eval = app.add_subcommand("eval", "Evaluate a planner on a dataset");
  add_common(eval);
  add_stack(eval);
  eval->add_option("--dataset", flags.dataset, "Dataset JSONL");
  eval->add_option("--mode", flags.mode, "Policy decoding")
      ->check(CLI::IsMember({"greedy", "sample"}));
  eval->add_option("--traces", traces_dir, "Directory for per-item traces");

  std::vector<std::string> inputs;
  auto* report = app.add_subcommand("report", "Merge CSV reports into one table");
  report->add_option("--out", flags.out, "Merged CSV output");
  report->add_option("inputs", inputs, "CSV reports")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*index) return CmdIndex(flags);
    if (*synth) return CmdSynth(flags);
    if (*run) return CmdRun(flags, question);
    if (*train) return CmdTrain(flags, log_path, checkpoint_every);
    if (*eval) return CmdEval(flags, traces_dir);
    if (*report) return CmdReport(flags, inputs);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
