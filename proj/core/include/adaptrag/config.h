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

#ifndef ADAPTRAG_CONFIG_H_
#define ADAPTRAG_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "adaptrag/evaluation.h"
#include "adaptrag/executors.h"
#include "adaptrag/llm_gateway.h"
#include "adaptrag/orchestrator.h"
#include "adaptrag/ppo_trainer.h"
#include "adaptrag/synthworld.h"

namespace adaptrag {

// Everything a command needs, loaded from an INI file with sections
// [paths], [gateway], [models], [pricing], [cost], [rl], [rollout], [world]
// and [eval]. Missing keys keep their defaults; unknown keys are errors.
struct AppConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path dataset_path;
  std::filesystem::path world_path;
  std::filesystem::path policy_path;

  GatewayConfig gateway;
  std::string planner_model = "Qwen2.5-7B-Instruct";
  GatewayBackend::Options executor_models;

  OrchestratorConfig orchestrator;
  size_t retrieval_k = 5;
  TrainConfig train;
  WorldOptions world;
  size_t eval_workers = 1;
};

// Throws InputError naming the offending key.
AppConfig ParseConfig(std::string_view ini_text, std::string_view source);
AppConfig LoadConfig(const std::filesystem::path& path);

}  // namespace adaptrag

#endif  // ADAPTRAG_CONFIG_H_
