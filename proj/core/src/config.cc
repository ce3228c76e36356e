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

#include "adaptrag/config.h"

#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "adaptrag/errors.h"
#include "adaptrag/text.h"

namespace adaptrag {

namespace {

namespace pt = boost::property_tree;

double ToDouble(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') {
    throw PreconditionError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

long long ToInt(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0') {
    throw PreconditionError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

size_t ToCount(const std::string& key, const std::string& value) {
  const long long v = ToInt(key, value);
  if (v < 0) throw PreconditionError(key + ": must be >= 0");
  return static_cast<size_t>(v);
}

bool ToBool(const std::string& key, const std::string& value) {
  const std::string v = text::ToLowerAscii(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw PreconditionError(key + ": expected a boolean, got '" + value + "'");
}

using Setter = std::function<void(AppConfig&, const std::string& key,
                                  const std::string& value)>;

std::map<std::string, Setter> Setters() {
  std::map<std::string, Setter> s;
  s["paths.corpus"] = [](AppConfig& c, auto&, auto& v) { c.corpus_path = v; };
  s["paths.dataset"] = [](AppConfig& c, auto&, auto& v) { c.dataset_path = v; };
  s["paths.world"] = [](AppConfig& c, auto&, auto& v) { c.world_path = v; };
  s["paths.policy"] = [](AppConfig& c, auto&, auto& v) { c.policy_path = v; };

  s["gateway.base_url"] = [](AppConfig& c, auto&, auto& v) { c.gateway.base_url = v; };
  s["gateway.endpoint_path"] = [](AppConfig& c, auto&, auto& v) {
    c.gateway.endpoint_path = v;
  };
  s["gateway.api_key_env"] = [](AppConfig& c, auto&, auto& v) {
    c.gateway.api_key_env = v;
  };
  s["gateway.timeout_ms"] = [](AppConfig& c, auto& k, auto& v) {
    c.gateway.timeout = std::chrono::milliseconds(ToCount(k, v));
  };
  s["gateway.max_attempts"] = [](AppConfig& c, auto& k, auto& v) {
    c.gateway.max_attempts = static_cast<int>(ToCount(k, v));
  };
  s["gateway.initial_backoff_ms"] = [](AppConfig& c, auto& k, auto& v) {
    c.gateway.initial_backoff = std::chrono::milliseconds(ToCount(k, v));
  };
  s["gateway.backoff_multiplier"] = [](AppConfig& c, auto& k, auto& v) {
    c.gateway.backoff_multiplier = ToDouble(k, v);
  };
  s["gateway.max_concurrency"] = [](AppConfig& c, auto& k, auto& v) {
    c.gateway.max_concurrency = static_cast<int>(ToCount(k, v));
  };

  s["models.planner"] = [](AppConfig& c, auto&, auto& v) { c.planner_model = v; };
  s["models.default"] = [](AppConfig& c, auto&, auto& v) {
    c.executor_models.default_model = v;
  };
  s["models.temperature"] = [](AppConfig& c, auto& k, auto& v) {
    c.executor_models.temperature = ToDouble(k, v);
  };
  for (const ExecutorId id : kAllExecutors) {
    if (id == ExecutorId::kRA) continue;
    const std::string name = text::ToLowerAscii(ExecutorName(id));
    s["models." + name] = [id](AppConfig& c, auto&, auto& v) {
      c.executor_models.role_models[id] = v;
    };
    s["cost." + name] = [id](AppConfig& c, auto& k, auto& v) {
      c.orchestrator.costs.executor_usd[id] = ToDouble(k, v);
    };
  }
  s["cost.reference_max"] = [](AppConfig& c, auto& k, auto& v) {
    c.orchestrator.costs.reference_max_usd = ToDouble(k, v);
  };
  s["cost.turn_cost_mode"] = [](AppConfig& c, auto& k, auto& v) {
    if (v == "per_round") {
      c.orchestrator.turn_cost_mode = TurnCostMode::kPerRound;
    } else if (v == "table") {
      c.orchestrator.turn_cost_mode = TurnCostMode::kTable;
    } else {
      throw PreconditionError(k + ": expected per_round or table");
    }
  };

  s["rl.alpha"] = [](AppConfig& c, auto& k, auto& v) { c.train.alpha = ToDouble(k, v); };
  s["rl.gamma"] = [](AppConfig& c, auto& k, auto& v) { c.train.gamma = ToDouble(k, v); };
  s["rl.lambda"] = [](AppConfig& c, auto& k, auto& v) { c.train.lambda = ToDouble(k, v); };
  s["rl.epsilon"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.epsilon = ToDouble(k, v);
  };
  s["rl.beta"] = [](AppConfig& c, auto& k, auto& v) { c.train.beta = ToDouble(k, v); };
  s["rl.learning_rate"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.learning_rate = ToDouble(k, v);
  };
  s["rl.batch_size"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.batch_size = ToCount(k, v);
  };
  s["rl.epochs_per_batch"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.epochs_per_batch = ToCount(k, v);
  };
  s["rl.n_batches"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.n_batches = ToCount(k, v);
  };
  s["rl.seed"] = [](AppConfig& c, auto& k, auto& v) { c.train.seed = ToCount(k, v); };
  s["rl.normalize_advantages"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.normalize_advantages = ToBool(k, v);
  };
  s["rl.chain_turns"] = [](AppConfig& c, auto& k, auto& v) {
    c.train.chain_turns = ToBool(k, v);
  };

  s["rollout.max_turn"] = [](AppConfig& c, auto& k, auto& v) {
    c.orchestrator.max_turn = static_cast<int>(ToInt(k, v));
    c.train.max_turn = c.orchestrator.max_turn;
  };
  s["rollout.k"] = [](AppConfig& c, auto& k, auto& v) { c.retrieval_k = ToCount(k, v); };
  s["rollout.fallback_on_invalid"] = [](AppConfig& c, auto& k, auto& v) {
    c.orchestrator.fallback_on_invalid = ToBool(k, v);
  };

  s["world.seed"] = [](AppConfig& c, auto& k, auto& v) { c.world.seed = ToCount(k, v); };
  s["world.n_entities"] = [](AppConfig& c, auto& k, auto& v) {
    c.world.n_entities = ToCount(k, v);
  };
  s["world.n_distractors"] = [](AppConfig& c, auto& k, auto& v) {
    c.world.n_distractors = ToCount(k, v);
  };
  s["world.org_mentions"] = [](AppConfig& c, auto& k, auto& v) {
    c.world.org_mentions = ToCount(k, v);
  };
  s["world.n_questions_per_kind"] = [](AppConfig& c, auto& k, auto& v) {
    c.world.n_questions_per_kind = ToCount(k, v);
  };
  s["eval.workers"] = [](AppConfig& c, auto& k, auto& v) {
    c.eval_workers = ToCount(k, v);
  };
  return s;
}

// "<input>, <output>" USD per token.
ModelPrice ParsePrice(const std::string& key, const std::string& value) {
  const size_t comma = value.find(',');
  if (comma == std::string::npos) {
    throw PreconditionError(key + ": expected '<input>, <output>'");
  }
  return {ToDouble(key, text::Trim(value.substr(0, comma))),
          ToDouble(key, text::Trim(value.substr(comma + 1)))};
}

}  // namespace

AppConfig ParseConfig(std::string_view ini_text, std::string_view source) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(std::string(source), e.line(), e.message());
  }
  AppConfig config;
  const auto setters = Setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw InputError(std::string(source), 0,
                       "key outside a section: " + section);
    }
    for (const auto& [key, node] : body) {
      const std::string value = text::Trim(node.data());
      const std::string full = section + "." + key;
      try {
        if (section == "pricing") {
          config.executor_models.pricing.Set(key, ParsePrice(full, value));
          continue;
        }
        const auto it = setters.find(full);
        if (it == setters.end()) {
          throw PreconditionError("unknown config key " + full);
        }
        it->second(config, full, value);
      } catch (const PreconditionError& e) {
        throw InputError(std::string(source), 0, e.what());
      }
    }
  }
  try {
    config.orchestrator.costs.Check();
    config.train.Check();
  } catch (const PreconditionError& e) {
    throw InputError(std::string(source), 0, e.what());
  }
  if (config.retrieval_k == 0) {
    throw InputError(std::string(source), 0, "rollout.k must be >= 1");
  }
  return config;
}

AppConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), path.string());
}

}  // namespace adaptrag
