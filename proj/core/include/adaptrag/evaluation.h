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

#ifndef ADAPTRAG_EVALUATION_H_
#define ADAPTRAG_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/executors.h"
#include "adaptrag/orchestrator.h"
#include "adaptrag/planner_policy.h"

namespace adaptrag {

struct QaItem {
  std::string question;
  std::vector<std::string> golden_answers;
  bool operator==(const QaItem&) const = default;
};

struct QaDataset {
  std::string name;
  std::vector<QaItem> items;
};

// One {"question", "golden_answers"} object per non-blank line. Throws
// InputError with the line number on malformed records, and "empty dataset"
// when there are none.
QaDataset ParseDatasetJsonl(std::string_view content, std::string_view source,
                            std::string name);
// The dataset name defaults to the file stem.
QaDataset LoadDataset(const std::filesystem::path& path);
std::string DatasetToJsonl(const QaDataset& dataset);

struct ItemFailure {
  size_t item = 0;
  std::string message;
};

// Means over the successful rollouts of one dataset.
struct DatasetMetrics {
  std::string dataset;
  size_t items = 0;
  size_t failures = 0;
  double f1 = 0.0;  // percent
  // Measured USD per query when the backend reports prices, else nominal.
  double token_cost = 0.0;
  double measured_usd = 0.0;
  double nominal_usd = 0.0;
  double retrieval_calls = 0.0;
  double turns = 0.0;
  double r_cp = 0.0;
  bool operator==(const DatasetMetrics&) const = default;
};

struct MetricsReport {
  std::vector<DatasetMetrics> rows;
  std::vector<ItemFailure> failures;
};

struct EvalOptions {
  uint64_t seed = 1;
  OrchestratorConfig orchestrator;
  size_t workers = 1;
};

struct EvalRun {
  DatasetMetrics metrics;
  std::vector<ItemFailure> failures;
  std::vector<std::string> traces;  // per item; empty for failed items
  std::vector<RolloutMetrics> per_item;
};

// Rolls out every item (item i uses seed + i) and aggregates. Item failures
// are collected rather than thrown.
EvalRun Evaluate(const QaDataset& dataset, const Planner& planner,
                 const Executors& executors, const EvalOptions& options);

// Aligned markdown table; columns dataset, F1, token cost, retrieval calls,
// turns.
std::string RenderMarkdown(const MetricsReport& report);
// Header "dataset,F1,token_cost,retrieval_calls,turns" and one row per
// dataset, numbers in round-trip precision.
std::string RenderCsv(const MetricsReport& report);
// Reads RenderCsv output back; only the five CSV fields are filled.
MetricsReport ParseCsv(std::string_view csv);

}  // namespace adaptrag

#endif  // ADAPTRAG_EVALUATION_H_
