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

#include "adaptrag/evaluation.h"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "adaptrag/errors.h"
#include "adaptrag/reward.h"
#include "adaptrag/text.h"
#include "json.hpp"

namespace adaptrag {

QaDataset ParseDatasetJsonl(std::string_view content, std::string_view source,
                            std::string name) {
  QaDataset dataset;
  dataset.name = std::move(name);
  const auto lines = text::SplitLines(content);
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (text::Trim(lines[i]).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string(source), line_no, e.what());
    }
    if (!record.is_object() || !record.contains("question") ||
        !record["question"].is_string()) {
      throw InputError(std::string(source), line_no, "missing string question");
    }
    if (!record.contains("golden_answers") ||
        !record["golden_answers"].is_array() ||
        record["golden_answers"].empty()) {
      throw InputError(std::string(source), line_no,
                       "missing non-empty golden_answers");
    }
    QaItem item;
    item.question = record["question"].get<std::string>();
    if (text::Trim(item.question).empty()) {
      throw InputError(std::string(source), line_no, "empty question");
    }
    for (const auto& gold : record["golden_answers"]) {
      if (!gold.is_string()) {
        throw InputError(std::string(source), line_no,
                         "golden_answers must be strings");
      }
      item.golden_answers.push_back(gold.get<std::string>());
    }
    dataset.items.push_back(std::move(item));
  }
  if (dataset.items.empty()) {
    throw InputError(std::string(source), 0, "empty dataset");
  }
  return dataset;
}

QaDataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open dataset");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDatasetJsonl(buffer.str(), path.string(), path.stem().string());
}

std::string DatasetToJsonl(const QaDataset& dataset) {
  std::string out;
  for (const auto& item : dataset.items) {
    out += nlohmann::json{{"question", item.question},
                          {"golden_answers", item.golden_answers}}
               .dump();
    out += '\n';
  }
  return out;
}

EvalRun Evaluate(const QaDataset& dataset, const Planner& planner,
                 const Executors& executors, const EvalOptions& options) {
  const size_t n = dataset.items.size();
  struct Slot {
    std::optional<RolloutMetrics> metrics;
    double f1 = 0.0;
    bool measured = false;
    std::string trace;
    std::string error;
  };
  std::vector<Slot> slots(n);
  std::atomic<size_t> next{0};
  const auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      const auto& item = dataset.items[i];
      try {
        auto result = Rollout(item.question, item.golden_answers, planner,
                              executors, options.orchestrator, options.seed + i);
        slots[i].metrics = result.metrics;
        slots[i].f1 = *result.f1;
        slots[i].trace = result.context.ToTraceJson();
        slots[i].measured = result.metrics.measured_usd > 0.0 ||
                            result.metrics.nominal_usd == 0.0;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  const size_t workers = std::max<size_t>(1, std::min(options.workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  EvalRun run;
  run.metrics.dataset = dataset.name;
  bool all_measured = true;
  size_t ok = 0;
  for (size_t i = 0; i < n; ++i) {
    const auto& slot = slots[i];
    run.traces.push_back(slot.trace);
    if (!slot.metrics) {
      run.failures.push_back({i, slot.error});
      run.per_item.push_back({});
      continue;
    }
    ++ok;
    run.per_item.push_back(*slot.metrics);
    all_measured = all_measured && slot.measured;
    run.metrics.f1 += slot.f1;
    run.metrics.measured_usd += slot.metrics->measured_usd;
    run.metrics.nominal_usd += slot.metrics->nominal_usd;
    run.metrics.retrieval_calls += slot.metrics->retrieval_calls;
    run.metrics.turns += slot.metrics->turn_number;
    run.metrics.r_cp += slot.metrics->r_cp;
  }
  run.metrics.items = ok;
  run.metrics.failures = run.failures.size();
  if (ok > 0) {
    const double inv = 1.0 / static_cast<double>(ok);
    run.metrics.f1 *= 100.0 * inv;
    run.metrics.measured_usd *= inv;
    run.metrics.nominal_usd *= inv;
    run.metrics.retrieval_calls *= inv;
    run.metrics.turns *= inv;
    run.metrics.r_cp *= inv;
  }
  run.metrics.token_cost =
      all_measured ? run.metrics.measured_usd : run.metrics.nominal_usd;
  return run;
}

namespace {

std::string Format(const char* fmt, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, value);
  return buffer;
}

}  // namespace

std::string RenderMarkdown(const MetricsReport& report) {
  const std::vector<std::string> header = {"dataset", "F1", "token_cost",
                                           "retrieval_calls", "turns"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({r.dataset, Format("%.2f", r.f1), Format("%.3e", r.token_cost),
                    Format("%.2f", r.retrieval_calls), Format("%.2f", r.turns)});
  }
  std::vector<size_t> width(header.size());
  for (size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (size_t c = 0; c < cells.size(); ++c) {
      out += ' ';
      if (c == 0) {
        out += cells[c] + std::string(width[c] - cells[c].size(), ' ');
      } else {
        out += std::string(width[c] - cells[c].size(), ' ') + cells[c];
      }
      out += " |";
    }
    return out + "\n";
  };
  std::string out = line(header);
  out += "|";
  for (size_t c = 0; c < header.size(); ++c) {
    out += c == 0 ? ":" + std::string(width[c] + 1, '-')
                  : std::string(width[c] + 1, '-') + ":";
    out += "|";
  }
  out += "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string RenderCsv(const MetricsReport& report) {
  std::string out = "dataset,F1,token_cost,retrieval_calls,turns\n";
  for (const auto& r : report.rows) {
    std::string name = r.dataset;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (const char c : name) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      name = quoted + "\"";
    }
    out += name + "," + Format("%.17g", r.f1) + "," +
           Format("%.17g", r.token_cost) + "," +
           Format("%.17g", r.retrieval_calls) + "," + Format("%.17g", r.turns) +
           "\n";
  }
  return out;
}

namespace {

std::vector<std::string> SplitCsvRow(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double ParseNumber(const std::string& field, size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw InputError("csv", line, "not a number: " + field);
  }
  return v;
}

}  // namespace

MetricsReport ParseCsv(std::string_view csv) {
  MetricsReport report;
  const auto lines = text::SplitLines(csv);
  if (lines.empty() ||
      text::Trim(lines[0]) != "dataset,F1,token_cost,retrieval_calls,turns") {
    throw InputError("csv", 1, "unexpected header");
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitCsvRow(lines[i]);
    if (fields.size() != 5) throw InputError("csv", i + 1, "expected 5 fields");
    DatasetMetrics row;
    row.dataset = fields[0];
    row.f1 = ParseNumber(fields[1], i + 1);
    row.token_cost = ParseNumber(fields[2], i + 1);
    row.retrieval_calls = ParseNumber(fields[3], i + 1);
    row.turns = ParseNumber(fields[4], i + 1);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace adaptrag
