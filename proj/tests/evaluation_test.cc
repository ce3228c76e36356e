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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "adaptrag/errors.h"
#include "adaptrag/reward.h"
#include "adaptrag/synthworld.h"
#include "adaptrag/text.h"
#include "test_support.h"

namespace adaptrag {
namespace {

TEST(DatasetTest, ParsesOneItemPerLine) {
  const std::string text =
      "{\"question\": \"Who?\", \"golden_answers\": [\"A\", \"B\"]}\n"
      "\n"
      "{\"question\": \"Where?\", \"golden_answers\": [\"C\"], \"id\": 7}\n";
  const auto dataset = ParseDatasetJsonl(text, "mem", "toy");
  ASSERT_EQ(dataset.items.size(), 2u);
  EXPECT_EQ(dataset.name, "toy");
  EXPECT_EQ(dataset.items[0].golden_answers, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(dataset.items[1].question, "Where?");
}

TEST(DatasetTest, ReportsTheOffendingLine) {
  const std::string text =
      "{\"question\": \"Who?\", \"golden_answers\": [\"A\"]}\n"
      "{\"question\": \"Where?\"}\n";
  try {
    ParseDatasetJsonl(text, "mem", "toy");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ParseDatasetJsonl("{not json\n", "mem", "x"), InputError);
  EXPECT_THROW(
      ParseDatasetJsonl("{\"question\": \"Q\", \"golden_answers\": []}\n", "m", "x"),
      InputError);
  EXPECT_THROW(
      ParseDatasetJsonl("{\"question\": \"Q\", \"golden_answers\": [3]}\n", "m", "x"),
      InputError);
}

TEST(DatasetTest, EmptyInputIsAnError) {
  try {
    ParseDatasetJsonl("\n\n", "mem", "x");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty dataset"), std::string::npos);
  }
}

TEST(DatasetTest, JsonlRoundTripAndFileLoad) {
  QaDataset dataset;
  dataset.name = "round";
  dataset.items = {{"Q \"one\"", {"a", "b"}}, {"Q two", {"c"}}};
  const auto text = DatasetToJsonl(dataset);
  EXPECT_EQ(ParseDatasetJsonl(text, "mem", "round").items, dataset.items);

  const auto path = std::filesystem::temp_directory_path() / "adaptrag_round.jsonl";
  std::ofstream(path) << text;
  const auto loaded = LoadDataset(path);
  EXPECT_EQ(loaded.name, "adaptrag_round");
  EXPECT_EQ(loaded.items, dataset.items);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadDataset(path), InputError);
}

class WorldEvalTest : public ::testing::Test {
 protected:
  WorldEvalTest()
      : world_(GenerateWorld(WorldOptions{})),
        index_(CorpusIndex::Build(world_.corpus)),
        backend_(world_),
        executors_(backend_, &index_),
        dataset_(ParseDatasetJsonl(WorldDatasetJsonl(world_), "world", "synth")) {}

  SynthWorld world_;
  CorpusIndex index_;
  ScriptedBackend backend_;
  Executors executors_;
  QaDataset dataset_;
};

TEST_F(WorldEvalTest, DesignatedPlannerScoresFullMarks) {
  const ScriptedPlanner planner(
      [&](const Observation& obs) { return testing::DesignatedPlan(world_, obs); });
  const auto run = Evaluate(dataset_, planner, executors_, EvalOptions{});
  EXPECT_EQ(run.metrics.items, world_.questions.size());
  EXPECT_EQ(run.metrics.failures, 0u);
  EXPECT_DOUBLE_EQ(run.metrics.f1, 100.0);
  EXPECT_GT(run.metrics.turns, 1.0);
  // The scripted backend reports prices, so measured cost is the headline.
  EXPECT_DOUBLE_EQ(run.metrics.token_cost, run.metrics.measured_usd);
  EXPECT_EQ(run.traces.size(), dataset_.items.size());
}

TEST_F(WorldEvalTest, LinearPlansTakeOneTurn) {
  const ScriptedPlanner planner([](const Observation&) { return "RA, AG"; });
  const auto run = Evaluate(dataset_, planner, executors_, EvalOptions{});
  EXPECT_DOUBLE_EQ(run.metrics.turns, 1.0);
  EXPECT_DOUBLE_EQ(run.metrics.retrieval_calls, 1.0);
}

TEST_F(WorldEvalTest, WorkerCountDoesNotChangeMetrics) {
  PolicyParams params = PolicyParams::Zeros();
  const CompactPlanner planner(params, SelectMode::kSample);
  EvalOptions serial;
  serial.seed = 13;
  EvalOptions threaded = serial;
  threaded.workers = 4;
  const auto a = Evaluate(dataset_, planner, executors_, serial);
  const auto b = Evaluate(dataset_, planner, executors_, threaded);
  EXPECT_EQ(a.metrics, b.metrics);
  EXPECT_EQ(a.traces, b.traces);
}

TEST(ReplayEvalTest, AveragesOverTheRecordedCases) {
  testing::TableBackend backend;
  testing::AddReplayReplies(backend);
  const auto index = CorpusIndex::Build(testing::ReplayCorpus());
  const Executors executors(backend, &index, 3);
  const ScriptedPlanner planner(testing::ReplayPlan);
  QaDataset dataset;
  dataset.name = "replay";
  double f1_sum = 0.0;
  for (const auto& c : testing::ReplayCases()) {
    dataset.items.push_back({c.question, {c.gold}});
    const std::vector<std::string> golds = {c.gold};
    f1_sum += F1Score(c.answer, golds);
  }
  const auto run = Evaluate(dataset, planner, executors, EvalOptions{});
  EXPECT_DOUBLE_EQ(run.metrics.retrieval_calls, 0.75);
  EXPECT_DOUBLE_EQ(run.metrics.turns, 2.25);
  EXPECT_NEAR(run.metrics.f1, 100.0 * f1_sum / 4.0, 1e-9);
  // The table backend has no prices: cost falls back to the nominal table.
  EXPECT_DOUBLE_EQ(run.metrics.token_cost, run.metrics.nominal_usd);
}

TEST(ReplayEvalTest, FailedItemsAreCountedNotFatal) {
  testing::TableBackend backend;
  testing::AddReplayReplies(backend);
  const auto index = CorpusIndex::Build(testing::ReplayCorpus());
  const Executors executors(backend, &index, 3);
  const ScriptedPlanner planner(testing::ReplayPlan);
  QaDataset dataset;
  dataset.name = "mixed";
  dataset.items = {{testing::ReplayCases()[0].question, {"x"}},
                   {"A question nobody scripted?", {"y"}}};
  const auto run = Evaluate(dataset, planner, executors, EvalOptions{});
  EXPECT_EQ(run.metrics.items, 1u);
  EXPECT_EQ(run.metrics.failures, 1u);
  ASSERT_EQ(run.failures.size(), 1u);
  EXPECT_EQ(run.failures[0].item, 1u);
  EXPECT_TRUE(run.traces[1].empty());
}

TEST(ReportTest, CsvHeaderOnlyForEmptyReport) {
  EXPECT_EQ(RenderCsv({}), "dataset,F1,token_cost,retrieval_calls,turns\n");
  EXPECT_TRUE(ParseCsv(RenderCsv({})).rows.empty());
}

TEST(ReportTest, CsvRowHasFiveColumnsAndRoundTrips) {
  MetricsReport report;
  DatasetMetrics row;
  row.dataset = "hotpot, \"dev\"";
  row.f1 = 100.0 / 3.0;
  row.token_cost = 1.2345678901234567e-4;
  row.retrieval_calls = 0.75;
  row.turns = 2.25;
  report.rows.push_back(row);
  DatasetMetrics plain;
  plain.dataset = "synth";
  plain.f1 = 90.0;
  report.rows.push_back(plain);

  const std::string csv = RenderCsv(report);
  const auto lines = text::SplitLines(csv);
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(std::count(lines[2].begin(), lines[2].end(), ','), 4);

  const auto parsed = ParseCsv(csv);
  ASSERT_EQ(parsed.rows.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(parsed.rows[i].dataset, report.rows[i].dataset);
    EXPECT_EQ(parsed.rows[i].f1, report.rows[i].f1);
    EXPECT_EQ(parsed.rows[i].token_cost, report.rows[i].token_cost);
    EXPECT_EQ(parsed.rows[i].retrieval_calls, report.rows[i].retrieval_calls);
    EXPECT_EQ(parsed.rows[i].turns, report.rows[i].turns);
  }
  EXPECT_EQ(RenderCsv(parsed), csv);
}

TEST(ReportTest, CsvRejectsMalformedInput) {
  EXPECT_THROW(ParseCsv("name,score\n"), InputError);
  EXPECT_THROW(ParseCsv("dataset,F1,token_cost,retrieval_calls,turns\na,1,2\n"),
               InputError);
  EXPECT_THROW(ParseCsv("dataset,F1,token_cost,retrieval_calls,turns\na,x,2,3,4\n"),
               InputError);
}

TEST(ReportTest, MarkdownTableLayout) {
  MetricsReport report;
  DatasetMetrics row;
  row.dataset = "synth";
  row.f1 = 97.5;
  row.token_cost = 7.4e-4;
  row.retrieval_calls = 1.5;
  row.turns = 2.0;
  report.rows.push_back(row);
  const auto lines = text::SplitLines(RenderMarkdown(report));
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0].front(), '|');
  EXPECT_NE(lines[0].find("retrieval_calls"), std::string::npos);
  EXPECT_NE(lines[1].find(":-"), std::string::npos);
  EXPECT_NE(lines[2].find("97.50"), std::string::npos);
  EXPECT_NE(lines[2].find("7.400e-04"), std::string::npos);
  EXPECT_EQ(lines[0].size(), lines[2].size());
}

}  // namespace
}  // namespace adaptrag
