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


#include "adaptrag/orchestrator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "adaptrag/synthworld.h"
#include "json.hpp"
#include "test_support.h"

namespace adaptrag {
namespace {

using testing::ReplayCases;

std::vector<std::string> PlanLog(const RolloutContext& ctx) {
  std::vector<std::string> out;
  for (const auto& turn : ctx.turn_log()) out.push_back(RenderWorkflow(turn.plan));
  return out;
}

class ReplayRolloutTest : public ::testing::Test {
 protected:
  ReplayRolloutTest()
      : index_(CorpusIndex::Build(testing::ReplayCorpus())),
        executors_(backend_, &index_, 3),
        planner_(testing::ReplayPlan) {
    testing::AddReplayReplies(backend_);
  }

  RolloutResult Run(size_t case_index) const {
    const auto& c = ReplayCases()[case_index];
    const std::vector<std::string> golds = {c.gold};
    return Rollout(c.question, golds, planner_, executors_, config_, 1);
  }

  testing::TableBackend backend_;
  CorpusIndex index_;
  Executors executors_;
  ScriptedPlanner planner_;
  OrchestratorConfig config_;
};

TEST_F(ReplayRolloutTest, ReproducesRecordedOutcomes) {
  for (size_t i = 0; i < ReplayCases().size(); ++i) {
    const auto& expected = ReplayCases()[i];
    const auto result = Run(i);
    EXPECT_EQ(result.metrics.turn_number, expected.turns) << expected.question;
    EXPECT_EQ(result.metrics.retrieval_calls, expected.retrieval_calls)
        << expected.question;
    EXPECT_EQ(result.predicted_answer, expected.answer) << expected.question;
    for (const auto& step : result.trajectory) EXPECT_EQ(step.r_fp, 0);
  }
}

TEST_F(ReplayRolloutTest, SerialCaseRunsOneSlotPerTurn) {
  const auto result = Run(3);
  EXPECT_EQ(PlanLog(result.context),
            (std::vector<std::string>{"QDS", "RA, AG", "AG", "AS"}));
  ASSERT_EQ(result.context.slots().size(), 2u);
  EXPECT_EQ(result.context.slots()[0].answer, "Columbia University");
  EXPECT_EQ(result.context.slots()[1].answer, "New York City");
  EXPECT_EQ(result.predicted_answer, "New York City");
  EXPECT_DOUBLE_EQ(*result.f1, 1.0);
  EXPECT_EQ(result.trajectory.size(), 4u);
}

TEST_F(ReplayRolloutTest, ParallelSlotsShareOneTurn) {
  const auto result = Run(2);
  std::vector<int> indices;
  for (const auto& turn : result.context.turn_log()) indices.push_back(turn.turn_index);
  EXPECT_EQ(indices, (std::vector<int>{0, 1, 1, 1, 1, 2}));
  EXPECT_EQ(result.context.slots().size(), 4u);
  for (const auto& slot : result.context.slots()) EXPECT_TRUE(slot.answer);
  // Only the last sub-question retrieved.
  EXPECT_TRUE(result.context.slots()[0].documents.empty());
  EXPECT_FALSE(result.context.slots()[3].documents.empty());
}

TEST_F(ReplayRolloutTest, ExecutorFailureCarriesPartialTrace) {
  testing::TableBackend partial;
  const auto& c = ReplayCases()[3];
  partial.Add(ExecutorId::kQDS, c.question,
              std::string(testing::kCase4Sub[0]) + "\n" +
                  std::string(testing::kCase4Sub[1]));
  partial.Add(ExecutorId::kAG, std::string(testing::kCase4Sub[0]),
              "**Columbia University**");
  Executors executors(partial, &index_, 3);
  try {
    Rollout(c.question, {}, planner_, executors, config_, 1);
    FAIL() << "expected RolloutError";
  } catch (const RolloutError& e) {
    const auto trace = nlohmann::json::parse(e.partial_trace());
    EXPECT_NE(e.partial_trace().find("Columbia University"), std::string::npos);
    EXPECT_NE(e.partial_trace().find(c.question), std::string::npos);
    EXPECT_FALSE(trace.empty());
  }
}

TEST_F(ReplayRolloutTest, NoGoldMeansNoScore) {
  const auto& c = ReplayCases()[0];
  const auto result = Rollout(c.question, {}, planner_, executors_, config_, 1);
  EXPECT_FALSE(result.f1.has_value());
  EXPECT_EQ(result.predicted_answer, c.answer);
}

class WorldRolloutTest : public ::testing::Test {
 protected:
  WorldRolloutTest()
      : world_(GenerateWorld(WorldOptions{})),
        index_(CorpusIndex::Build(world_.corpus)),
        backend_(world_),
        executors_(backend_, &index_) {}

  const SynthQuestion& First(QuestionKind kind) const {
    for (const auto& q : world_.questions) {
      if (q.kind == kind) return q;
    }
    throw std::logic_error("question kind missing");
  }

  RolloutResult Run(const SynthQuestion& q, const ScriptedPlanner::Rule& rule,
                    const OrchestratorConfig& config = {}) const {
    ScriptedPlanner planner(rule);
    return Rollout(q.text, q.gold_answers, planner, executors_, config, 5);
  }

  SynthWorld world_;
  CorpusIndex index_;
  ScriptedBackend backend_;
  Executors executors_;
};

TEST_F(WorldRolloutTest, SelectedDocumentsComeFromRetrievedSet) {
  const auto& q = First(QuestionKind::kSingleHop);
  const auto result = Run(q, [](const Observation&) { return "RA, DS, AG"; });
  const auto retrieved = executors_.Retrieve(q.text);
  const auto& kept = result.context.root_documents();
  ASSERT_FALSE(kept.empty());
  EXPECT_LE(kept.size(), retrieved.size());
  for (const auto& doc : kept) {
    EXPECT_TRUE(std::any_of(retrieved.begin(), retrieved.end(),
                            [&](const Document& r) { return r.id == doc.id; }))
        << doc.id;
  }
  EXPECT_DOUBLE_EQ(*result.f1, 1.0);
  EXPECT_EQ(result.metrics.retrieval_calls, 1);
}

TEST_F(WorldRolloutTest, DirectAnswerUsesNoDocuments) {
  const auto& q = First(QuestionKind::kSingleHop);
  const auto result = Run(q, [](const Observation&) { return "AG"; });
  EXPECT_TRUE(result.context.root_documents().empty());
  EXPECT_EQ(result.metrics.retrieval_calls, 0);
  EXPECT_EQ(result.metrics.turn_number, 1);
  ASSERT_EQ(result.trajectory.size(), 1u);
}

TEST_F(WorldRolloutTest, ParallelDecompositionOpensBoundedSlots) {
  const auto& q = First(QuestionKind::kParallelCompare);
  const auto result = Run(q, [](const Observation& obs) -> std::string {
    if (obs.phase == PlanningPhase::kRoot) return "QDP";
    if (obs.phase == PlanningPhase::kSummarizeReady) return "AS";
    return "RA, AG";
  });
  const size_t n = result.context.slots().size();
  EXPECT_GE(n, 1u);
  EXPECT_LE(n, kMaxSubQuestions);
  EXPECT_EQ(result.context.decomposition(), SlotMode::kParallel);
  EXPECT_DOUBLE_EQ(*result.f1, 1.0);
  EXPECT_EQ(result.metrics.turn_number, 3);
}

TEST_F(WorldRolloutTest, InvalidPlanFallsBackWithPenalty) {
  const auto& q = First(QuestionKind::kSingleHop);
  const auto result = Run(q, [](const Observation&) { return "RA, QR, AG"; });
  ASSERT_EQ(result.trajectory.size(), 1u);
  EXPECT_EQ(result.trajectory[0].r_fp, 1);
  EXPECT_EQ(PlanLog(result.context), std::vector<std::string>{"RA, AG"});
  EXPECT_TRUE(result.context.turn_log()[0].format_penalty);
  EXPECT_EQ(result.metrics.retrieval_calls, 1);

  const auto garbage = Run(q, [](const Observation&) { return "answer it"; });
  EXPECT_EQ(garbage.trajectory[0].r_fp, 1);
  EXPECT_EQ(PlanLog(garbage.context), std::vector<std::string>{"RA, AG"});
}

TEST_F(WorldRolloutTest, InvalidPlanFailsWhenFallbackDisabled) {
  const auto& q = First(QuestionKind::kSingleHop);
  OrchestratorConfig config;
  config.fallback_on_invalid = false;
  EXPECT_THROW(Run(q, [](const Observation&) { return "QR"; }, config),
               RolloutError);
}

TEST_F(WorldRolloutTest, DecompositionOnLastTurnIsForcedToAnswer) {
  const auto& q = First(QuestionKind::kSerial2Hop);
  OrchestratorConfig config;
  config.max_turn = 1;
  const auto result = Run(q, [](const Observation&) { return "QDS"; }, config);
  EXPECT_EQ(PlanLog(result.context), std::vector<std::string>{"RA, AG"});
  EXPECT_TRUE(result.context.turn_log()[0].forced);
  EXPECT_TRUE(result.context.slots().empty());
  EXPECT_EQ(result.metrics.turn_number, 1);
}

TEST_F(WorldRolloutTest, UnfinishedSubQuestionsAreAbandonedOnLastTurn) {
  const auto& q = First(QuestionKind::kSerial2Hop);
  OrchestratorConfig config;
  config.max_turn = 2;
  const auto result = Run(
      q,
      [](const Observation& obs) -> std::string {
        return obs.phase == PlanningPhase::kRoot ? "QDS" : "AG";
      },
      config);
  EXPECT_EQ(PlanLog(result.context), (std::vector<std::string>{"QDS", "RA, AG"}));
  EXPECT_TRUE(result.context.turn_log()[1].forced);
  EXPECT_EQ(result.context.turn_log()[1].target_question, q.text);
  EXPECT_EQ(result.metrics.turn_number, 2);
  // The forced step does not come from the planner, so it is not trained on.
  EXPECT_EQ(result.trajectory.size(), 1u);
  EXPECT_TRUE(result.predicted_answer.size() > 0);
}

TEST_F(WorldRolloutTest, StepCostsFollowTheExecutedPlan) {
  const auto& q = First(QuestionKind::kSingleHop);
  const auto result = Run(q, [](const Observation&) { return "RA, AG"; });
  const auto expected = PlanCost(WorkflowPlan{{ExecutorId::kRA, ExecutorId::kAG}},
                                 0, NominalCostTable::Defaults(),
                                 TurnCostMode::kPerRound);
  EXPECT_DOUBLE_EQ(result.trajectory[0].r_cp, expected.r_cp);
  // One plan: the rollout penalty equals the step penalty.
  EXPECT_NEAR(result.metrics.r_cp, expected.r_cp, 1e-12);
}

TEST_F(WorldRolloutTest, SampledRolloutsAreSeedDeterministic) {
  std::mt19937_64 rng(8);
  PolicyParams params = PolicyParams::Zeros();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& w : params.actor) w = normal(rng);
  CompactPlanner planner(params, SelectMode::kSample);
  for (const auto& q : world_.questions) {
    const auto a = Rollout(q.text, q.gold_answers, planner, executors_, {}, 42);
    const auto b = Rollout(q.text, q.gold_answers, planner, executors_, {}, 42);
    EXPECT_EQ(a.context.ToTraceJson(), b.context.ToTraceJson());
    EXPECT_EQ(a.predicted_answer, b.predicted_answer);
    ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
    for (size_t i = 0; i < a.trajectory.size(); ++i) {
      EXPECT_EQ(a.trajectory[i].action, b.trajectory[i].action);
      EXPECT_DOUBLE_EQ(a.trajectory[i].log_prob_behavior,
                       b.trajectory[i].log_prob_behavior);
    }
  }
}

TEST(OrchestratorConfigTest, RejectsNonPositiveTurnBudget) {
  const SynthWorld world = GenerateWorld(WorldOptions{});
  const CorpusIndex index = CorpusIndex::Build(world.corpus);
  ScriptedBackend backend(world);
  Executors executors(backend, &index);
  ScriptedPlanner planner([](const Observation&) { return "AG"; });
  OrchestratorConfig config;
  config.max_turn = 0;
  EXPECT_THROW(Rollout("Who?", {}, planner, executors, config, 1),
               PreconditionError);
}

TEST(FallbackPlanTest, PhaseDefaults) {
  EXPECT_EQ(RenderWorkflow(FallbackPlan(PlanningPhase::kRoot)), "RA, AG");
  EXPECT_EQ(RenderWorkflow(FallbackPlan(PlanningPhase::kSubQuestion)), "RA, AG");
  EXPECT_EQ(RenderWorkflow(FallbackPlan(PlanningPhase::kSummarizeReady)), "AS");
}

}  // namespace
}  // namespace adaptrag
