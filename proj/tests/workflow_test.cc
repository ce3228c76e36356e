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

#include "adaptrag/workflow.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.h"

namespace adaptrag {
namespace {

using E = ExecutorId;

constexpr PlanningPhase kPhases[] = {PlanningPhase::kRoot,
                                     PlanningPhase::kSubQuestion,
                                     PlanningPhase::kSummarizeReady};

WorkflowPlan Plan(std::initializer_list<E> steps) { return WorkflowPlan{steps}; }

using testing::OracleValid;

TEST(ParseWorkflowTest, ParsesCommaSeparatedIds) {
  const auto parsed = ParseWorkflow("RA, AG");
  ASSERT_TRUE(std::holds_alternative<WorkflowPlan>(parsed));
  EXPECT_EQ(std::get<WorkflowPlan>(parsed), Plan({E::kRA, E::kAG}));
  EXPECT_EQ(std::get<WorkflowPlan>(ParseWorkflow(" qr ,Ra,ag ")),
            Plan({E::kQR, E::kRA, E::kAG}));
}

TEST(ParseWorkflowTest, EmptyInputIsError) {
  EXPECT_TRUE(std::holds_alternative<ParseError>(ParseWorkflow("")));
  EXPECT_TRUE(std::holds_alternative<ParseError>(ParseWorkflow("   ")));
}

TEST(ParseWorkflowTest, UnknownTokenReportsPosition) {
  const auto parsed = ParseWorkflow("RA, FOO");
  ASSERT_TRUE(std::holds_alternative<ParseError>(parsed));
  EXPECT_EQ(std::get<ParseError>(parsed).position, 2u);
  EXPECT_EQ(std::get<ParseError>(parsed).token, "FOO");
  EXPECT_EQ(std::get<ParseError>(ParseWorkflow("RA,,AG")).position, 2u);
}

TEST(ValidateTest, ExamplePlans) {
  EXPECT_TRUE(Validate(Plan({E::kQDS}), PlanningPhase::kRoot).ok());
  const auto mixed = Validate(Plan({E::kQDS, E::kAG}), PlanningPhase::kRoot);
  EXPECT_TRUE(mixed.Has(ValidityRule::kSingletonOnly));
  const auto early = Validate(Plan({E::kAS}), PlanningPhase::kSubQuestion);
  EXPECT_TRUE(early.Has(ValidityRule::kSummarizeOnlyWhenReady));
  EXPECT_TRUE(Validate(Plan({E::kQDP}), PlanningPhase::kSubQuestion)
                  .Has(ValidityRule::kDecomposeOnlyAtRoot));
  EXPECT_TRUE(Validate(Plan({E::kRA, E::kRA, E::kAG}), PlanningPhase::kRoot)
                  .Has(ValidityRule::kSingleRetrieval));
  EXPECT_TRUE(Validate(Plan({E::kDS, E::kAG}), PlanningPhase::kRoot)
                  .Has(ValidityRule::kSelectAfterRetrieve));
  EXPECT_TRUE(Validate(Plan({E::kQR, E::kAG}), PlanningPhase::kRoot)
                  .Has(ValidityRule::kRewriteBeforeRetrieve));
  EXPECT_TRUE(Validate(Plan({E::kRA}), PlanningPhase::kRoot)
                  .Has(ValidityRule::kEndsWithAnswer));
  EXPECT_TRUE(Validate(Plan({E::kAG}), PlanningPhase::kSummarizeReady)
                  .Has(ValidityRule::kSummarizeOnlyWhenReady));
  EXPECT_FALSE(Validate(Plan({}), PlanningPhase::kRoot).ok());
}

TEST(EnumerateValidTest, ActionSetsPerPhase) {
  const std::vector<WorkflowPlan> root = {
      Plan({E::kAG}),
      Plan({E::kRA, E::kAG}),
      Plan({E::kQR, E::kRA, E::kAG}),
      Plan({E::kRA, E::kDS, E::kAG}),
      Plan({E::kQR, E::kRA, E::kDS, E::kAG}),
      Plan({E::kQDS}),
      Plan({E::kQDP})};
  EXPECT_EQ(EnumerateValid(PlanningPhase::kRoot), root);
  const std::vector<WorkflowPlan> sub(root.begin(), root.begin() + 5);
  EXPECT_EQ(EnumerateValid(PlanningPhase::kSubQuestion), sub);
  EXPECT_EQ(EnumerateValid(PlanningPhase::kSummarizeReady),
            std::vector<WorkflowPlan>{Plan({E::kAS})});
  EXPECT_EQ(MaxActionCount(), 7u);
}

TEST(EnumerateValidTest, MatchesExhaustiveSearchUpToLengthFive) {
  for (const PlanningPhase phase : kPhases) {
    std::vector<WorkflowPlan> found;
    std::vector<E> seq;
    size_t validated = 0;
    const auto visit = [&](auto&& self, size_t depth) -> void {
      if (!seq.empty()) {
        const bool oracle = OracleValid(seq, phase);
        EXPECT_EQ(Validate(WorkflowPlan{seq}, phase).ok(), oracle)
            << RenderWorkflow(WorkflowPlan{seq}) << " in " << PhaseName(phase);
        if (oracle) found.push_back(WorkflowPlan{seq});
        ++validated;
      }
      if (depth == 5) return;
      for (const E id : kAllExecutors) {
        seq.push_back(id);
        self(self, depth + 1);
        seq.pop_back();
      }
    };
    visit(visit, 0);
    EXPECT_EQ(validated, 7u + 49u + 343u + 2401u + 16807u);
    const auto& listed = EnumerateValid(phase);
    EXPECT_EQ(found.size(), listed.size());
    for (const auto& plan : found) {
      EXPECT_NE(std::find(listed.begin(), listed.end(), plan), listed.end());
    }
  }
}

TEST(EnumerateValidTest, RenderParseRoundTripAndIndex) {
  for (const PlanningPhase phase : kPhases) {
    const auto& plans = EnumerateValid(phase);
    for (size_t i = 0; i < plans.size(); ++i) {
      const auto parsed = ParseWorkflow(RenderWorkflow(plans[i]));
      ASSERT_TRUE(std::holds_alternative<WorkflowPlan>(parsed));
      EXPECT_EQ(std::get<WorkflowPlan>(parsed), plans[i]);
      EXPECT_EQ(ActionIndexOf(plans[i], phase), i);
    }
  }
  EXPECT_EQ(RenderWorkflow(Plan({E::kRA, E::kAG})), "RA, AG");
  EXPECT_FALSE(ActionIndexOf(Plan({E::kQDS}), PlanningPhase::kSubQuestion));
}

TEST(ParseWorkflowTest, FuzzNeverCrashes) {
  std::mt19937_64 rng(42);
  const std::string alphabet = "QDSPRAG, \t\n\rqdsprag.;-x0\xC3\xA9";
  const std::vector<std::string> pieces = {"QDS", "QDP", "QR", "DS", "RA",
                                           "AG",  "AS",  ",",  " ", ""};
  size_t plans = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string input;
    const size_t len = rng() % 24;
    for (size_t j = 0; j < len; ++j) {
      if (rng() % 2 == 0) {
        input += alphabet[rng() % alphabet.size()];
      } else {
        input += pieces[rng() % pieces.size()];
      }
    }
    const auto parsed = ParseWorkflow(input);
    if (const auto* plan = std::get_if<WorkflowPlan>(&parsed)) {
      ++plans;
      EXPECT_FALSE(plan->steps.empty());
      for (const PlanningPhase phase : kPhases) {
        EXPECT_EQ(Validate(*plan, phase).ok(), OracleValid(plan->steps, phase));
      }
    } else {
      EXPECT_FALSE(std::get<ParseError>(parsed).message.empty());
    }
  }
  EXPECT_GT(plans, 0u);
}

TEST(ExecutorNameTest, RoundTrip) {
  for (const E id : kAllExecutors) {
    EXPECT_EQ(ExecutorFromName(ExecutorName(id)), id);
  }
  EXPECT_FALSE(ExecutorFromName("XX"));
}

}  // namespace
}  // namespace adaptrag
