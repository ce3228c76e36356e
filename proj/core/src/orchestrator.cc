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

#include <algorithm>
#include <chrono>
#include <future>
#include <random>

namespace adaptrag {

namespace {

struct PlannedStep {
  WorkflowPlan plan;
  int r_fp = 0;
  bool forced = false;
  PlanProposal proposal;
};

PlannedStep ResolveProposal(PlanProposal proposal, PlanningPhase phase,
                            const OrchestratorConfig& config,
                            const RolloutContext& ctx) {
  PlannedStep out;
  const ParseResult parsed = ParseWorkflow(proposal.text);
  out.r_fp = FormatPenalty(parsed, phase);
  if (out.r_fp == 0) {
    out.plan = std::get<WorkflowPlan>(parsed);
  } else if (config.fallback_on_invalid) {
    out.plan = FallbackPlan(phase);
  } else {
    throw RolloutError("planner produced an unusable plan: " + proposal.text,
                       ctx.ToTraceJson());
  }
  out.proposal = std::move(proposal);
  return out;
}

TrajectoryStep MakeStep(const PlannedStep& planned, PlanningPhase phase,
                        size_t n_sub_questions, int turn,
                        const OrchestratorConfig& config) {
  TrajectoryStep step;
  step.phase = phase;
  step.turn_index = turn;
  step.r_fp = planned.r_fp;
  step.plan_text = planned.proposal.text;
  step.r_cp = PlanCost(planned.plan, n_sub_questions, config.costs,
                       config.turn_cost_mode)
                  .r_cp;
  if (planned.proposal.policy) {
    const auto& info = *planned.proposal.policy;
    step.features = info.features;
    step.action = static_cast<int>(info.action);
    step.log_prob_behavior = info.log_prob;
    step.value_estimate = info.value;
  }
  return step;
}

}  // namespace

WorkflowPlan FallbackPlan(PlanningPhase phase) {
  if (phase == PlanningPhase::kSummarizeReady) return {{ExecutorId::kAS}};
  return {{ExecutorId::kRA, ExecutorId::kAG}};
}

PlanRun RunPlan(const WorkflowPlan& plan, const std::string& initial_query,
                const RolloutContext& ctx, const Executors& executors) {
  PlanRun run;
  std::string query = initial_query;
  const auto add = [&](const TokenUsage& usage, double usd) {
    run.usage += usage;
    run.measured_usd += usd;
  };
  try {
    for (const ExecutorId id : plan.steps) {
      switch (id) {
        case ExecutorId::kQDS:
        case ExecutorId::kQDP: {
          auto out = id == ExecutorId::kQDS ? executors.DecomposeSerial(query)
                                            : executors.DecomposeParallel(query);
          add(out.usage, out.measured_usd);
          run.decomposition =
              id == ExecutorId::kQDS ? SlotMode::kSerial : SlotMode::kParallel;
          run.sub_questions = std::move(out.payload);
          break;
        }
        case ExecutorId::kQR: {
          auto out = executors.Rewrite(query);
          add(out.usage, out.measured_usd);
          query = std::move(out.payload);
          break;
        }
        case ExecutorId::kRA:
          run.documents = executors.Retrieve(query);
          ++run.retrieval_calls;
          break;
        case ExecutorId::kDS: {
          if (run.documents.empty()) break;
          auto out = executors.SelectDocuments(query, run.documents);
          add(out.usage, out.measured_usd);
          run.documents = std::move(out.payload);
          break;
        }
        case ExecutorId::kAG: {
          auto out = executors.GenerateAnswer(query, run.documents);
          add(out.usage, out.measured_usd);
          run.answer = std::move(out.payload);
          break;
        }
        case ExecutorId::kAS: {
          auto out = executors.Summarize(ctx.initial_question(), ctx.slots());
          add(out.usage, out.measured_usd);
          run.answer = std::move(out.payload);
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    throw PlanExecutionError(std::string(ExecutorName(plan.steps.empty()
                                                          ? ExecutorId::kAG
                                                          : plan.steps.front())) +
                                 " plan failed: " + e.what(),
                             run.usage, run.retrieval_calls);
  }
  return run;
}

void ApplyRun(RolloutContext& ctx, std::optional<size_t> slot, PlanRun run) {
  if (run.decomposition) {
    ctx.Decompose(*run.decomposition, std::move(run.sub_questions));
  }
  if (slot) {
    ctx.SetSlotDocuments(*slot, std::move(run.documents));
    if (run.answer) ctx.CommitSlotAnswer(*slot, std::move(*run.answer));
  } else {
    if (!run.documents.empty()) ctx.SetRootDocuments(std::move(run.documents));
    if (run.answer) ctx.SetPredictedAnswer(std::move(*run.answer));
  }
}

ExecutionOutcome ExecuteWorkflow(const WorkflowPlan& plan, RolloutContext& ctx,
                                 std::optional<size_t> slot,
                                 const Executors& executors) {
  const std::string query =
      slot ? ctx.WorkingQuery(*slot) : ctx.initial_question();
  PlanRun run = RunPlan(plan, query, ctx, executors);
  ExecutionOutcome outcome{run.usage, run.measured_usd, run.retrieval_calls};
  ApplyRun(ctx, slot, std::move(run));
  return outcome;
}

RolloutResult Rollout(const std::string& question,
                      std::span<const std::string> golds,
                      const Planner& planner, const Executors& executors,
                      const OrchestratorConfig& config, uint64_t seed) {
  if (config.max_turn < 1) throw PreconditionError("max_turn must be >= 1");
  const auto started = std::chrono::steady_clock::now();
  RolloutContext ctx(question);
  std::mt19937_64 rng(seed);
  std::vector<TrajectoryStep> trajectory;
  std::vector<WorkflowPlan> executed;
  RolloutMetrics metrics;
  double turn_cost_sum = 0.0;

  const auto record = [&](const WorkflowPlan& plan, std::optional<size_t> slot,
                          int turn, const PlanRun& run, int r_fp, bool forced,
                          const TokenUsage& planner_usage, size_t n_sub) {
    TurnRecord rec;
    rec.turn_index = turn;
    rec.target_question =
        slot ? ctx.slots()[*slot].text : ctx.initial_question();
    rec.plan = plan;
    rec.usage = run.usage + planner_usage;
    rec.retrieval_calls = run.retrieval_calls;
    rec.format_penalty = r_fp != 0;
    rec.forced = forced;
    ctx.AppendTurn(std::move(rec));
    metrics.usage += run.usage + planner_usage;
    metrics.measured_usd += run.measured_usd;
    metrics.nominal_usd += PlanNominalUsd(plan, config.costs);
    turn_cost_sum += TurnCost(plan, n_sub, config.turn_cost_mode);
    executed.push_back(plan);
  };
  const auto fail = [&](const std::exception& e) -> RolloutError {
    return RolloutError(std::string("rollout failed: ") + e.what(),
                        ctx.ToTraceJson());
  };

  try {
    for (int turn = 0; !ctx.predicted_answer(); ++turn) {
      const bool last = turn == config.max_turn - 1;
      const PlanningPhase phase = ctx.CurrentPhase();

      if (phase == PlanningPhase::kSubQuestion && last) {
        // No room to finish the sub-questions: answer the question directly.
        const WorkflowPlan plan = FallbackPlan(PlanningPhase::kRoot);
        PlanRun run = RunPlan(plan, ctx.initial_question(), ctx, executors);
        record(plan, std::nullopt, turn, run, 0, true, {}, 0);
        ApplyRun(ctx, std::nullopt, std::move(run));
        break;
      }

      if (phase != PlanningPhase::kSubQuestion) {
        const Observation obs = RenderObservation(ctx, ctx.initial_question());
        PlannedStep planned =
            ResolveProposal(planner.Propose(obs, rng), phase, config, ctx);
        const bool decomposes = planned.plan.Contains(ExecutorId::kQDS) ||
                                planned.plan.Contains(ExecutorId::kQDP);
        if (last && decomposes) {
          planned.plan = FallbackPlan(PlanningPhase::kRoot);
          planned.forced = true;
        }
        PlanRun run = RunPlan(planned.plan, ctx.initial_question(), ctx, executors);
        const size_t n_sub = run.decomposition
                                 ? std::min(run.sub_questions.size(),
                                            kMaxSubQuestions)
                                 : 0;
        trajectory.push_back(MakeStep(planned, phase, n_sub, turn, config));
        record(planned.plan, std::nullopt, turn, run, planned.r_fp,
               planned.forced, planned.proposal.usage, n_sub);
        ApplyRun(ctx, std::nullopt, std::move(run));
        if (!ctx.predicted_answer() && ctx.slots().empty()) {
          throw PreconditionError("plan produced neither an answer nor slots");
        }
        continue;
      }

      // Sub-question phase: one serial slot, or every open parallel slot.
      std::vector<size_t> targets = ctx.UnansweredSlots();
      if (*ctx.decomposition() == SlotMode::kSerial) targets.resize(1);
      std::vector<PlannedStep> plans;
      for (const size_t slot : targets) {
        const Observation obs = RenderObservation(ctx, ctx.slots()[slot].text);
        plans.push_back(ResolveProposal(planner.Propose(obs, rng),
                                        PlanningPhase::kSubQuestion, config, ctx));
      }
      std::vector<PlanRun> runs(targets.size());
      if (targets.size() == 1) {
        runs[0] = RunPlan(plans[0].plan, ctx.WorkingQuery(targets[0]), ctx,
                          executors);
      } else {
        std::vector<std::future<PlanRun>> pending;
        for (size_t i = 0; i < targets.size(); ++i) {
          pending.push_back(std::async(
              std::launch::async,
              [&, i] {
                return RunPlan(plans[i].plan, ctx.WorkingQuery(targets[i]), ctx,
                               executors);
              }));
        }
        std::exception_ptr first_error;
        for (size_t i = 0; i < pending.size(); ++i) {
          try {
            runs[i] = pending[i].get();
          } catch (...) {
            if (!first_error) first_error = std::current_exception();
          }
        }
        if (first_error) std::rethrow_exception(first_error);
      }
      for (size_t i = 0; i < targets.size(); ++i) {
        trajectory.push_back(
            MakeStep(plans[i], PlanningPhase::kSubQuestion, 0, turn, config));
        record(plans[i].plan, targets[i], turn, runs[i], plans[i].r_fp, false,
               plans[i].proposal.usage, 0);
        ApplyRun(ctx, targets[i], std::move(runs[i]));
      }
    }
  } catch (const RolloutError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e);
  }

  metrics.retrieval_calls = ctx.RetrievalCalls();
  metrics.turn_number = ctx.TurnCount();
  metrics.token_cost = TokenCostScaled(executed, config.costs);
  metrics.r_cp = CostPenalty(metrics.token_cost, std::min(1.0, turn_cost_sum),
                             metrics.retrieval_calls > 0 ? 1 : 0);
  metrics.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();

  RolloutResult result{std::move(ctx), std::move(trajectory), "", std::nullopt,
                       metrics};
  result.predicted_answer = *result.context.predicted_answer();
  if (!golds.empty()) result.f1 = F1Score(result.predicted_answer, golds);
  return result;
}

}  // namespace adaptrag
