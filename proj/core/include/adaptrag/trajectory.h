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

#ifndef ADAPTRAG_TRAJECTORY_H_
#define ADAPTRAG_TRAJECTORY_H_

#include <string>
#include <vector>

#include "adaptrag/workflow.h"

namespace adaptrag {

// One planner invocation as stored in the replay buffer.
struct TrajectoryStep {
  std::vector<double> features;
  PlanningPhase phase = PlanningPhase::kRoot;
  // Index into EnumerateValid(phase); -1 when the plan did not come from the
  // compact policy.
  int action = -1;
  double log_prob_behavior = 0.0;
  double value_estimate = 0.0;
  int r_fp = 0;
  double r_cp = 0.0;
  double total_reward = 0.0;
  bool reward_assigned = false;
  int turn_index = 0;
  std::string plan_text;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_TRAJECTORY_H_
