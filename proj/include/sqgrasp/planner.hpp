// Copyright 2026 The sqgrasp Authors
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

#ifndef SQGRASP_PLANNER_HPP_
#define SQGRASP_PLANNER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqgrasp/grasping.hpp"

namespace sqgrasp {

enum class Policy { kAtStart, kAtGoal, kAverage, kRandomOrder };

std::string policy_name(Policy policy);
std::optional<Policy> parse_policy(const std::string& name);

struct PrioritizedGrasp {
  GraspCandidate grasp;
  double score_start = 0.0;  // m_g with the object at the start pose
  double score_goal = 0.0;   // m_g with the object at the goal pose
  double score_avg = 0.0;
  Policy policy = Policy::kAtGoal;
  // Collision-free IK solutions found while scoring, reused by the planner
  // as reach/placement goal sets.
  std::vector<JointConfig> ik_start;
  std::vector<JointConfig> ik_goal;
};

/// Scores every candidate (both poses) via situated manipulability.
/// Scores depend only on (candidates, scene, ik_budget, rng_seed), never on
/// the policy, so one scoring pass can serve several orderings. Output
/// order matches the candidate order.
std::vector<PrioritizedGrasp> score_candidates(const CandidateSet& candidates,
                                               const Scene& scene,
                                               int ik_budget,
                                               std::uint64_t rng_seed);

/// Sorts descending by the policy score (seeded shuffle for RandomOrder),
/// ties broken by (sample index, variant index).
std::vector<PrioritizedGrasp> order_by_policy(
    std::vector<PrioritizedGrasp> scored, Policy policy,
    std::uint64_t rng_seed);

std::vector<PrioritizedGrasp> prioritize(const CandidateSet& candidates,
                                         const Scene& scene, Policy policy,
                                         int ik_budget,
                                         std::uint64_t rng_seed);

struct PlannerParams {
  double step_norm = 0.05;  // radians, joint-space 2-norm per path step
  int rrt_max_iterations = 20000;
  double goal_bias = 0.1;
  std::uint64_t rng_seed = 0;
  double per_grasp_timeout = 10.0;  // seconds
};

/// Bidirectional RRT in joint space between q_start and any of the goal
/// configurations, with optional carried object and optional static object
/// obstacle pose. Paths are shortcut-smoothed and re-discretized at
/// step_norm. Deterministic per seed; nullopt on iteration/timeout
/// exhaustion.
std::optional<std::vector<JointConfig>> birrt(
    const KinematicChain& chain, const Scene& scene, const JointConfig& q_start,
    const std::vector<JointConfig>& goal_targets,
    const std::optional<AttachedObject>& attached,
    const std::optional<Transformd>& object_obstacle_pose,
    const PlannerParams& params);

struct PlanResult {
  PrioritizedGrasp chosen_grasp;
  std::vector<JointConfig> reach_path;
  std::vector<JointConfig> transport_path;
  int grasps_tried = 0;
  double planning_time = 0.0;  // seconds spent planning the winning grasp
  int path_steps = 0;          // total arc length / step_norm, rounded up
};

struct PipelineParams {
  GenerationParams generation;
  int score_ik_budget = 32;
  PlannerParams planner;
  int reach_retries = 3;  // distinct reach end-configs tried per grasp
};

struct PlanAttempt {
  std::optional<PlanResult> result;
  int grasps_tried = 0;
};

/// Reach + transport over an already prioritized list.
PlanAttempt plan_with_prioritized(const Scene& scene,
                                  const KinematicChain& chain,
                                  const Superquadricd& sq,
                                  const std::vector<PrioritizedGrasp>& ranked,
                                  const JointConfig& q_home,
                                  const PipelineParams& params);

/// Full pick-and-place pipeline: candidate generation and validation,
/// prioritization, then per-grasp reach and transport planning in rank
/// order. nullopt means infeasible (no candidates, or all exhausted).
std::optional<PlanResult> plan_pick_and_place(const Scene& scene,
                                              const HandModel& hand,
                                              const KinematicChain& chain,
                                              const Superquadricd& sq,
                                              const JointConfig& q_home,
                                              Policy policy,
                                              const PipelineParams& params);

/// Serialization for replay; wall-clock timing is reported separately and
/// deliberately kept out of the file so identical seeds produce identical
/// files.
void save_plan_result(const PlanResult& result, Policy policy,
                      const std::string& path);

double path_arc_length(const std::vector<JointConfig>& path);

}  // namespace sqgrasp

#endif  // SQGRASP_PLANNER_HPP_
