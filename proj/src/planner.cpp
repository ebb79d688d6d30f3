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

#include "sqgrasp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace sqgrasp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

}  // namespace

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::kAtStart: return "at_start";
    case Policy::kAtGoal: return "at_goal";
    case Policy::kAverage: return "average";
    case Policy::kRandomOrder: return "random";
  }
  return "unknown";
}

std::optional<Policy> parse_policy(const std::string& name) {
  if (name == "at_start") return Policy::kAtStart;
  if (name == "at_goal") return Policy::kAtGoal;
  if (name == "average") return Policy::kAverage;
  if (name == "random") return Policy::kRandomOrder;
  return std::nullopt;
}

std::vector<PrioritizedGrasp> score_candidates(const CandidateSet& candidates,
                                               const Scene& scene,
                                               int ik_budget,
                                               std::uint64_t rng_seed) {
  std::vector<PrioritizedGrasp> scored;
  scored.reserve(candidates.grasps.size());
  const KinematicChain& chain = *scene.chain;
  for (std::size_t k = 0; k < candidates.grasps.size(); ++k) {
    const GraspCandidate& g = candidates.grasps[k];
    PrioritizedGrasp pg;
    pg.grasp = g;
    Transformd tcp_start = scene.start_pose * g.object_to_tcp;
    Transformd tcp_goal = scene.goal_pose * g.object_to_tcp;
    auto [m_start, n_start] = situated_manipulability_solutions(
        chain, scene, tcp_start, ik_budget, mix(rng_seed, 2 * k),
        scene.start_pose, &pg.ik_start);
    auto [m_goal, n_goal] = situated_manipulability_solutions(
        chain, scene, tcp_goal, ik_budget, mix(rng_seed, 2 * k + 1),
        scene.goal_pose, &pg.ik_goal);
    (void)n_start;
    (void)n_goal;
    pg.score_start = m_start;
    pg.score_goal = m_goal;
    pg.score_avg = 0.5 * (m_start + m_goal);
    scored.push_back(std::move(pg));
  }
  return scored;
}

std::vector<PrioritizedGrasp> order_by_policy(
    std::vector<PrioritizedGrasp> scored, Policy policy,
    std::uint64_t rng_seed) {
  for (auto& pg : scored) pg.policy = policy;
  auto tie_less = [](const PrioritizedGrasp& a, const PrioritizedGrasp& b) {
    if (a.grasp.sample_index != b.grasp.sample_index)
      return a.grasp.sample_index < b.grasp.sample_index;
    return a.grasp.variant_index < b.grasp.variant_index;
  };
  if (policy == Policy::kRandomOrder) {
    std::mt19937_64 rng(mix(rng_seed, 0x52414E44ULL));
    std::shuffle(scored.begin(), scored.end(), rng);
    return scored;
  }
  auto score_of = [policy](const PrioritizedGrasp& pg) {
    switch (policy) {
      case Policy::kAtStart: return pg.score_start;
      case Policy::kAtGoal: return pg.score_goal;
      default: return pg.score_avg;
    }
  };
  std::sort(scored.begin(), scored.end(),
            [&](const PrioritizedGrasp& a, const PrioritizedGrasp& b) {
              double sa = score_of(a), sb = score_of(b);
              if (sa != sb) return sa > sb;
              return tie_less(a, b);
            });
  return scored;
}

std::vector<PrioritizedGrasp> prioritize(const CandidateSet& candidates,
                                         const Scene& scene, Policy policy,
                                         int ik_budget,
                                         std::uint64_t rng_seed) {
  return order_by_policy(
      score_candidates(candidates, scene, ik_budget, rng_seed), policy,
      rng_seed);
}

double path_arc_length(const std::vector<JointConfig>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    total += (path[i] - path[i - 1]).norm();
  return total;
}

namespace {

struct TreeNode {
  JointConfig q;
  int parent;
};

class Rrt {
 public:
  Rrt(const KinematicChain& chain, const Scene& scene,
      const std::optional<AttachedObject>& attached,
      const std::optional<Transformd>& object_obstacle,
      const PlannerParams& params)
      : chain_(chain),
        scene_(scene),
        attached_(attached),
        object_obstacle_(object_obstacle),
        params_(params),
        resolution_(std::min(params.step_norm, 0.03)) {}

  bool config_free(const JointConfig& q) const {
    return chain_.within_limits(q) &&
           !check_arm_collision(scene_, q, attached_, object_obstacle_);
  }

  // qa assumed valid; checks interior points and qb at the resolution.
  bool motion_free(const JointConfig& qa, const JointConfig& qb) const {
    double dist = (qb - qa).norm();
    int n = std::max(1, static_cast<int>(std::ceil(dist / resolution_)));
    for (int i = 1; i <= n; ++i) {
      JointConfig q = qa + (qb - qa) * (static_cast<double>(i) / n);
      if (!config_free(q)) return false;
    }
    return true;
  }

  const KinematicChain& chain_;
  const Scene& scene_;
  std::optional<AttachedObject> attached_;
  std::optional<Transformd> object_obstacle_;
  PlannerParams params_;
  double resolution_;
};

int nearest_node(const std::vector<TreeNode>& tree, const JointConfig& q) {
  int best = 0;
  double best_d = (tree[0].q - q).squaredNorm();
  for (int i = 1; i < static_cast<int>(tree.size()); ++i) {
    double d = (tree[i].q - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<JointConfig> trace_to_root(const std::vector<TreeNode>& tree,
                                       int idx) {
  std::vector<JointConfig> out;
  for (int i = idx; i >= 0; i = tree[i].parent) out.push_back(tree[i].q);
  return out;  // node .. root
}

std::vector<JointConfig> discretize(const std::vector<JointConfig>& path,
                                    double step_norm) {
  std::vector<JointConfig> out;
  if (path.empty()) return out;
  out.push_back(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const JointConfig& a = path[i - 1];
    const JointConfig& b = path[i];
    double dist = (b - a).norm();
    int n = std::max(1, static_cast<int>(std::ceil(dist / step_norm)));
    for (int k = 1; k <= n; ++k)
      out.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }
  return out;
}

}  // namespace

std::optional<std::vector<JointConfig>> birrt(
    const KinematicChain& chain, const Scene& scene,
    const JointConfig& q_start, const std::vector<JointConfig>& goal_targets,
    const std::optional<AttachedObject>& attached,
    const std::optional<Transformd>& object_obstacle_pose,
    const PlannerParams& params) {
  if (goal_targets.empty()) return std::nullopt;
  Rrt rrt(chain, scene, attached, object_obstacle_pose, params);
  if (!rrt.config_free(q_start)) return std::nullopt;

  // Trivial and straight-line cases first.
  for (const auto& goal : goal_targets) {
    if ((goal - q_start).cwiseAbs().maxCoeff() < 1e-12)
      return std::vector<JointConfig>{q_start};
  }
  std::vector<JointConfig> usable_goals;
  for (const auto& goal : goal_targets)
    if (rrt.config_free(goal)) usable_goals.push_back(goal);
  if (usable_goals.empty()) return std::nullopt;
  for (const auto& goal : usable_goals) {
    if (rrt.motion_free(q_start, goal))
      return discretize({q_start, goal}, params.step_norm);
  }

  std::mt19937_64 rng(splitmix64(params.rng_seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_uniform = [&]() {
    JointConfig q;
    for (int i = 0; i < kNumJoints; ++i) {
      const auto& j = chain.joints[i];
      q[i] = j.lower + (j.upper - j.lower) * unit(rng);
    }
    return q;
  };

  std::vector<TreeNode> start_tree{{q_start, -1}};
  std::vector<TreeNode> goal_tree;
  for (const auto& g : usable_goals) goal_tree.push_back({g, -1});

  std::vector<TreeNode>* tree_a = &start_tree;
  std::vector<TreeNode>* tree_b = &goal_tree;
  bool a_is_start = true;

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(params.per_grasp_timeout);

  for (int iter = 0; iter < params.rrt_max_iterations; ++iter) {
    if ((iter & 127) == 0 && std::chrono::steady_clock::now() > deadline)
      return std::nullopt;

    JointConfig target;
    if (unit(rng) < params.goal_bias) {
      std::uniform_int_distribution<std::size_t> pick(0, tree_b->size() - 1);
      target = (*tree_b)[pick(rng)].q;
    } else {
      target = sample_uniform();
    }

    // Extend tree A one step toward the target.
    int near_a = nearest_node(*tree_a, target);
    JointConfig qa = (*tree_a)[near_a].q;
    JointConfig diff = target - qa;
    double dist = diff.norm();
    if (dist < 1e-12) continue;
    JointConfig q_new =
        qa + diff * (std::min(params.step_norm, dist) / dist);
    if (!rrt.motion_free(qa, q_new)) {
      std::swap(tree_a, tree_b);
      a_is_start = !a_is_start;
      continue;
    }
    tree_a->push_back({q_new, near_a});
    int new_idx = static_cast<int>(tree_a->size()) - 1;

    // Greedily connect tree B to the new node.
    int near_b = nearest_node(*tree_b, q_new);
    JointConfig qb = (*tree_b)[near_b].q;
    bool connected = false;
    for (int hop = 0; hop < 4096; ++hop) {
      JointConfig to_new = q_new - qb;
      double d = to_new.norm();
      if (d <= params.step_norm) {
        if (rrt.motion_free(qb, q_new)) connected = true;
        break;
      }
      JointConfig q_step = qb + to_new * (params.step_norm / d);
      if (!rrt.motion_free(qb, q_step)) break;
      tree_b->push_back({q_step, near_b});
      near_b = static_cast<int>(tree_b->size()) - 1;
      qb = q_step;
    }

    if (connected) {
      auto a_part = trace_to_root(*tree_a, new_idx);   // q_new .. a-root
      auto b_part = trace_to_root(*tree_b, near_b);    // qb .. b-root
      std::vector<JointConfig> path;
      if (a_is_start) {
        path.assign(a_part.rbegin(), a_part.rend());
        path.insert(path.end(), b_part.begin(), b_part.end());
      } else {
        path.assign(b_part.rbegin(), b_part.rend());
        path.insert(path.end(), a_part.begin(), a_part.end());
      }

      // Shortcut smoothing, then re-discretize at step_norm.
      for (int attempt = 0; attempt < 100 && path.size() > 2; ++attempt) {
        std::uniform_int_distribution<std::size_t> pick(0, path.size() - 1);
        std::size_t i = pick(rng), j = pick(rng);
        if (i > j) std::swap(i, j);
        if (j - i < 2) continue;
        if (rrt.motion_free(path[i], path[j]))
          path.erase(path.begin() + i + 1, path.begin() + j);
      }
      return discretize(path, params.step_norm);
    }
    std::swap(tree_a, tree_b);
    a_is_start = !a_is_start;
  }
  return std::nullopt;
}

PlanAttempt plan_with_prioritized(const Scene& scene,
                                  const KinematicChain& chain,
                                  const Superquadricd& sq,
                                  const std::vector<PrioritizedGrasp>& ranked,
                                  const JointConfig& q_home,
                                  const PipelineParams& params) {
  PlanAttempt attempt;
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    const PrioritizedGrasp& pg = ranked[rank];
    ++attempt.grasps_tried;

    if (pg.ik_start.empty() || pg.ik_goal.empty()) continue;

    AttachedObject carried{sq, pg.grasp.object_to_tcp};
    std::vector<JointConfig> transport_goals;
    for (const auto& q : pg.ik_goal)
      if (!check_arm_collision(scene, q, carried, std::nullopt))
        transport_goals.push_back(q);
    if (transport_goals.empty()) continue;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<JointConfig> reach_goals = pg.ik_start;
    bool solved = false;
    std::vector<JointConfig> reach_path, transport_path;
    for (int retry = 0; retry < params.reach_retries && !reach_goals.empty();
         ++retry) {
      PlannerParams reach_params = params.planner;
      reach_params.rng_seed =
          mix(params.planner.rng_seed, 4 * (rank + 1) + 2 * retry);
      auto reach = birrt(chain, scene, q_home, reach_goals, std::nullopt,
                         scene.start_pose, reach_params);
      if (!reach) break;
      const JointConfig reach_end = reach->back();

      PlannerParams transport_params = params.planner;
      transport_params.rng_seed =
          mix(params.planner.rng_seed, 4 * (rank + 1) + 2 * retry + 1);
      auto transport = birrt(chain, scene, reach_end, transport_goals,
                             carried, std::nullopt, transport_params);
      if (transport) {
        reach_path = std::move(*reach);
        transport_path = std::move(*transport);
        solved = true;
        break;
      }
      // Exclude the tried end configuration and replan the reach.
      std::erase_if(reach_goals, [&](const JointConfig& q) {
        return (q - reach_end).cwiseAbs().maxCoeff() < 1e-12;
      });
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    if (solved) {
      PlanResult result;
      result.chosen_grasp = pg;
      result.reach_path = std::move(reach_path);
      result.transport_path = std::move(transport_path);
      result.grasps_tried = attempt.grasps_tried;
      result.planning_time = elapsed;
      double arc =
          path_arc_length(result.reach_path) +
          path_arc_length(result.transport_path);
      result.path_steps =
          static_cast<int>(std::ceil(arc / params.planner.step_norm));
      attempt.result = std::move(result);
      return attempt;
    }
  }
  return attempt;
}

std::optional<PlanResult> plan_pick_and_place(const Scene& scene,
                                              const HandModel& hand,
                                              const KinematicChain& chain,
                                              const Superquadricd& sq,
                                              const JointConfig& q_home,
                                              Policy policy,
                                              const PipelineParams& params) {
  if (check_arm_collision(scene, q_home, std::nullopt, scene.start_pose))
    throw std::invalid_argument("home configuration is in collision");
  CandidateSet candidates;
  try {
    candidates = get_valid_candidates(hand, chain, scene, sq, params.generation);
  } catch (const NoCandidates&) {
    return std::nullopt;
  }
  auto ranked = prioritize(candidates, scene, policy, params.score_ik_budget,
                           mix(params.generation.rng_seed, 0x5C07EULL));
  auto attempt =
      plan_with_prioritized(scene, chain, sq, ranked, q_home, params);
  return attempt.result;
}

void save_plan_result(const PlanResult& result, Policy policy,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "format_version 1\n";
  out << "policy " << policy_name(policy) << "\n";
  const auto& g = result.chosen_grasp.grasp;
  auto qf = g.object_to_tcp.quaternion();
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "grasp sample %d variant %d tag %d closure %.17g frame %.17g "
                "%.17g %.17g %.17g %.17g %.17g %.17g\n",
                g.sample_index, g.variant_index, g.alpha_variant, g.closure,
                g.object_to_tcp.translation.x(),
                g.object_to_tcp.translation.y(),
                g.object_to_tcp.translation.z(), qf.x(), qf.y(), qf.z(),
                qf.w());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "score_start %.17g\nscore_goal %.17g\nscore_avg %.17g\n",
                result.chosen_grasp.score_start, result.chosen_grasp.score_goal,
                result.chosen_grasp.score_avg);
  out << buf;
  out << "grasps_tried " << result.grasps_tried << "\n";
  out << "path_steps " << result.path_steps << "\n";
  auto dump_path = [&](const char* name, const std::vector<JointConfig>& p) {
    out << name << " " << p.size() << "\n";
    for (const auto& q : p) {
      for (int i = 0; i < kNumJoints; ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.17g", i ? " " : "", q[i]);
        out << buf;
      }
      out << "\n";
    }
  };
  dump_path("reach_path", result.reach_path);
  dump_path("transport_path", result.transport_path);
}

}  // namespace sqgrasp
