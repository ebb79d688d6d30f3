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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sqgrasp/bench.hpp"
#include "sqgrasp/cloudfit.hpp"

namespace {

using namespace sqgrasp;

Vec3d parse_vec3(const std::string& s, const char* what) {
  std::istringstream ss(s);
  Vec3d v;
  if (!(ss >> v.x() >> v.y() >> v.z()))
    throw CLI::ValidationError(std::string(what) + ": expected three numbers");
  return v;
}

Transformd parse_pose7(const std::string& s, const char* what) {
  std::istringstream ss(s);
  double tx, ty, tz, qx, qy, qz, qw;
  if (!(ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
    throw CLI::ValidationError(std::string(what) +
                               ": expected tx ty tz qx qy qz qw");
  return Transformd::from_quaternion(Vec3d(tx, ty, tz),
                                     Eigen::Quaterniond(qw, qx, qy, qz));
}

void save_sq_params(const FitResult& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  auto q = fit.sq.pose.quaternion();
  char buf[320];
  out << "format_version 1\n";
  std::snprintf(buf, sizeof(buf), "sq %.17g %.17g %.17g %.17g %.17g\n",
                fit.sq.a, fit.sq.b, fit.sq.c, fit.sq.e1, fit.sq.e2);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "pose %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                fit.sq.pose.translation.x(), fit.sq.pose.translation.y(),
                fit.sq.pose.translation.z(), q.x(), q.y(), q.z(), q.w());
  out << buf;
  std::snprintf(buf, sizeof(buf), "residual %.17g\niterations %d\n",
                fit.residual, fit.iterations);
  out << buf;
}

Superquadricd load_sq_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  double a = 0, b = 0, c = 0, e1 = 1, e2 = 1;
  Transformd pose;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "sq") {
      if (!(ss >> a >> b >> c >> e1 >> e2))
        throw std::runtime_error("malformed sq line in " + path);
    } else if (key == "pose") {
      double tx, ty, tz, qx, qy, qz, qw;
      if (!(ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
        throw std::runtime_error("malformed pose line in " + path);
      pose = Transformd::from_quaternion(Vec3d(tx, ty, tz),
                                         Eigen::Quaterniond(qw, qx, qy, qz));
    }
  }
  return Superquadricd::make(a, b, c, e1, e2, pose);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superquadric-based pick-and-place grasp planning"};
  app.require_subcommand(1);

  // render-cloud
  auto* render = app.add_subcommand(
      "render-cloud", "Render a synthetic single-view cloud of a shape");
  double ra = 0.05, rb = 0.05, rc = 0.1, re1 = 1.0, re2 = 1.0;
  std::string r_pose = "0 0 0 0 0 0 1", r_viewpoint = "1 0 0";
  double r_res = 0.01, r_noise = 0.0;
  std::uint64_t r_seed = 0;
  std::string r_out = "cloud.xyz";
  render->add_option("--a", ra, "semi-axis a (m)");
  render->add_option("--b", rb, "semi-axis b (m)");
  render->add_option("--c", rc, "semi-axis c (m)");
  render->add_option("--e1", re1, "shape exponent e1");
  render->add_option("--e2", re2, "shape exponent e2");
  render->add_option("--pose", r_pose, "object pose: tx ty tz qx qy qz qw");
  render->add_option("--viewpoint", r_viewpoint, "sensor origin: x y z");
  render->add_option("--angular-res", r_res, "ray grid resolution (rad)");
  render->add_option("--noise", r_noise, "Gaussian noise sigma (m)");
  render->add_option("--seed", r_seed, "noise seed");
  render->add_option("--out", r_out, "output cloud file")->required();

  // fit
  auto* fit_cmd =
      app.add_subcommand("fit", "Fit a superquadric to a cloud file");
  std::string f_cloud, f_out = "params.sq", f_table_normal = "0 0 1";
  bool f_no_mirror = false;
  fit_cmd->add_option("--cloud", f_cloud, "input cloud file")->required();
  fit_cmd->add_option("--out", f_out, "output params file");
  fit_cmd->add_option("--table-normal", f_table_normal,
                      "table normal for mirroring: x y z");
  fit_cmd->add_flag("--no-mirror", f_no_mirror,
                    "fit the raw cloud without symmetry completion");

  // gen-grasps
  auto* gen = app.add_subcommand(
      "gen-grasps", "Generate grasp candidates for a scene");
  std::string g_scene, g_out = "candidates.txt";
  double g_spacing = 0.0;
  int g_budget = 16;
  std::uint64_t g_seed = 0;
  bool g_goal_only = false;
  gen->add_option("--scene", g_scene, "scene file")->required();
  gen->add_option("--out", g_out, "output candidate file");
  gen->add_option("--spacing", g_spacing, "surface sampling spacing (m)");
  gen->add_option("--ik-budget", g_budget, "IK seeds per candidate");
  gen->add_option("--seed", g_seed, "rng seed");
  gen->add_flag("--goal-only", g_goal_only,
                "skip the start-pose validation pass");

  // plan
  auto* plan = app.add_subcommand("plan", "Plan a pick-and-place task");
  std::string p_scene, p_policy = "at_goal", p_out = "plan.txt";
  std::string p_params;
  bool p_fitted_start = false;
  double p_spacing = 0.0, p_timeout = 10.0;
  int p_budget = 16, p_score_budget = 32, p_iters = 20000;
  std::uint64_t p_seed = 0;
  plan->add_option("--scene", p_scene, "scene file")->required();
  plan->add_option("--policy", p_policy,
                   "prioritization policy (at_start|at_goal|average|random)");
  plan->add_option("--out", p_out, "output plan file");
  plan->add_option("--object-params", p_params,
                   "fitted shape file overriding the scene object");
  plan->add_flag("--use-fitted-start", p_fitted_start,
                 "take the start pose from the fitted shape pose");
  plan->add_option("--spacing", p_spacing, "surface sampling spacing (m)");
  plan->add_option("--ik-budget", p_budget, "IK seeds for generation");
  plan->add_option("--score-budget", p_score_budget, "IK seeds for scoring");
  plan->add_option("--rrt-iterations", p_iters, "planner iteration budget");
  plan->add_option("--timeout", p_timeout, "per-grasp planning timeout (s)");
  plan->add_option("--seed", p_seed, "rng seed");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Run a benchmark suite and print the metrics table");
  std::string b_suite, b_policies = "at_start,at_goal,average";
  std::string b_csv = "results.csv";
  int b_workers = 1;
  double b_spacing = 0.0, b_timeout = 10.0;
  int b_budget = 16, b_score_budget = 32, b_iters = 20000;
  bench->add_option("--suite", b_suite, "suite spec file")->required();
  bench->add_option("--policies", b_policies, "comma-separated policy list");
  bench->add_option("--out-csv", b_csv, "per-run results CSV path");
  bench->add_option("--workers", b_workers, "concurrent scenario workers");
  bench->add_option("--spacing", b_spacing, "surface sampling spacing (m)");
  bench->add_option("--ik-budget", b_budget, "IK seeds for generation");
  bench->add_option("--score-budget", b_score_budget, "IK seeds for scoring");
  bench->add_option("--rrt-iterations", b_iters, "planner iteration budget");
  bench->add_option("--timeout", b_timeout, "per-grasp planning timeout (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (render->parsed()) {
      Superquadricd sq = Superquadricd::make(
          ra, rb, rc, re1, re2, parse_pose7(r_pose, "--pose"));
      PointCloud cloud =
          render_single_view(sq, parse_vec3(r_viewpoint, "--viewpoint"),
                             r_res, r_noise, r_seed);
      save_cloud(cloud, r_out);
      std::cout << "wrote " << cloud.points.size() << " points to " << r_out
                << "\n";
    } else if (fit_cmd->parsed()) {
      PointCloud cloud = load_cloud(f_cloud);
      if (!f_no_mirror) {
        if (!cloud.viewpoint) {
          std::cerr << "cloud has no viewpoint header; use --no-mirror or add "
                       "one\n";
          return 1;
        }
        auto [mirrored, plane] =
            mirror_cloud(cloud, parse_vec3(f_table_normal, "--table-normal"));
        std::cout << "mirror plane normal: " << plane.normal.transpose()
                  << " offset " << plane.offset << "\n";
        cloud = std::move(mirrored);
      }
      FitResult fit = fit_superquadric(cloud);
      save_sq_params(fit, f_out);
      std::printf(
          "fit: a=%.4f b=%.4f c=%.4f e1=%.3f e2=%.3f residual=%.3g "
          "iterations=%d\n",
          fit.sq.a, fit.sq.b, fit.sq.c, fit.sq.e1, fit.sq.e2, fit.residual,
          fit.iterations);
    } else if (gen->parsed()) {
      Scene scene = load_scene(g_scene);
      HandModel hand = HandModel::default_three_finger();
      GenerationParams params;
      params.spacing = g_spacing;
      params.ik_budget = g_budget;
      params.rng_seed = g_seed;
      CandidateSet set;
      if (g_goal_only) {
        set = generate_grasps(hand, *scene.chain, scene, scene.goal_pose,
                              scene.object_shape, params);
      } else {
        try {
          set = get_valid_candidates(hand, *scene.chain, scene,
                                     scene.object_shape, params);
        } catch (const NoCandidates& e) {
          std::cerr << "infeasible: " << e.what() << "\n";
          return 2;
        }
      }
      save_candidates(set, g_out);
      std::cout << "wrote " << set.grasps.size() << " candidates to " << g_out
                << "\n";
    } else if (plan->parsed()) {
      auto policy = parse_policy(p_policy);
      if (!policy) {
        std::cerr << "unknown policy '" << p_policy
                  << "'; valid policies: at_start, at_goal, average, random\n";
        return 1;
      }
      Scene scene = load_scene(p_scene);
      if (!p_params.empty()) {
        Superquadricd fitted = load_sq_params(p_params);
        Transformd start =
            p_fitted_start ? fitted.pose : scene.start_pose;
        fitted.pose = Transformd::identity();
        scene = Scene::make(fitted, start, scene.goal_pose, scene.obstacles,
                            scene.table, scene.chain, scene.home);
      }
      HandModel hand = HandModel::default_three_finger();
      PipelineParams params;
      params.generation.spacing = p_spacing;
      params.generation.ik_budget = p_budget;
      params.generation.rng_seed = p_seed;
      params.score_ik_budget = p_score_budget;
      params.planner.rrt_max_iterations = p_iters;
      params.planner.per_grasp_timeout = p_timeout;
      params.planner.rng_seed = p_seed;
      auto result =
          plan_pick_and_place(scene, hand, *scene.chain, scene.object_shape,
                              scene.home, *policy, params);
      if (!result) {
        std::cerr << "infeasible: no grasp yields a full plan\n";
        return 2;
      }
      save_plan_result(*result, *policy, p_out);
      std::printf(
          "plan: grasps_tried=%d path_steps=%d planning_time=%.3fs -> %s\n",
          result->grasps_tried, result->path_steps, result->planning_time,
          p_out.c_str());
    } else if (bench->parsed()) {
      std::vector<Policy> policies;
      std::stringstream ss(b_policies);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        auto p = parse_policy(tok);
        if (!p) {
          std::cerr << "unknown policy '" << tok
                    << "'; valid policies: at_start, at_goal, average, "
                       "random\n";
          return 1;
        }
        policies.push_back(*p);
      }
      SuiteSpec spec = load_suite_spec(b_suite);
      std::filesystem::path dir =
          std::filesystem::path(b_suite).parent_path();
      std::filesystem::path scene_path = spec.scene_path;
      if (scene_path.is_relative() && !std::filesystem::exists(scene_path))
        scene_path = dir / scene_path;
      Scene scene = load_scene(scene_path.string());
      ScenarioSuite suite =
          generate_suite(scene, spec.grid, rotation_list(spec.rotations),
                         spec.repeats, spec.master_seed);
      for (const auto& note : suite.excluded)
        std::cout << "excluded: " << note << "\n";
      std::cout << suite.scenarios.size() << " scenarios, " << spec.repeats
                << " repeats, " << policies.size() << " policies\n";
      PipelineParams params;
      params.generation.spacing = b_spacing;
      params.generation.ik_budget = b_budget;
      params.score_ik_budget = b_score_budget;
      params.planner.rrt_max_iterations = b_iters;
      params.planner.per_grasp_timeout = b_timeout;
      auto records =
          run_suite(suite, policies, params, b_workers, &std::cout);
      write_records_csv(records, b_csv);
      MetricsTable table = aggregate(
          records, static_cast<int>(suite.scenarios.size()), suite.repeats);
      print_metrics_table(table, std::cout);
      std::cout << "per-run results written to " << b_csv << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
