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

#include "sqgrasp/bench.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

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

std::vector<double> rotation_list(const std::string& name) {
  if (name == "none") return {0.0};
  if (name == "pi4") {
    std::vector<double> out;
    for (int k = 0; k < 8; ++k) out.push_back(k * M_PI / 4.0);
    return out;
  }
  if (name == "pi2") {
    std::vector<double> out;
    for (int k = 0; k < 4; ++k) out.push_back(k * M_PI / 2.0);
    return out;
  }
  throw std::invalid_argument("unknown rotation spec: " + name +
                              " (expected none, pi4, or pi2)");
}

ScenarioSuite generate_suite(const Scene& base_scene, const GridSpec& grid,
                             const std::vector<double>& rotations, int repeats,
                             std::uint64_t master_seed) {
  if (grid.cols <= 0 || grid.rows <= 0 || grid.spacing <= 0.0)
    throw std::invalid_argument("bad grid spec");
  ScenarioSuite suite;
  suite.base_scene = base_scene;
  suite.repeats = repeats;
  suite.master_seed = master_seed;

  const Transformd& base_start = base_scene.start_pose;
  Transformd table_inv = base_scene.table.pose.inverse();
  int index = 0;
  int counter = 0;
  for (double yaw : rotations) {
    for (int ix = 0; ix < grid.rows; ++ix) {
      for (int iy = 0; iy < grid.cols; ++iy) {
        double x = grid.center_x + (ix - (grid.rows - 1) / 2.0) * grid.spacing;
        double y = grid.center_y + (iy - (grid.cols - 1) / 2.0) * grid.spacing;
        Transformd start;
        start.rotation =
            (Transformd::rot_z(yaw) * base_start).rotation;
        start.translation = Vec3d(x, y, base_start.translation.z());

        Vec3d local = table_inv.apply(start.translation);
        if (std::abs(local.x()) > base_scene.table.half_extents.x() ||
            std::abs(local.y()) > base_scene.table.half_extents.y())
          throw GridOffTable("grid cell (" + std::to_string(ix) + "," +
                             std::to_string(iy) + ") leaves the table");

        ++counter;
        if (!object_collision_free_at(base_scene, start)) {
          std::ostringstream note;
          note << "cell (" << ix << "," << iy << ") yaw " << yaw
               << " excluded: start placement collides";
          suite.excluded.push_back(note.str());
          continue;
        }
        Scenario sc;
        sc.index = index++;
        sc.grid_ix = ix;
        sc.grid_iy = iy;
        sc.yaw = yaw;
        sc.start_pose = start;
        sc.scenario_seed = mix(master_seed, static_cast<std::uint64_t>(counter));
        suite.scenarios.push_back(sc);
      }
    }
  }
  return suite;
}

SuiteSpec load_suite_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite spec: " + path);
  SuiteSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format_version") {
      int v;
      ss >> v;
      if (v != 1) throw std::runtime_error("unsupported suite format version");
    } else if (key == "scene") {
      ss >> spec.scene_path;
    } else if (key == "grid") {
      if (!(ss >> spec.grid.cols >> spec.grid.rows >> spec.grid.spacing >>
            spec.grid.center_x >> spec.grid.center_y))
        throw std::runtime_error("suite spec: malformed grid line");
    } else if (key == "rotations") {
      ss >> spec.rotations;
    } else if (key == "repeats") {
      ss >> spec.repeats;
    } else if (key == "master_seed") {
      ss >> spec.master_seed;
    } else {
      throw std::runtime_error("suite spec: unknown key " + key);
    }
  }
  if (spec.scene_path.empty())
    throw std::runtime_error("suite spec missing scene path");
  return spec;
}

namespace {

// All records for one scenario: every policy and repeat, with candidate
// generation and scoring done once.
std::vector<RunRecord> run_scenario(const ScenarioSuite& suite,
                                    const Scenario& scenario,
                                    const std::vector<Policy>& policies,
                                    const PipelineParams& base_params) {
  std::vector<RunRecord> records;
  const Scene& base = suite.base_scene;
  Scene scene = Scene::make(base.object_shape, scenario.start_pose,
                            base.goal_pose, base.obstacles, base.table,
                            base.chain, base.home);
  const KinematicChain& chain = *scene.chain;
  HandModel hand = HandModel::default_three_finger();

  PipelineParams params = base_params;
  params.generation.rng_seed = scenario.scenario_seed;

  std::vector<PrioritizedGrasp> scored;
  bool have_candidates = true;
  try {
    CandidateSet candidates = get_valid_candidates(
        hand, chain, scene, scene.object_shape, params.generation);
    scored = score_candidates(candidates, scene, params.score_ik_budget,
                              mix(scenario.scenario_seed, 0x5C07EULL));
  } catch (const NoCandidates&) {
    have_candidates = false;
  }

  for (Policy policy : policies) {
    std::vector<PrioritizedGrasp> ranked;
    if (have_candidates)
      ranked = order_by_policy(scored, policy,
                               mix(scenario.scenario_seed, 0x5C07EULL));
    for (int repeat = 0; repeat < suite.repeats; ++repeat) {
      RunRecord rec;
      rec.scenario = scenario.index;
      rec.grid_ix = scenario.grid_ix;
      rec.grid_iy = scenario.grid_iy;
      rec.yaw = scenario.yaw;
      rec.repeat = repeat;
      rec.policy = policy;
      if (have_candidates) {
        PipelineParams run_params = params;
        run_params.planner.rng_seed =
            mix(scenario.scenario_seed, 1000 + repeat);
        PlanAttempt attempt = plan_with_prioritized(
            scene, chain, scene.object_shape, ranked, scene.home, run_params);
        rec.grasps_tried = attempt.grasps_tried;
        if (attempt.result) {
          rec.success = true;
          rec.first_success = attempt.result->grasps_tried == 1;
          rec.planning_time = attempt.result->planning_time;
          rec.path_steps = attempt.result->path_steps;
          rec.grasp_sample = attempt.result->chosen_grasp.grasp.sample_index;
          rec.grasp_variant = attempt.result->chosen_grasp.grasp.variant_index;
        }
      }
      records.push_back(rec);
    }
  }
  return records;
}

}  // namespace

std::vector<RunRecord> run_suite(const ScenarioSuite& suite,
                                 const std::vector<Policy>& policies,
                                 const PipelineParams& params, int workers,
                                 std::ostream* progress) {
  std::vector<std::vector<RunRecord>> per_scenario(suite.scenarios.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= suite.scenarios.size()) break;
      per_scenario[idx] =
          run_scenario(suite, suite.scenarios[idx], policies, params);
      std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        (*progress) << "scenario " << finished << "/"
                    << suite.scenarios.size() << " done\n";
        progress->flush();
      }
    }
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<RunRecord> records;
  for (auto& chunk : per_scenario)
    records.insert(records.end(), chunk.begin(), chunk.end());
  return records;
}

MetricsTable aggregate(const std::vector<RunRecord>& records,
                       int scenario_count, int repeats) {
  MetricsTable table;
  std::map<Policy, std::map<int, int>> first_success_count;
  for (const auto& rec : records) {
    PolicyMetrics& m = table[rec.policy];
    m.scenario_count = scenario_count;
    ++m.runs;
    if (rec.success) {
      ++m.successes;
      m.mean_path_steps += rec.path_steps;
      m.mean_planning_time += rec.planning_time;
    }
    if (rec.first_success) ++first_success_count[rec.policy][rec.scenario];
  }
  for (auto& [policy, m] : table) {
    if (m.successes > 0) {
      m.mean_path_steps /= m.successes;
      m.mean_planning_time /= m.successes;
    }
    double total = 0.0;
    for (const auto& [scenario, count] : first_success_count[policy])
      total += static_cast<double>(count) / repeats;
    m.first_success_total = total;
  }
  return table;
}

void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "scenario,grid_ix,grid_iy,yaw,repeat,policy,success,first_success,"
         "grasps_tried,planning_time,path_steps,grasp_sample,grasp_variant\n";
  char buf[320];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%d,%s,%d,%d,%d,%.6f,%d,%d,%d\n",
                  r.scenario, r.grid_ix, r.grid_iy, r.yaw, r.repeat,
                  policy_name(r.policy).c_str(), r.success ? 1 : 0,
                  r.first_success ? 1 : 0, r.grasps_tried, r.planning_time,
                  r.path_steps, r.grasp_sample, r.grasp_variant);
    out << buf;
  }
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::vector<RunRecord> records;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    auto next_field = [&]() {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("bad csv row");
      return field;
    };
    RunRecord r;
    r.scenario = std::stoi(next_field());
    r.grid_ix = std::stoi(next_field());
    r.grid_iy = std::stoi(next_field());
    r.yaw = std::stod(next_field());
    r.repeat = std::stoi(next_field());
    auto policy = parse_policy(next_field());
    if (!policy) throw std::runtime_error("bad policy in csv");
    r.policy = *policy;
    r.success = std::stoi(next_field()) != 0;
    r.first_success = std::stoi(next_field()) != 0;
    r.grasps_tried = std::stoi(next_field());
    r.planning_time = std::stod(next_field());
    r.path_steps = std::stoi(next_field());
    r.grasp_sample = std::stoi(next_field());
    r.grasp_variant = std::stoi(next_field());
    records.push_back(r);
  }
  return records;
}

void print_metrics_table(const MetricsTable& table, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-16s %12s %15s %12s\n", "Metric Type",
                "Path Steps", "Planning Time", "Success");
  out << buf;
  auto row_name = [](Policy p) {
    switch (p) {
      case Policy::kAtStart: return "m_g at start";
      case Policy::kAtGoal: return "m_g at goal";
      case Policy::kAverage: return "avg m_g";
      case Policy::kRandomOrder: return "random order";
    }
    return "?";
  };
  const Policy order[] = {Policy::kAtStart, Policy::kAtGoal, Policy::kAverage,
                          Policy::kRandomOrder};
  for (Policy p : order) {
    auto it = table.find(p);
    if (it == table.end()) continue;
    const PolicyMetrics& m = it->second;
    std::snprintf(buf, sizeof(buf), "%-16s %12.2f %14.3fs %8.1f/%d\n",
                  row_name(p), m.mean_path_steps, m.mean_planning_time,
                  m.first_success_total, m.scenario_count);
    out << buf;
  }
}

}  // namespace sqgrasp
