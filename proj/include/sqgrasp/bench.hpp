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

#ifndef SQGRASP_BENCH_HPP_
#define SQGRASP_BENCH_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sqgrasp/planner.hpp"

namespace sqgrasp {

struct GridOffTable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int cols = 7;  // across y
  int rows = 5;  // across x
  double spacing = 0.1;
  double center_x = 0.0;
  double center_y = 0.0;
};

/// "none" -> {0}; "pi4" -> 8 yaw steps of pi/4; "pi2" -> 4 steps of pi/2.
std::vector<double> rotation_list(const std::string& name);

struct Scenario {
  int index = 0;
  int grid_ix = 0;
  int grid_iy = 0;
  double yaw = 0.0;
  Transformd start_pose;
  std::uint64_t scenario_seed = 0;
};

struct ScenarioSuite {
  Scene base_scene;
  std::vector<Scenario> scenarios;
  std::vector<std::string> excluded;  // human-readable exclusion notes
  int repeats = 5;
  std::uint64_t master_seed = 0;
};

/// Start poses on a rows x cols grid (base start height and orientation,
/// optionally yawed), goal fixed to the base scene goal. Grid cells whose
/// start placement collides are excluded and reported. Throws GridOffTable
/// when a cell leaves the table footprint.
ScenarioSuite generate_suite(const Scene& base_scene, const GridSpec& grid,
                             const std::vector<double>& rotations, int repeats,
                             std::uint64_t master_seed);

struct SuiteSpec {
  std::string scene_path;
  GridSpec grid;
  std::string rotations = "none";
  int repeats = 5;
  std::uint64_t master_seed = 0;
};

SuiteSpec load_suite_spec(const std::string& path);

struct RunRecord {
  int scenario = 0;
  int grid_ix = 0, grid_iy = 0;
  double yaw = 0.0;
  int repeat = 0;
  Policy policy = Policy::kAtGoal;
  bool success = false;
  bool first_success = false;
  int grasps_tried = 0;
  double planning_time = 0.0;
  int path_steps = 0;
  int grasp_sample = -1;
  int grasp_variant = -1;
};

struct PolicyMetrics {
  double mean_path_steps = 0.0;     // over successful runs
  double mean_planning_time = 0.0;  // over successful runs
  double first_success_total = 0.0;  // fractional, summed over scenarios
  int scenario_count = 0;
  int runs = 0;
  int successes = 0;
};

using MetricsTable = std::map<Policy, PolicyMetrics>;

/// Runs every (scenario x repeat x policy) combination. Candidate
/// generation and scoring are seeded per scenario and shared across
/// policies and repeats; planner seeds vary per repeat. Per-run failures
/// are recorded, never raised. Deterministic for a fixed suite regardless
/// of worker count.
std::vector<RunRecord> run_suite(const ScenarioSuite& suite,
                                 const std::vector<Policy>& policies,
                                 const PipelineParams& params, int workers = 1,
                                 std::ostream* progress = nullptr);

MetricsTable aggregate(const std::vector<RunRecord>& records,
                       int scenario_count, int repeats);

void write_records_csv(const std::vector<RunRecord>& records,
                       const std::string& path);
std::vector<RunRecord> read_records_csv(const std::string& path);

void print_metrics_table(const MetricsTable& table, std::ostream& out);

}  // namespace sqgrasp

#endif  // SQGRASP_BENCH_HPP_
