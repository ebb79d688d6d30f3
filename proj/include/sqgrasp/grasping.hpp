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

#ifndef SQGRASP_GRASPING_HPP_
#define SQGRASP_GRASPING_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqgrasp/scene.hpp"

namespace sqgrasp {

/// Grasp frame construction from a surface sample: translation at the
/// sample point, z the negated outward normal (approach direction), x the
/// finger-closing direction (the object's smallest axis projected onto the
/// plane orthogonal to z), y completing a right-handed frame. Falls back to
/// the second-smallest axis when the smallest is parallel to the normal;
/// returns nullopt when both are.
std::optional<Transformd> build_grasp_frame(const SurfaceSample& sample,
                                            const Superquadricd& sq);

/// [frame, frame rotated +alpha about its local x, frame rotated -alpha].
/// Translations are unchanged.
std::array<Transformd, 3> alpha_variants(const Transformd& frame,
                                         double alpha);

/// Largest closure angle at which every finger's inner contact points
/// remain outside the object (first-contact closure), per-finger bisection
/// capped at closure_max, combined as the minimum over fingers.
double close_fingers(const HandModel& hand, const Transformd& hand_pose,
                     const Superquadricd& shape,
                     const Transformd& object_pose);

struct GraspCandidate {
  Transformd object_to_tcp;  // T^o_p
  Transformd tcp_to_hand;    // T^p_h
  double closure = 0.0;
  int alpha_variant = 0;  // -1, 0, +1
  double eta = 0.0, omega = 0.0;
  int sample_index = 0;
  int variant_index = 0;  // 0: plain, 1: +alpha, 2: -alpha
};

struct CandidateSet {
  std::vector<GraspCandidate> grasps;
  Transformd generated_at;  // object pose used for generation (the goal)
  bool validated = false;
};

struct GenerationParams {
  double spacing = 0.0;  // 0: auto, 0.25 * min(a,b,c) clamped to [1, 4] cm
  double alpha = 30.0 * M_PI / 180.0;
  int ik_budget = 16;
  std::uint64_t rng_seed = 0;
};

double auto_spacing(const Superquadricd& sq);

/// Deterministic per-candidate IK seed, independent of evaluation order.
std::uint64_t grasp_ik_seed(std::uint64_t rng_seed, int sample_index,
                            int variant_index);

/// Candidate generation with the object at object_pose: surface sampling,
/// frame construction, alpha expansion, finger closing, hand collision
/// rejection, and collision-free IK existence for the resulting TCP pose.
/// At most three grasps (the variants) per sample. An empty set is a valid
/// outcome.
CandidateSet generate_grasps(const HandModel& hand,
                             const KinematicChain& chain, const Scene& scene,
                             const Transformd& object_pose,
                             const Superquadricd& sq,
                             const GenerationParams& params);

struct NoCandidates : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Generates candidates with the object at the scene goal pose, then
/// erases every grasp that cannot be executed with the object at the start
/// pose (no collision-free IK solution, or the hand itself collides
/// there). Throws NoCandidates when nothing survives.
CandidateSet get_valid_candidates(const HandModel& hand,
                                  const KinematicChain& chain,
                                  const Scene& scene, const Superquadricd& sq,
                                  const GenerationParams& params);

/// Structured-text serialization for inspection and replay; scores are
/// optional per-grasp (start, goal) pairs.
void save_candidates(const CandidateSet& set, const std::string& path,
                     const std::vector<std::pair<double, double>>* scores =
                         nullptr);
CandidateSet load_candidates(const std::string& path,
                             std::vector<std::pair<double, double>>* scores =
                                 nullptr);

}  // namespace sqgrasp

#endif  // SQGRASP_GRASPING_HPP_
