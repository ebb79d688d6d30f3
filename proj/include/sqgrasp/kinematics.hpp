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

#ifndef SQGRASP_KINEMATICS_HPP_
#define SQGRASP_KINEMATICS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqgrasp/geometry.hpp"
#include "sqgrasp/superquadric.hpp"

namespace sqgrasp {

inline constexpr int kNumJoints = 7;
inline constexpr double kIkPositionTol = 1e-4;   // meters
inline constexpr double kIkOrientationTol = 1e-3;  // radians

using JointConfig = Eigen::Matrix<double, kNumJoints, 1>;
using Jacobian = Eigen::Matrix<double, 6, kNumJoints>;

struct RevoluteJoint {
  Vec3d axis = Vec3d::UnitZ();     // in the joint frame
  Transformd parent_to_joint;      // fixed offset applied before the joint
  double lower = -M_PI;
  double upper = M_PI;
  double link_radius = 0.05;       // capsule radius of the outgoing link
};

/// 7-DOF serial arm with revolute joints, a fixed base, and a fixed
/// flange-to-TCP tool transform. Immutable after construction.
struct KinematicChain {
  std::array<RevoluteJoint, kNumJoints> joints;
  Transformd base;
  Transformd tool;

  bool within_limits(const JointConfig& q, double slack = 0.0) const;
  JointConfig clamp_to_limits(const JointConfig& q) const;
};

/// Chain config file: per-joint axis, offset transform (translation +
/// quaternion), limits and link capsule radius, plus base and tool lines.
KinematicChain load_chain(const std::string& path);
void save_chain(const KinematicChain& chain, const std::string& path);

/// All joint frames plus the TCP frame, in world coordinates.
/// frames[i] is the frame after joint i's rotation; frames[7] is the TCP.
std::array<Transformd, kNumJoints + 1> fk_frames(const KinematicChain& chain,
                                                 const JointConfig& q);

Transformd fk(const KinematicChain& chain, const JointConfig& q);

/// Geometric Jacobian at the TCP, world frame, rows [linear; angular].
Jacobian jacobian(const KinematicChain& chain, const JointConfig& q);

/// Yoshikawa manipulability sqrt(det(J J^T)), computed as the product of
/// the singular values of J.
double manipulability(const KinematicChain& chain, const JointConfig& q);

/// World-frame link capsules at configuration q (one per joint, spanning
/// to the next joint origin; the last spans to the TCP).
std::vector<Primitive> link_capsules(const KinematicChain& chain,
                                     const JointConfig& q);

struct IKSolutionSet {
  std::vector<JointConfig> solutions;
  Transformd target;
  double distinctness_radius = 0.1;
};

/// Pose error between FK(q) and the target: (position norm, angle).
std::pair<double, double> pose_error(const KinematicChain& chain,
                                     const JointConfig& q,
                                     const Transformd& target);

/// Enumerates distinct IK solutions by damped-least-squares descent from
/// `budget` seeds (the home config plus uniform samples within limits).
/// Solutions meet the FK tolerance and joint limits, and pairwise differ by
/// more than distinctness_radius in max-norm. Deterministic per seed. An
/// empty set means no solution was found within the budget.
IKSolutionSet ik_enumerate(const KinematicChain& chain,
                           const Transformd& target, int budget,
                           std::uint64_t rng_seed,
                           double distinctness_radius = 0.1);

/// Early-exit variant: true as soon as one solution converges and passes
/// the optional acceptance predicate.
bool ik_exists(const KinematicChain& chain, const Transformd& target,
               int budget, std::uint64_t rng_seed,
               const std::function<bool(const JointConfig&)>& accept = {});

struct Scene;  // collision world, see scene.hpp

/// Mean Yoshikawa manipulability over the collision-free IK solutions that
/// realize the TCP target, plus the surviving solution count. The object is
/// treated as an obstacle at object_pose when given. Returns (0, 0) when no
/// solution survives.
std::pair<double, int> situated_manipulability(
    const KinematicChain& chain, const Scene& scene,
    const Transformd& tcp_target, int budget, std::uint64_t rng_seed,
    const std::optional<Transformd>& object_pose = std::nullopt);

/// Same, but also returns the surviving configurations (reused by the
/// planner as goal sets).
std::pair<double, int> situated_manipulability_solutions(
    const KinematicChain& chain, const Scene& scene,
    const Transformd& tcp_target, int budget, std::uint64_t rng_seed,
    const std::optional<Transformd>& object_pose,
    std::vector<JointConfig>* survivors);

}  // namespace sqgrasp

#endif  // SQGRASP_KINEMATICS_HPP_
