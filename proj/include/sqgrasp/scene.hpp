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

#ifndef SQGRASP_SCENE_HPP_
#define SQGRASP_SCENE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqgrasp/geometry.hpp"
#include "sqgrasp/hand.hpp"
#include "sqgrasp/kinematics.hpp"
#include "sqgrasp/superquadric.hpp"

namespace sqgrasp {

/// Contact tolerance shared by every collision query: penetration up to
/// this depth counts as contact, not collision.
inline constexpr double kContactTol = 2e-3;

/// Object carried by the hand during transport: the object shape plus the
/// grasp frame T^o_p (TCP pose in the object frame).
struct AttachedObject {
  Superquadricd shape;
  Transformd object_to_tcp;
};

/// Immutable collision world: the manipulated object (canonical shape plus
/// its start/goal poses), static obstacles, the table, and the arm.
struct Scene {
  Superquadricd object_shape;  // identity pose; placed via start/goal
  Transformd start_pose;       // T^w_s
  Transformd goal_pose;        // T^w_g
  std::vector<Primitive> obstacles;
  Primitive table;
  std::shared_ptr<const KinematicChain> chain;
  std::string chain_path;
  JointConfig home = JointConfig::Zero();

  // Cached collision sampling (world frame for static geometry, object
  // frame for the object surface) and the self-collision exemption mask.
  std::vector<std::vector<Vec3d>> obstacle_points;
  std::vector<Vec3d> table_points;
  std::vector<Vec3d> object_points;
  std::array<std::array<bool, kNumJoints>, kNumJoints> self_exempt{};

  /// Builds caches and validates the load-time invariants: the object at
  /// its start pose must be collision-free and the goal position above the
  /// table surface.
  static Scene make(Superquadricd object_shape, const Transformd& start_pose,
                    const Transformd& goal_pose,
                    std::vector<Primitive> obstacles, const Primitive& table,
                    std::shared_ptr<const KinematicChain> chain,
                    const JointConfig& home = JointConfig::Zero());
};

/// Structured-text scene file (format_version, chain path, object
/// parameters, poses as translation + quaternion, obstacles, table, home).
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

/// True when the object shape placed at object_pose penetrates the given
/// primitive beyond `margin`.
bool object_vs_primitive(const Superquadricd& shape,
                         const Transformd& object_pose, const Primitive& prim,
                         const std::vector<Vec3d>& prim_surface_world,
                         const std::vector<Vec3d>& object_surface_local,
                         double margin);

/// Hand at hand_pose (origin frame) with the given closure, checked
/// against obstacles, table, and the object at object_pose. Contact within
/// kContactTol is exempt.
bool check_hand_collision(const Scene& scene, const HandModel& hand,
                          const Transformd& hand_pose, double closure,
                          const Transformd& object_pose);

/// Arm link capsules at q against obstacles, table, and non-adjacent other
/// links. When object_pose is given the object counts as an obstacle for
/// all links but the hand link; when attached is given the carried object
/// (posed via FK and the grasp transform) is checked against obstacles and
/// table.
bool check_arm_collision(const Scene& scene, const JointConfig& q,
                         const std::optional<AttachedObject>& attached,
                         const std::optional<Transformd>& object_pose);

/// Object placed at pose against obstacles and table; resting contact on
/// the table top within kContactTol is exempt.
bool object_collision_free_at(const Scene& scene, const Transformd& pose);

}  // namespace sqgrasp

#endif  // SQGRASP_SCENE_HPP_
