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

#ifndef SQGRASP_HAND_HPP_
#define SQGRASP_HAND_HPP_

#include <array>
#include <vector>

#include "sqgrasp/geometry.hpp"

namespace sqgrasp {

/// Three-fingered hand: a palm box with two fingers on the +x side and an
/// opposing thumb, each finger a proximal/distal capsule pair driven by a
/// single closure angle (distal coupled at a fixed ratio). Fingers point
/// along +z when open and sweep toward the central axis as closure grows.
/// The TCP sits between the fingertips, tcp_from_hand ahead of the palm
/// center; tcp_offset is its inverse (hand origin expressed in the TCP
/// frame, the fixed hand mounting used by grasp frames).
struct HandModel {
  struct Finger {
    Vec3d base;        // in the hand frame, on the palm front face
    double bend_sign;  // rotation sign about y; tips move toward -sign * x
  };

  Vec3d palm_half_extents{0.07, 0.05, 0.03};
  double finger_radius = 0.011;
  double proximal_length = 0.06;
  double distal_length = 0.05;
  double distal_coupling = 0.7;  // distal angle = coupling * closure
  double closure_max = 1.2;      // radians
  double tcp_forward = 0.10;     // TCP distance ahead of the palm center
  std::array<Finger, 3> fingers{};

  static HandModel default_three_finger();

  /// T^p_h: hand origin pose in the TCP frame.
  Transformd tcp_offset() const {
    return Transformd::translate(Vec3d(0.0, 0.0, -tcp_forward));
  }

  /// Collision primitives (palm box + 6 finger capsules) in the world
  /// frame, hand posed at hand_pose with the given closure angle.
  std::vector<Primitive> primitives(const Transformd& hand_pose,
                                    double closure) const;

  /// Contact probe points on the inner finger faces, world frame, grouped
  /// per finger.
  std::array<std::vector<Vec3d>, 3> inner_contact_points(
      const Transformd& hand_pose, double closure) const;
};

}  // namespace sqgrasp

#endif  // SQGRASP_HAND_HPP_
