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

#include "sqgrasp/hand.hpp"

namespace sqgrasp {

HandModel HandModel::default_three_finger() {
  HandModel hand;
  double face_z = hand.palm_half_extents.z();
  hand.fingers[0] = {Vec3d(0.055, 0.035, face_z), -1.0};
  hand.fingers[1] = {Vec3d(0.055, -0.035, face_z), -1.0};
  hand.fingers[2] = {Vec3d(-0.055, 0.0, face_z), 1.0};  // thumb
  return hand;
}

namespace {

struct FingerSegments {
  Vec3d prox_start, prox_end, dist_end;
  Mat3d prox_rot, dist_rot;
};

FingerSegments finger_segments(const HandModel& hand,
                               const HandModel::Finger& finger,
                               double closure) {
  FingerSegments seg;
  seg.prox_rot =
      Eigen::AngleAxisd(finger.bend_sign * closure, Vec3d::UnitY())
          .toRotationMatrix();
  seg.dist_rot = Eigen::AngleAxisd(
                     finger.bend_sign * (1.0 + hand.distal_coupling) * closure,
                     Vec3d::UnitY())
                     .toRotationMatrix();
  seg.prox_start = finger.base;
  seg.prox_end =
      seg.prox_start + hand.proximal_length * (seg.prox_rot * Vec3d::UnitZ());
  seg.dist_end =
      seg.prox_end + hand.distal_length * (seg.dist_rot * Vec3d::UnitZ());
  return seg;
}

}  // namespace

std::vector<Primitive> HandModel::primitives(const Transformd& hand_pose,
                                             double closure) const {
  std::vector<Primitive> prims;
  prims.reserve(7);
  prims.push_back(Primitive::box(hand_pose, palm_half_extents));
  for (const auto& finger : fingers) {
    FingerSegments seg = finger_segments(*this, finger, closure);
    prims.push_back(Primitive::capsule_between(hand_pose.apply(seg.prox_start),
                                               hand_pose.apply(seg.prox_end),
                                               finger_radius));
    prims.push_back(Primitive::capsule_between(hand_pose.apply(seg.prox_end),
                                               hand_pose.apply(seg.dist_end),
                                               finger_radius));
  }
  return prims;
}

std::array<std::vector<Vec3d>, 3> HandModel::inner_contact_points(
    const Transformd& hand_pose, double closure) const {
  std::array<std::vector<Vec3d>, 3> out;
  for (int f = 0; f < 3; ++f) {
    const auto& finger = fingers[f];
    FingerSegments seg = finger_segments(*this, finger, closure);
    // Leading face during closing: the rotated bend_sign * x direction.
    Vec3d inner_prox = seg.prox_rot * Vec3d(finger.bend_sign, 0, 0);
    Vec3d inner_dist = seg.dist_rot * Vec3d(finger.bend_sign, 0, 0);
    auto& pts = out[f];
    pts.reserve(13);
    for (int i = 1; i <= 6; ++i) {
      double t = i / 6.0;
      Vec3d on_axis = seg.prox_start + t * (seg.prox_end - seg.prox_start);
      pts.push_back(hand_pose.apply(on_axis + finger_radius * inner_prox));
    }
    for (int i = 1; i <= 5; ++i) {
      double t = i / 5.0;
      Vec3d on_axis = seg.prox_end + t * (seg.dist_end - seg.prox_end);
      pts.push_back(hand_pose.apply(on_axis + finger_radius * inner_dist));
    }
    // Fingertip cap, leading point along the distal direction.
    pts.push_back(hand_pose.apply(
        seg.dist_end + finger_radius * (seg.dist_rot * Vec3d::UnitZ())));
  }
  return out;
}

}  // namespace sqgrasp
