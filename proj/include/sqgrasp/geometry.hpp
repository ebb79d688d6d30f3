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

#ifndef SQGRASP_GEOMETRY_HPP_
#define SQGRASP_GEOMETRY_HPP_

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace sqgrasp {

/// Rigid-body transform: rotation matrix plus translation, all lengths in
/// meters and angles in radians. Applies to points expressed in the child
/// frame and yields coordinates in the parent frame.
template <typename Scalar>
struct RigidTransform {
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  static RigidTransform from_parts(const Mat3& r, const Vec3& t) {
    return {r, t};
  }

  static RigidTransform translate(const Vec3& t) {
    return {Mat3::Identity(), t};
  }

  static RigidTransform rot_x(Scalar angle) {
    return {Eigen::AngleAxis<Scalar>(angle, Vec3::UnitX()).toRotationMatrix(),
            Vec3::Zero()};
  }
  static RigidTransform rot_y(Scalar angle) {
    return {Eigen::AngleAxis<Scalar>(angle, Vec3::UnitY()).toRotationMatrix(),
            Vec3::Zero()};
  }
  static RigidTransform rot_z(Scalar angle) {
    return {Eigen::AngleAxis<Scalar>(angle, Vec3::UnitZ()).toRotationMatrix(),
            Vec3::Zero()};
  }

  static RigidTransform from_axis_angle(const Vec3& axis, Scalar angle) {
    return {Eigen::AngleAxis<Scalar>(angle, axis.normalized())
                .toRotationMatrix(),
            Vec3::Zero()};
  }

  /// Quaternions are an I/O-boundary representation; normalized on entry.
  static RigidTransform from_quaternion(const Vec3& t,
                                        const Eigen::Quaternion<Scalar>& q) {
    return {q.normalized().toRotationMatrix(), t};
  }

  Eigen::Quaternion<Scalar> quaternion() const {
    Eigen::Quaternion<Scalar> q(rotation);
    q.normalize();
    // Canonical sign so serialization is reproducible.
    if (q.w() < Scalar(0) ||
        (q.w() == Scalar(0) &&
         (q.x() < Scalar(0) ||
          (q.x() == Scalar(0) &&
           (q.y() < Scalar(0) || (q.y() == Scalar(0) && q.z() < Scalar(0))))))) {
      q.coeffs() = -q.coeffs();
    }
    return q;
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Rigid composition: (a * b) maps b-frame coordinates through b then a.
  friend RigidTransform operator*(const RigidTransform& a,
                                  const RigidTransform& b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }

  bool is_valid(Scalar tol = Scalar(1e-9)) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - Scalar(1)) <= tol;
  }
};

using Transformd = RigidTransform<double>;
using Vec3d = Eigen::Vector3d;
using Mat3d = Eigen::Matrix3d;

/// Exponential map so(3) -> SO(3); small-angle safe.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> rotation_exp(
    const Eigen::Matrix<Scalar, 3, 1>& w) {
  Scalar angle = w.norm();
  if (angle < Scalar(1e-12)) {
    Eigen::Matrix<Scalar, 3, 3> r = Eigen::Matrix<Scalar, 3, 3>::Identity();
    r(0, 1) = -w.z(); r(1, 0) = w.z();
    r(0, 2) = w.y();  r(2, 0) = -w.y();
    r(1, 2) = -w.x(); r(2, 1) = w.x();
    return r;
  }
  return Eigen::AngleAxis<Scalar>(angle, w / angle).toRotationMatrix();
}

/// Logarithm SO(3) -> so(3) as a rotation vector.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> rotation_log(
    const Eigen::Matrix<Scalar, 3, 3>& r) {
  Eigen::AngleAxis<Scalar> aa(r);
  return aa.axis() * aa.angle();
}

enum class PrimitiveKind { kBox, kSphere, kCapsule };

/// Convex collision primitive. Boxes carry half-extents, spheres a radius,
/// capsules a radius plus half-length with the axis along local z.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kSphere;
  Transformd pose;
  Vec3d half_extents = Vec3d::Zero();  // box
  double radius = 0.0;                 // sphere, capsule
  double half_length = 0.0;            // capsule

  static Primitive box(const Transformd& pose, const Vec3d& half_extents);
  static Primitive sphere(const Vec3d& center, double radius);
  static Primitive capsule(const Transformd& pose, double radius,
                           double half_length);
  /// Capsule through two world points.
  static Primitive capsule_between(const Vec3d& p0, const Vec3d& p1,
                                   double radius);

  /// World-frame capsule segment endpoints (coincident for spheres).
  std::pair<Vec3d, Vec3d> segment() const;

  /// Radius of a bounding sphere centered at the pose origin.
  double bounding_radius() const;

  /// Deterministic surface point set in world frame, at least min_count
  /// points, used for point-containment collision queries.
  std::vector<Vec3d> surface_points(int min_count) const;
};

/// Signed distance between primitives: positive gap when separated,
/// <= 0 when touching or penetrating. Exact for sphere/capsule pairs and
/// sphere-box; pairs involving a box and a segment are conservative (the
/// returned value never exceeds the true signed distance by more than the
/// seam-sampling resolution, and the separated/contact sign is exact).
double primitive_distance(const Primitive& p, const Primitive& q);

/// Distance helpers shared with the collision module.
double point_segment_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b);
double segment_segment_distance(const Vec3d& p0, const Vec3d& p1,
                                const Vec3d& q0, const Vec3d& q1);
/// Signed point-box distance in the box frame (negative inside).
double point_box_signed(const Vec3d& p_box, const Vec3d& half_extents);

}  // namespace sqgrasp

#endif  // SQGRASP_GEOMETRY_HPP_
