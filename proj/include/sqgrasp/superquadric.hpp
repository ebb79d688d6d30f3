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

#ifndef SQGRASP_SUPERQUADRIC_HPP_
#define SQGRASP_SUPERQUADRIC_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqgrasp/geometry.hpp"

namespace sqgrasp {

inline constexpr double kExponentMin = 0.1;
inline constexpr double kExponentMax = 1.9;

/// Signed power: sign(s) * |s|^e. Covers all octants of the surface
/// equations, which take fractional powers of trigonometric terms.
template <typename Scalar>
Scalar signed_pow(Scalar s, Scalar e) {
  if (s == Scalar(0)) return Scalar(0);
  return std::copysign(std::pow(std::abs(s), e), s);
}

/// Superquadric shape: semi-axes (a, b, c) in meters, shape exponents
/// (e1, e2), and a rigid pose placing the object frame in the world.
template <typename Scalar>
struct Superquadric {
  Scalar a = Scalar(1), b = Scalar(1), c = Scalar(1);
  Scalar e1 = Scalar(1), e2 = Scalar(1);
  RigidTransform<Scalar> pose;

  static Superquadric make(Scalar a, Scalar b, Scalar c, Scalar e1, Scalar e2,
                           const RigidTransform<Scalar>& pose = {}) {
    if (!(a > Scalar(0)) || !(b > Scalar(0)) || !(c > Scalar(0)))
      throw std::invalid_argument("superquadric semi-axes must be positive");
    if (e1 < Scalar(kExponentMin) || e1 > Scalar(kExponentMax) ||
        e2 < Scalar(kExponentMin) || e2 > Scalar(kExponentMax))
      throw std::invalid_argument("superquadric exponents must lie in [0.1, 1.9]");
    return {a, b, c, e1, e2, pose};
  }

  Eigen::Matrix<Scalar, 3, 1> semi_axes() const { return {a, b, c}; }

  /// Radius of a bounding sphere in the object frame (covers the corner
  /// bulge of low exponents).
  Scalar bounding_radius() const {
    return std::sqrt(a * a + b * b + c * c);
  }
};

using Superquadricd = Superquadric<double>;

/// Inside-outside function: < 1 inside, = 1 on the surface, > 1 outside.
/// Point in the object frame; absolute values make it total.
template <typename Scalar>
Scalar implicit_value(const Superquadric<Scalar>& sq,
                      const Eigen::Matrix<Scalar, 3, 1>& p) {
  Scalar x = std::abs(p.x()) / sq.a;
  Scalar y = std::abs(p.y()) / sq.b;
  Scalar z = std::abs(p.z()) / sq.c;
  Scalar u = std::pow(x, Scalar(2) / sq.e2) + std::pow(y, Scalar(2) / sq.e2);
  return std::pow(u, sq.e2 / sq.e1) + std::pow(z, Scalar(2) / sq.e1);
}

/// Gradient of the inside-outside function in the object frame.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> implicit_gradient(
    const Superquadric<Scalar>& sq, const Eigen::Matrix<Scalar, 3, 1>& p) {
  Scalar x = std::abs(p.x()) / sq.a;
  Scalar y = std::abs(p.y()) / sq.b;
  Scalar z = std::abs(p.z()) / sq.c;
  Scalar u = std::pow(x, Scalar(2) / sq.e2) + std::pow(y, Scalar(2) / sq.e2);
  Scalar du = u > Scalar(0) ? std::pow(u, sq.e2 / sq.e1 - Scalar(1)) : Scalar(0);
  Eigen::Matrix<Scalar, 3, 1> g;
  g.x() = (Scalar(2) / (sq.e1 * sq.a)) * du *
          std::pow(x, Scalar(2) / sq.e2 - Scalar(1)) *
          (p.x() >= Scalar(0) ? Scalar(1) : Scalar(-1));
  g.y() = (Scalar(2) / (sq.e1 * sq.b)) * du *
          std::pow(y, Scalar(2) / sq.e2 - Scalar(1)) *
          (p.y() >= Scalar(0) ? Scalar(1) : Scalar(-1));
  g.z() = (Scalar(2) / (sq.e1 * sq.c)) *
          std::pow(z, Scalar(2) / sq.e1 - Scalar(1)) *
          (p.z() >= Scalar(0) ? Scalar(1) : Scalar(-1));
  return g;
}

/// Explicit surface parameterization, eta in (-pi/2, pi/2), omega in
/// (-pi, pi]. Returns the object-frame point and unit outward normal.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, 3, 1>, Eigen::Matrix<Scalar, 3, 1>>
surface_point(const Superquadric<Scalar>& sq, Scalar eta, Scalar omega) {
  Scalar ce = std::cos(eta), se = std::sin(eta);
  Scalar co = std::cos(omega), so = std::sin(omega);
  Eigen::Matrix<Scalar, 3, 1> p(
      sq.a * signed_pow(ce, sq.e1) * signed_pow(co, sq.e2),
      sq.b * signed_pow(ce, sq.e1) * signed_pow(so, sq.e2),
      sq.c * signed_pow(se, sq.e1));
  Eigen::Matrix<Scalar, 3, 1> n(
      signed_pow(ce, Scalar(2) - sq.e1) * signed_pow(co, Scalar(2) - sq.e2) /
          sq.a,
      signed_pow(ce, Scalar(2) - sq.e1) * signed_pow(so, Scalar(2) - sq.e2) /
          sq.b,
      signed_pow(se, Scalar(2) - sq.e1) / sq.c);
  n.normalize();
  return {p, n};
}

/// Local axis (unit x, y, or z) with the smallest semi-extent; ties prefer
/// x, then y, then z.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> smallest_axis(const Superquadric<Scalar>& sq) {
  Scalar extents[3] = {sq.a, sq.b, sq.c};
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (extents[i] < extents[best]) best = i;
  return Eigen::Matrix<Scalar, 3, 1>::Unit(best);
}

/// Same ordering with the smallest axis excluded.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> second_smallest_axis(
    const Superquadric<Scalar>& sq) {
  Scalar extents[3] = {sq.a, sq.b, sq.c};
  int smallest = 0;
  for (int i = 1; i < 3; ++i)
    if (extents[i] < extents[smallest]) smallest = i;
  int best = -1;
  for (int i = 0; i < 3; ++i) {
    if (i == smallest) continue;
    if (best < 0 || extents[i] < extents[best]) best = i;
  }
  return Eigen::Matrix<Scalar, 3, 1>::Unit(best);
}

/// Surface sample: object-frame point, unit normal, surface parameters.
struct SurfaceSample {
  Vec3d point;
  Vec3d normal;
  double eta = 0.0;
  double omega = 0.0;
};

struct SpacingTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evenly spaced surface samples with arc-length adaptive parameter
/// stepping. Nearest-neighbor spacing stays within [0.5, 2] x
/// target_spacing for at least 95% of the samples. Throws SpacingTooLarge
/// when the surface would yield fewer than 8 samples or the spacing is not
/// below min(a, b, c).
std::vector<SurfaceSample> sample_equal_distance(const Superquadricd& sq,
                                                 double target_spacing);

/// Watertight triangle mesh over the parameter grid with pole fans.
struct TriangleMesh {
  std::vector<Vec3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

TriangleMesh to_mesh(const Superquadricd& sq, int resolution);

double mesh_area(const TriangleMesh& mesh);
TriangleMesh transformed(const TriangleMesh& mesh, const Transformd& t);

/// ASCII OBJ with v/f records only.
void write_obj(const TriangleMesh& mesh, const std::string& path);

}  // namespace sqgrasp

#endif  // SQGRASP_SUPERQUADRIC_HPP_
