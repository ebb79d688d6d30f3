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

#include "sqgrasp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqgrasp {

Primitive Primitive::box(const Transformd& pose, const Vec3d& half_extents) {
  if ((half_extents.array() <= 0.0).any())
    throw std::invalid_argument("box half-extents must be positive");
  Primitive p;
  p.kind = PrimitiveKind::kBox;
  p.pose = pose;
  p.half_extents = half_extents;
  return p;
}

Primitive Primitive::sphere(const Vec3d& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
  Primitive p;
  p.kind = PrimitiveKind::kSphere;
  p.pose = Transformd::translate(center);
  p.radius = radius;
  return p;
}

Primitive Primitive::capsule(const Transformd& pose, double radius,
                             double half_length) {
  if (radius <= 0.0 || half_length < 0.0)
    throw std::invalid_argument("capsule dimensions must be positive");
  Primitive p;
  p.kind = PrimitiveKind::kCapsule;
  p.pose = pose;
  p.radius = radius;
  p.half_length = half_length;
  return p;
}

Primitive Primitive::capsule_between(const Vec3d& p0, const Vec3d& p1,
                                     double radius) {
  Vec3d mid = 0.5 * (p0 + p1);
  Vec3d d = p1 - p0;
  double len = d.norm();
  Mat3d r = Mat3d::Identity();
  if (len > 1e-12) {
    Vec3d z = d / len;
    // Any frame whose z axis is the segment direction.
    Vec3d ref = std::abs(z.z()) < 0.9 ? Vec3d::UnitZ() : Vec3d::UnitX();
    Vec3d x = ref.cross(z).normalized();
    Vec3d y = z.cross(x);
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
  }
  return capsule(Transformd::from_parts(r, mid), radius, 0.5 * len);
}

std::pair<Vec3d, Vec3d> Primitive::segment() const {
  Vec3d axis = pose.rotation.col(2) * half_length;
  return {pose.translation - axis, pose.translation + axis};
}

double Primitive::bounding_radius() const {
  switch (kind) {
    case PrimitiveKind::kBox:
      return half_extents.norm();
    case PrimitiveKind::kSphere:
      return radius;
    case PrimitiveKind::kCapsule:
      return half_length + radius;
  }
  return 0.0;
}

double point_segment_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b) {
  Vec3d ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 < 1e-24) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest distance between two segments (Ericson, Real-Time Collision
// Detection, 5.1.9).
double segment_segment_distance(const Vec3d& p0, const Vec3d& p1,
                                const Vec3d& q0, const Vec3d& q1) {
  Vec3d d1 = p1 - p0;
  Vec3d d2 = q1 - q0;
  Vec3d r = p0 - q0;
  double a = d1.squaredNorm();
  double e = d2.squaredNorm();
  double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  constexpr double kEps = 1e-24;
  if (a <= kEps && e <= kEps) {
    return r.norm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = d1.dot(d2);
      double denom = a * e - b * b;
      if (denom > kEps)
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  Vec3d cp = p0 + s * d1;
  Vec3d cq = q0 + t * d2;
  return (cp - cq).norm();
}

double point_box_signed(const Vec3d& p, const Vec3d& h) {
  Vec3d q = p.cwiseAbs() - h;
  if ((q.array() > 0.0).any()) {
    return q.cwiseMax(0.0).norm();
  }
  return q.maxCoeff();  // negative: depth to the nearest face
}

namespace {

double sphere_sphere(const Primitive& a, const Primitive& b) {
  return (a.pose.translation - b.pose.translation).norm() - a.radius - b.radius;
}

double sphere_capsule(const Primitive& s, const Primitive& c) {
  auto [c0, c1] = c.segment();
  return point_segment_distance(s.pose.translation, c0, c1) - s.radius -
         c.radius;
}

double capsule_capsule(const Primitive& a, const Primitive& b) {
  auto [a0, a1] = a.segment();
  auto [b0, b1] = b.segment();
  return segment_segment_distance(a0, a1, b0, b1) - a.radius - b.radius;
}

double sphere_box(const Primitive& s, const Primitive& b) {
  Vec3d local = b.pose.inverse().apply(s.pose.translation);
  return point_box_signed(local, b.half_extents) - s.radius;
}

// Min over the capsule segment of the signed point-box distance. The
// unsigned part is convex in the segment parameter, so a ternary search is
// exact; inside the box a dense scan plus local refinement approximates the
// deepest penetration.
double capsule_box(const Primitive& c, const Primitive& b) {
  Transformd world_to_box = b.pose.inverse();
  auto [w0, w1] = c.segment();
  Vec3d a0 = world_to_box.apply(w0);
  Vec3d a1 = world_to_box.apply(w1);
  auto signed_at = [&](double t) {
    return point_box_signed(a0 + t * (a1 - a0), b.half_extents);
  };
  auto unsigned_at = [&](double t) { return std::max(signed_at(t), 0.0); };

  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (unsigned_at(m1) <= unsigned_at(m2))
      hi = m2;
    else
      lo = m1;
  }
  double t_min = 0.5 * (lo + hi);
  double best = std::min({signed_at(t_min), signed_at(0.0), signed_at(1.0)});
  if (best > 0.0) return best - c.radius;

  // Penetrating: scan for the deepest point, then refine around it.
  constexpr int kScan = 128;
  double t_best = t_min;
  for (int i = 0; i <= kScan; ++i) {
    double t = static_cast<double>(i) / kScan;
    double d = signed_at(t);
    if (d < best) {
      best = d;
      t_best = t;
    }
  }
  double span = 1.0 / kScan;
  double l = std::max(0.0, t_best - span), r = std::min(1.0, t_best + span);
  for (int i = 0; i < 60; ++i) {
    double m1 = l + (r - l) / 3.0;
    double m2 = r - (r - l) / 3.0;
    if (signed_at(m1) <= signed_at(m2))
      r = m2;
    else
      l = m1;
  }
  best = std::min(best, signed_at(0.5 * (l + r)));
  return best - c.radius;
}

// Separating-axis test over the 15 candidate axes. Separated: the largest
// axis gap, a lower bound of the true distance. Overlapping: minus the
// smallest axis overlap.
double box_box(const Primitive& a, const Primitive& b) {
  Mat3d ra = a.pose.rotation, rb = b.pose.rotation;
  Mat3d r = ra.transpose() * rb;  // b axes in a frame
  Vec3d t = ra.transpose() * (b.pose.translation - a.pose.translation);
  const Vec3d& ha = a.half_extents;
  const Vec3d& hb = b.half_extents;

  double max_gap = -std::numeric_limits<double>::infinity();
  double min_overlap = std::numeric_limits<double>::infinity();
  bool separated = false;

  auto test_axis = [&](const Vec3d& axis) {
    double len = axis.norm();
    if (len < 1e-9) return;  // near-parallel edge cross product
    Vec3d u = axis / len;
    double proj_a = ha.cwiseProduct(u.cwiseAbs()).sum();
    double proj_b = (r.transpose() * u).cwiseAbs().cwiseProduct(hb).sum();
    double dist = std::abs(t.dot(u));
    double gap = dist - proj_a - proj_b;
    if (gap > 0.0) {
      separated = true;
      max_gap = std::max(max_gap, gap);
    } else {
      min_overlap = std::min(min_overlap, -gap);
    }
  };

  for (int i = 0; i < 3; ++i) test_axis(Vec3d::Unit(i));
  for (int i = 0; i < 3; ++i) test_axis(r.col(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) test_axis(Vec3d::Unit(i).cross(r.col(j)));

  return separated ? max_gap : -min_overlap;
}

}  // namespace

double primitive_distance(const Primitive& p, const Primitive& q) {
  using K = PrimitiveKind;
  // Normalize operand order so the result is exactly symmetric.
  if (static_cast<int>(p.kind) > static_cast<int>(q.kind))
    return primitive_distance(q, p);
  if (p.kind == K::kBox && q.kind == K::kBox) return box_box(p, q);
  if (p.kind == K::kBox && q.kind == K::kSphere) return sphere_box(q, p);
  if (p.kind == K::kBox && q.kind == K::kCapsule) return capsule_box(q, p);
  if (p.kind == K::kSphere && q.kind == K::kSphere) return sphere_sphere(p, q);
  if (p.kind == K::kSphere && q.kind == K::kCapsule)
    return sphere_capsule(p, q);
  return capsule_capsule(p, q);
}

std::vector<Vec3d> Primitive::surface_points(int min_count) const {
  std::vector<Vec3d> pts;
  switch (kind) {
    case PrimitiveKind::kSphere:
    case PrimitiveKind::kCapsule: {
      // Fibonacci lattice on the sphere; capsules split it into two caps
      // shifted along the axis plus rings on the cylindrical body.
      int n = std::max(min_count, 32);
      pts.reserve(n + 8);
      const double golden = M_PI * (3.0 - std::sqrt(5.0));
      if (kind == PrimitiveKind::kSphere || half_length < 1e-12) {
        for (int i = 0; i < n; ++i) {
          double z = 1.0 - 2.0 * (i + 0.5) / n;
          double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          double phi = golden * i;
          Vec3d local(radius * rho * std::cos(phi),
                      radius * rho * std::sin(phi), radius * z);
          if (kind == PrimitiveKind::kCapsule)
            local.z() += (z >= 0.0 ? half_length : -half_length);
          pts.push_back(pose.apply(local));
        }
      } else {
        double cap_area = 4.0 * M_PI * radius * radius;
        double body_area = 2.0 * M_PI * radius * 2.0 * half_length;
        int n_cap = std::max(
            16, static_cast<int>(n * cap_area / (cap_area + body_area)));
        int n_body = std::max(16, n - n_cap);
        for (int i = 0; i < n_cap; ++i) {
          double z = 1.0 - 2.0 * (i + 0.5) / n_cap;
          double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          double phi = golden * i;
          Vec3d local(radius * rho * std::cos(phi),
                      radius * rho * std::sin(phi),
                      radius * z + (z >= 0.0 ? half_length : -half_length));
          pts.push_back(pose.apply(local));
        }
        int n_ring = 12;
        int n_rows = std::max(2, (n_body + n_ring - 1) / n_ring);
        for (int i = 0; i < n_rows; ++i) {
          double z = -half_length + 2.0 * half_length * (i + 0.5) / n_rows;
          for (int j = 0; j < n_ring; ++j) {
            double phi = 2.0 * M_PI * j / n_ring + 0.25 * i;
            pts.push_back(pose.apply(
                Vec3d(radius * std::cos(phi), radius * std::sin(phi), z)));
          }
        }
      }
      break;
    }
    case PrimitiveKind::kBox: {
      double areas[3] = {half_extents.y() * half_extents.z(),
                         half_extents.x() * half_extents.z(),
                         half_extents.x() * half_extents.y()};
      double total = 2.0 * (areas[0] + areas[1] + areas[2]);
      for (int axis = 0; axis < 3; ++axis) {
        int n_face = std::max(
            4, static_cast<int>(std::ceil(min_count * areas[axis] / total)));
        int n_side = std::max(2, static_cast<int>(std::ceil(std::sqrt(
                                     static_cast<double>(n_face)))));
        int u = (axis + 1) % 3, v = (axis + 2) % 3;
        for (int sign = -1; sign <= 1; sign += 2) {
          for (int i = 0; i < n_side; ++i) {
            for (int j = 0; j < n_side; ++j) {
              Vec3d local = Vec3d::Zero();
              local[axis] = sign * half_extents[axis];
              local[u] = (-1.0 + 2.0 * (i + 0.5) / n_side) * half_extents[u];
              local[v] = (-1.0 + 2.0 * (j + 0.5) / n_side) * half_extents[v];
              pts.push_back(pose.apply(local));
            }
          }
        }
      }
      // Corners are the extreme points; include them explicitly.
      for (int i = 0; i < 8; ++i) {
        Vec3d corner(((i & 1) ? 1 : -1) * half_extents.x(),
                     ((i & 2) ? 1 : -1) * half_extents.y(),
                     ((i & 4) ? 1 : -1) * half_extents.z());
        pts.push_back(pose.apply(corner));
      }
      break;
    }
  }
  return pts;
}

}  // namespace sqgrasp
