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

#include "sqgrasp/superquadric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sqgrasp {

namespace {

// One quadrant of the superellipse (A cos^eps t, B sin^eps t), t in
// [0, pi/2], marched so consecutive points are `spacing` apart in chord
// length. The quadrant arc is convex and monotone in both coordinates, so
// the chord from a fixed parameter grows monotonically and each step can
// be solved by bisection; this handles the parameterization racing through
// corners (eps < 1) and stalling on flats (eps > 1) alike. The final point
// lands exactly on pi/2, with the closing gap folded into the band.
std::vector<double> quadrant_params(double A, double B, double eps,
                                    double spacing) {
  const double half = M_PI / 2.0;
  auto point = [&](double t) {
    return Eigen::Vector2d(A * signed_pow(std::cos(t), eps),
                           B * signed_pow(std::sin(t), eps));
  };
  auto chord = [&](double t0, double t1) {
    return (point(t1) - point(t0)).norm();
  };

  std::vector<double> params{0.0};
  double t = 0.0;
  for (int guard = 0; guard < 100000; ++guard) {
    double remaining = chord(t, half);
    if (remaining <= 1.5 * spacing) {
      if (remaining < 0.5 * spacing && params.size() >= 2) params.pop_back();
      break;
    }
    double lo = 0.0, hi = half - t;
    for (int i = 0; i < 50; ++i) {
      double mid = 0.5 * (lo + hi);
      (chord(t, t + mid) < spacing ? lo : hi) = mid;
    }
    t += 0.5 * (lo + hi);
    params.push_back(t);
  }
  params.push_back(half);
  return params;
}

// Mirror a quadrant list [0, .., pi/2] to the full circle (-pi, pi].
std::vector<double> full_circle(const std::vector<double>& q) {
  std::vector<double> out;
  const std::size_t m = q.size() - 1;  // q[m] == pi/2
  out.reserve(4 * m);
  for (std::size_t j = 0; j <= m; ++j) out.push_back(q[j]);
  for (std::size_t j = m; j-- > 0;) out.push_back(M_PI - q[j]);
  for (std::size_t j = 1; j < m; ++j) out.push_back(q[j] - M_PI);
  for (std::size_t j = m; j >= 1; --j) out.push_back(-q[j]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<SurfaceSample> sample_equal_distance(const Superquadricd& sq,
                                                 double target_spacing) {
  const double min_axis = std::min({sq.a, sq.b, sq.c});
  if (!(target_spacing > 0.0))
    throw std::invalid_argument("target_spacing must be positive");
  if (target_spacing >= min_axis)
    throw SpacingTooLarge("target_spacing must be below min(a, b, c)");

  // Meridian march at the tightest ring radius: rings then never get closer
  // than the spacing at any meridian, and in-ring chords keep the
  // nearest-neighbor distance at the target elsewhere.
  double rho_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 64; ++i) {
    double omega = (M_PI / 2.0) * i / 64.0;
    Vec3d e(sq.a * signed_pow(std::cos(omega), sq.e2),
            sq.b * signed_pow(std::sin(omega), sq.e2), 0.0);
    rho_min = std::min(rho_min, e.norm());
  }

  std::vector<double> eta_quadrant =
      quadrant_params(rho_min, sq.c, sq.e1, target_spacing);

  std::vector<double> etas;
  for (std::size_t j = eta_quadrant.size(); j-- > 1;)
    etas.push_back(-eta_quadrant[j]);
  for (double v : eta_quadrant) etas.push_back(v);

  std::vector<SurfaceSample> samples;
  for (double eta : etas) {
    if (std::abs(std::abs(eta) - M_PI / 2.0) < 1e-12) {
      SurfaceSample pole;
      pole.point = Vec3d(0.0, 0.0, eta > 0 ? sq.c : -sq.c);
      pole.normal = Vec3d(0.0, 0.0, eta > 0 ? 1.0 : -1.0);
      pole.eta = eta;
      pole.omega = 0.0;
      samples.push_back(pole);
      continue;
    }
    double shrink = std::pow(std::abs(std::cos(eta)), sq.e1);
    double ring_a = sq.a * shrink, ring_b = sq.b * shrink;
    if (std::max(ring_a, ring_b) < 0.2 * target_spacing) continue;
    std::vector<double> omegas = full_circle(
        quadrant_params(ring_a, ring_b, sq.e2, target_spacing));
    for (double omega : omegas) {
      auto [p, n] = surface_point(sq, eta, omega);
      samples.push_back({p, n, eta, omega});
    }
  }

  if (samples.size() < 8)
    throw SpacingTooLarge("spacing yields fewer than 8 samples");
  return samples;
}

TriangleMesh to_mesh(const Superquadricd& sq, int resolution) {
  if (resolution < 8) throw std::invalid_argument("mesh resolution must be >= 8");
  TriangleMesh mesh;
  const int res = resolution;
  mesh.vertices.reserve(2 + (res - 1) * res);
  mesh.vertices.push_back(Vec3d(0.0, 0.0, -sq.c));  // south pole
  for (int k = 1; k < res; ++k) {
    double eta = -M_PI / 2.0 + M_PI * k / res;
    for (int j = 0; j < res; ++j) {
      double omega = -M_PI + 2.0 * M_PI * j / res;
      mesh.vertices.push_back(surface_point(sq, eta, omega).first);
    }
  }
  mesh.vertices.push_back(Vec3d(0.0, 0.0, sq.c));  // north pole

  auto ring_vertex = [&](int k, int j) { return 1 + (k - 1) * res + (j % res); };
  const int north = static_cast<int>(mesh.vertices.size()) - 1;

  for (int j = 0; j < res; ++j)
    mesh.faces.push_back({0, ring_vertex(1, j + 1), ring_vertex(1, j)});
  for (int k = 1; k < res - 1; ++k) {
    for (int j = 0; j < res; ++j) {
      int a = ring_vertex(k, j), b = ring_vertex(k, j + 1);
      int c = ring_vertex(k + 1, j + 1), d = ring_vertex(k + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  for (int j = 0; j < res; ++j)
    mesh.faces.push_back({north, ring_vertex(res - 1, j), ring_vertex(res - 1, j + 1)});
  return mesh;
}

double mesh_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3d& a = mesh.vertices[f[0]];
    const Vec3d& b = mesh.vertices[f[1]];
    const Vec3d& c = mesh.vertices[f[2]];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Transformd& t) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

void write_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char line[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << line;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(line, sizeof(line), "f %d %d %d\n", f[0] + 1, f[1] + 1,
                  f[2] + 1);
    out << line;
  }
}

}  // namespace sqgrasp
