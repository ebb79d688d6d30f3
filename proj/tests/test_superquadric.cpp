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

#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <set>

#include "sqgrasp/superquadric.hpp"

using namespace sqgrasp;

namespace {

// Straight-line re-evaluation of the explicit surface equations, kept
// independent of the library path.
Vec3d oracle_surface_point(double a, double b, double c, double e1, double e2,
                           double eta, double omega) {
  auto sp = [](double s, double e) {
    return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), e), s);
  };
  return Vec3d(a * sp(std::cos(eta), e1) * sp(std::cos(omega), e2),
               b * sp(std::cos(eta), e1) * sp(std::sin(omega), e2),
               c * sp(std::sin(eta), e1));
}

double nearest_neighbor(const std::vector<SurfaceSample>& samples,
                        std::size_t i) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (j == i) continue;
    best = std::min(best, (samples[i].point - samples[j].point).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("implicit value of a sphere") {
  auto sq = Superquadricd::make(1, 1, 1, 1, 1);
  CHECK(implicit_value(sq, Vec3d(0, 0, 0)) == doctest::Approx(0.0));
  CHECK(implicit_value(sq, Vec3d(1, 0, 0)) == doctest::Approx(1.0));
  CHECK(implicit_value(sq, Vec3d(2, 0, 0)) == doctest::Approx(4.0));
  // Reduces to x^2 + y^2 + z^2 for unit exponents.
  CHECK(implicit_value(sq, Vec3d(0.3, -0.4, 0.5)) ==
        doctest::Approx(0.09 + 0.16 + 0.25));
}

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(Superquadricd::make(0, 1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Superquadricd::make(1, 1, 1, 0.05, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(Superquadricd::make(1, 1, 1, 1, 2.5), std::invalid_argument);
}

TEST_CASE("surface point examples") {
  auto sphere = Superquadricd::make(1, 1, 1, 1, 1);
  auto [p, n] = surface_point(sphere, 0.0, 0.0);
  CHECK((p - Vec3d(1, 0, 0)).norm() < 1e-12);
  CHECK((n - Vec3d(1, 0, 0)).norm() < 1e-12);

  // Box-like shape; expected value frozen from the oracle evaluation.
  auto boxy = Superquadricd::make(1, 1, 1, 0.1, 0.1);
  auto [pb, nb] = surface_point(boxy, 0.0, M_PI / 4.0);
  Vec3d expected = oracle_surface_point(1, 1, 1, 0.1, 0.1, 0.0, M_PI / 4.0);
  CHECK((pb - expected).norm() < 1e-12);
  CHECK(pb.x() == doctest::Approx(0.9659363289248456));
  CHECK(pb.y() == doctest::Approx(0.9659363289248456));
  CHECK(pb.z() == doctest::Approx(0.0));

  auto cyl = Superquadricd::make(0.05, 0.05, 0.1, 0.1, 1.0);
  auto [pc, nc] = surface_point(cyl, 0.0, M_PI / 2.0);
  CHECK((pc - Vec3d(0, 0.05, 0)).norm() < 1e-12);
  CHECK((nc - Vec3d(0, 1, 0)).norm() < 1e-9);
}

TEST_CASE("surface points satisfy the implicit equation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ue(0.1, 1.9);
  std::uniform_real_distribution<double> ua(0.02, 0.3);
  std::uniform_real_distribution<double> ueta(-M_PI / 2 + 0.01,
                                              M_PI / 2 - 0.01);
  std::uniform_real_distribution<double> uomega(-M_PI + 0.01, M_PI);
  for (int trial = 0; trial < 300; ++trial) {
    auto sq = Superquadricd::make(ua(rng), ua(rng), ua(rng), ue(rng), ue(rng));
    auto [p, n] = surface_point(sq, ueta(rng), uomega(rng));
    CHECK(std::abs(implicit_value(sq, p) - 1.0) < 1e-9);
    CHECK(std::abs(n.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("normals agree with the implicit gradient") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ue(0.2, 1.8);
  std::uniform_real_distribution<double> ua(0.05, 0.3);
  std::uniform_real_distribution<double> ueta(-1.2, 1.2);
  std::uniform_real_distribution<double> uomega(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto sq = Superquadricd::make(ua(rng), ua(rng), ua(rng), ue(rng), ue(rng));
    double eta = ueta(rng), omega = uomega(rng);
    // Keep away from the coordinate planes where the gradient direction is
    // only one-sided continuous.
    if (std::abs(eta) < 0.05 || std::abs(omega) < 0.05 ||
        std::abs(std::abs(omega) - M_PI / 2) < 0.05 ||
        std::abs(std::abs(omega) - M_PI) < 0.05)
      continue;
    auto [p, n] = surface_point(sq, eta, omega);
    Vec3d g = implicit_gradient(sq, p).normalized();
    double angle = std::acos(std::clamp(n.dot(g), -1.0, 1.0));
    CHECK(angle < 1e-6);
  }
}

TEST_CASE("normals agree with finite differences of the implicit value") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ue(0.3, 1.7);
  std::uniform_real_distribution<double> ua(0.05, 0.3);
  std::uniform_real_distribution<double> ueta(0.1, 1.2);
  std::uniform_real_distribution<double> uomega(0.1, 1.4);
  for (int trial = 0; trial < 100; ++trial) {
    auto sq = Superquadricd::make(ua(rng), ua(rng), ua(rng), ue(rng), ue(rng));
    auto [p, n] = surface_point(sq, ueta(rng), uomega(rng));
    const double h = 1e-7;
    Vec3d fd;
    for (int k = 0; k < 3; ++k) {
      Vec3d dp = Vec3d::Zero();
      dp[k] = h;
      fd[k] = (implicit_value(sq, Vec3d(p + dp)) -
               implicit_value(sq, Vec3d(p - dp))) /
              (2 * h);
    }
    fd.normalize();
    double angle = std::acos(std::clamp(n.dot(fd), -1.0, 1.0));
    CHECK(angle < 1e-4);
  }
}

TEST_CASE("scaling the semi-axes scales surface points") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ue(0.2, 1.8);
  std::uniform_real_distribution<double> ueta(-1.3, 1.3);
  std::uniform_real_distribution<double> uomega(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    double e1 = ue(rng), e2 = ue(rng);
    double s = 2.5;
    auto sq = Superquadricd::make(0.05, 0.08, 0.12, e1, e2);
    auto scaled =
        Superquadricd::make(s * 0.05, s * 0.08, s * 0.12, e1, e2);
    double eta = ueta(rng), omega = uomega(rng);
    auto [p1, n1] = surface_point(sq, eta, omega);
    auto [p2, n2] = surface_point(scaled, eta, omega);
    CHECK((p2 - s * p1).norm() < 1e-12);
    // Normal direction recomputed from the 1/a weights, not closed form.
    Vec3d expect_n(n1.x() / s, n1.y() / s, n1.z() / s);
    expect_n.normalize();
    CHECK((n2 - expect_n).norm() < 1e-9);
  }
}

TEST_CASE("smallest axis selection and tie-break") {
  CHECK(smallest_axis(Superquadricd::make(0.03, 0.1, 0.2, 1, 1)) ==
        Vec3d::UnitX());
  CHECK(smallest_axis(Superquadricd::make(0.1, 0.05, 0.2, 1, 1)) ==
        Vec3d::UnitY());
  CHECK(smallest_axis(Superquadricd::make(0.1, 0.1, 0.1, 1, 1)) ==
        Vec3d::UnitX());
  CHECK(second_smallest_axis(Superquadricd::make(0.03, 0.1, 0.2, 1, 1)) ==
        Vec3d::UnitY());
  CHECK(second_smallest_axis(Superquadricd::make(0.1, 0.1, 0.1, 1, 1)) ==
        Vec3d::UnitY());
}

TEST_CASE("equal-distance sampling meets the spacing contract") {
  auto sphere = Superquadricd::make(1, 1, 1, 1, 1);
  auto samples = sample_equal_distance(sphere, 0.5);
  // Area-based estimate: 4*pi / 0.5^2 ~ 50 samples.
  CHECK(samples.size() >= 30);
  CHECK(samples.size() <= 80);

  int in_band = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double nn = nearest_neighbor(samples, i);
    if (nn >= 0.25 && nn <= 1.0) ++in_band;
  }
  CHECK(in_band >= static_cast<int>(0.95 * samples.size()));
}

TEST_CASE("sampling stays in band for varied shapes") {
  struct Shape {
    double a, b, c, e1, e2, spacing;
  };
  const Shape shapes[] = {
      {0.04, 0.04, 0.10, 0.1, 1.0, 0.015},
      {0.03, 0.10, 0.20, 0.1, 0.1, 0.02},
      {0.06, 0.05, 0.04, 1.9, 1.9, 0.015},
      {0.05, 0.08, 0.12, 0.5, 1.5, 0.02},
  };
  for (const auto& s : shapes) {
    auto sq = Superquadricd::make(s.a, s.b, s.c, s.e1, s.e2);
    auto samples = sample_equal_distance(sq, s.spacing);
    REQUIRE(samples.size() >= 8);
    int in_band = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double nn = nearest_neighbor(samples, i);
      if (nn >= 0.5 * s.spacing && nn <= 2.0 * s.spacing) ++in_band;
      CHECK(std::abs(samples[i].normal.norm() - 1.0) < 1e-9);
      CHECK(std::abs(implicit_value(sq, samples[i].point) - 1.0) < 1e-6);
    }
    CHECK(in_band >= static_cast<int>(0.95 * samples.size()));
  }
}

TEST_CASE("sampling is deterministic and validates spacing") {
  auto sq = Superquadricd::make(0.04, 0.04, 0.1, 0.3, 1.0);
  auto s1 = sample_equal_distance(sq, 0.015);
  auto s2 = sample_equal_distance(sq, 0.015);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK((s1[i].point - s2[i].point).norm() == 0.0);
    CHECK(s1[i].eta == s2[i].eta);
    CHECK(s1[i].omega == s2[i].omega);
  }
  CHECK_THROWS_AS(sample_equal_distance(sq, 0.05), SpacingTooLarge);
  CHECK_THROWS_AS(sample_equal_distance(sq, -1.0), std::invalid_argument);
}

TEST_CASE("mesh vertices lie on the surface and the mesh is closed") {
  auto sphere = Superquadricd::make(1, 1, 1, 1, 1);
  auto mesh = to_mesh(sphere, 16);
  for (const auto& v : mesh.vertices)
    CHECK(std::abs(v.norm() - 1.0) < 1e-9);

  // Euler characteristic of a closed genus-0 triangulation.
  auto check_euler = [](const TriangleMesh& m) {
    std::set<std::pair<int, int>> edges;
    for (const auto& f : m.faces) {
      for (int k = 0; k < 3; ++k) {
        int a = f[k], b = f[(k + 1) % 3];
        edges.insert({std::min(a, b), std::max(a, b)});
      }
    }
    return static_cast<long>(m.vertices.size()) -
           static_cast<long>(edges.size()) + static_cast<long>(m.faces.size());
  };
  CHECK(check_euler(mesh) == 2);
  auto boxy = Superquadricd::make(0.03, 0.05, 0.1, 0.2, 0.4);
  CHECK(check_euler(to_mesh(boxy, 9)) == 2);
}

TEST_CASE("sphere mesh area approaches the analytic value") {
  auto sphere = Superquadricd::make(1, 1, 1, 1, 1);
  double area = mesh_area(to_mesh(sphere, 64));
  CHECK(std::abs(area - 4.0 * M_PI) / (4.0 * M_PI) < 0.02);
}

TEST_CASE("obj export holds v and f records only") {
  auto sq = Superquadricd::make(0.05, 0.05, 0.08, 0.8, 1.2);
  auto mesh = to_mesh(sq, 8);
  std::string path = "/tmp/sqgrasp_test_mesh.obj";
  write_obj(mesh, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::size_t v = 0, f = 0;
  while (std::getline(in, line)) {
    REQUIRE(!line.empty());
    if (line[0] == 'v') ++v;
    else if (line[0] == 'f') ++f;
    else FAIL("unexpected obj record: ", line);
  }
  CHECK(v == mesh.vertices.size());
  CHECK(f == mesh.faces.size());
}
