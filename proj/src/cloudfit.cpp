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

#include "sqgrasp/cloudfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sqgrasp {

namespace {

Vec3d any_unit_orthogonal(const Vec3d& n) {
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[least])) least = i;
  return n.cross(Vec3d::Unit(least)).normalized();
}

}  // namespace

PointCloud render_single_view(const Superquadricd& sq, const Vec3d& viewpoint,
                              double angular_res, double noise_sigma,
                              std::uint64_t rng_seed) {
  if (angular_res <= 0.0)
    throw std::invalid_argument("angular_res must be positive");
  Transformd world_to_obj = sq.pose.inverse();
  if (implicit_value(sq, world_to_obj.apply(viewpoint)) <= 1.0)
    throw std::invalid_argument("viewpoint must lie outside the object");

  Vec3d to_center = sq.pose.translation - viewpoint;
  double dist = to_center.norm();
  Vec3d axis = to_center / dist;
  Vec3d u = any_unit_orthogonal(axis);
  Vec3d v = axis.cross(u);

  double radius = sq.bounding_radius();
  double half_angle = std::asin(std::min(0.999, radius / dist));
  // Fixed-resolution raster: an object narrower than one ray spacing falls
  // between rays.
  if (half_angle < angular_res) throw NoHits("object subtends no rays");
  int half_steps = static_cast<int>(std::ceil(half_angle / angular_res));

  double t_lo = std::max(1e-6, dist - radius * 1.5);
  double t_hi = dist + radius * 1.5;
  constexpr int kMarchSteps = 320;

  PointCloud cloud;
  cloud.viewpoint = viewpoint;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int i = -half_steps; i <= half_steps; ++i) {
    for (int j = -half_steps; j <= half_steps; ++j) {
      double alpha = i * angular_res;
      double beta = j * angular_res;
      Vec3d dir =
          (axis + std::tan(alpha) * u + std::tan(beta) * v).normalized();
      // First implicit-surface crossing along the ray, by march + bisection.
      double prev_t = t_lo;
      double prev_f =
          implicit_value(sq, world_to_obj.apply(viewpoint + prev_t * dir));
      double hit_t = -1.0;
      for (int k = 1; k <= kMarchSteps; ++k) {
        double t = t_lo + (t_hi - t_lo) * k / kMarchSteps;
        double f = implicit_value(sq, world_to_obj.apply(viewpoint + t * dir));
        if (prev_f > 1.0 && f <= 1.0) {
          double lo = prev_t, hi = t;
          for (int b = 0; b < 60; ++b) {
            double mid = 0.5 * (lo + hi);
            double fm =
                implicit_value(sq, world_to_obj.apply(viewpoint + mid * dir));
            (fm > 1.0 ? lo : hi) = mid;
          }
          hit_t = 0.5 * (lo + hi);
          break;
        }
        prev_t = t;
        prev_f = f;
      }
      if (hit_t > 0.0) {
        Vec3d p = viewpoint + hit_t * dir;
        if (noise_sigma > 0.0)
          p += noise_sigma * Vec3d(gauss(rng), gauss(rng), gauss(rng));
        cloud.points.push_back(p);
      }
    }
  }
  if (cloud.points.empty()) throw NoHits("object subtends no rays");
  return cloud;
}

int count_visibility_violations(const PointCloud& cloud,
                                const SymmetryPlane& plane) {
  if (!cloud.viewpoint)
    throw std::invalid_argument("cloud viewpoint required");
  const Vec3d vp = *cloud.viewpoint;
  const Vec3d axis = (cloud.centroid() - vp).normalized();
  const Vec3d u = any_unit_orthogonal(axis);
  const Vec3d v = axis.cross(u);

  // Angular occupancy grid of the observed directions, keeping the nearest
  // observed range per cell.
  struct Angles {
    double tu, tv;
  };
  auto to_angles = [&](const Vec3d& p) {
    Vec3d d = (p - vp).normalized();
    return Angles{std::atan2(d.dot(u), d.dot(axis)),
                  std::atan2(d.dot(v), d.dot(axis))};
  };

  double min_u = 1e9, max_u = -1e9, min_v = 1e9, max_v = -1e9;
  std::vector<Angles> obs(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    obs[i] = to_angles(cloud.points[i]);
    min_u = std::min(min_u, obs[i].tu);
    max_u = std::max(max_u, obs[i].tu);
    min_v = std::min(min_v, obs[i].tv);
    max_v = std::max(max_v, obs[i].tv);
  }
  const int n_bins = std::clamp(
      static_cast<int>(std::sqrt(static_cast<double>(cloud.points.size()))),
      8, 64);
  const double pad = 1e-9;
  const double du = (max_u - min_u + 2 * pad) / n_bins;
  const double dv = (max_v - min_v + 2 * pad) / n_bins;
  std::vector<double> min_range(static_cast<std::size_t>(n_bins) * n_bins,
                                std::numeric_limits<double>::infinity());
  auto bin_of = [&](const Angles& a) -> int {
    int bu = static_cast<int>((a.tu - min_u + pad) / du);
    int bv = static_cast<int>((a.tv - min_v + pad) / dv);
    if (bu < 0 || bu >= n_bins || bv < 0 || bv >= n_bins) return -1;
    return bu * n_bins + bv;
  };
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    int b = bin_of(obs[i]);
    if (b >= 0)
      min_range[b] =
          std::min(min_range[b], (cloud.points[i] - vp).norm());
  }

  // A mirrored point is consistent only when it hides behind observed
  // surface: the sensor scanned every direction around the object, so a
  // point in a direction where nothing was seen (or in front of what was
  // seen) would have been detected.
  constexpr double kSlack = 8e-3;
  int violations = 0;
  for (const auto& p : cloud.points) {
    Vec3d m = plane.reflect(p);
    Angles a = to_angles(m);
    int bu = static_cast<int>((a.tu - min_u + pad) / du);
    int bv = static_cast<int>((a.tv - min_v + pad) / dv);
    double ref = std::numeric_limits<double>::infinity();
    for (int x = bu - 1; x <= bu + 1; ++x) {
      for (int y = bv - 1; y <= bv + 1; ++y) {
        if (x < 0 || x >= n_bins || y < 0 || y >= n_bins) continue;
        ref = std::min(ref, min_range[x * n_bins + y]);
      }
    }
    if (!std::isfinite(ref) || (m - vp).norm() < ref - kSlack) ++violations;
  }
  return violations;
}

std::pair<PointCloud, SymmetryPlane> mirror_cloud(const PointCloud& cloud,
                                                  const Vec3d& table_normal) {
  if (cloud.points.size() < 10)
    throw DegenerateCloud("mirroring needs at least 10 points");
  if (!cloud.viewpoint)
    throw std::invalid_argument("cloud viewpoint required");

  const Vec3d up = table_normal.normalized();
  const Vec3d u0 = any_unit_orthogonal(up);
  const Vec3d centroid = cloud.centroid();
  constexpr int kYawSteps = 36;
  constexpr int kOffsetSteps = 4;

  // Vertical candidate planes: yaw grid for the normal direction, with the
  // plane depth swept from the cloud centroid back to the tangent plane at
  // the cloud's far side. A plane anchored at the visible centroid folds
  // the cloud onto itself and recovers no hidden surface, so among
  // visibility-consistent candidates the one exposing the most new surface
  // wins.
  std::vector<SymmetryPlane> candidates;
  std::vector<double> projs(cloud.points.size());
  for (int k = 0; k < 2 * kYawSteps; ++k) {
    double yaw = M_PI * k / kYawSteps;  // full turn: offsets are one-sided
    Vec3d n = Eigen::AngleAxisd(yaw, up).toRotationMatrix() * u0;
    double centroid_proj = n.dot(centroid);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
      projs[i] = n.dot(cloud.points[i]);
    // Robust far tangent: a high quantile keeps noise outliers from
    // pushing the deepest candidate plane too far back.
    std::size_t q = static_cast<std::size_t>(0.98 * (projs.size() - 1));
    std::nth_element(projs.begin(), projs.begin() + q, projs.end());
    double far_proj = std::max(projs[q], centroid_proj);
    for (int j = 0; j <= kOffsetSteps; ++j) {
      double offset = centroid_proj +
                      (far_proj - centroid_proj) * j / kOffsetSteps;
      candidates.push_back(SymmetryPlane{n, offset});
    }
  }

  std::vector<int> violations(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k)
    violations[k] = count_visibility_violations(cloud, candidates[k]);
  int best_violations =
      *std::min_element(violations.begin(), violations.end());

  // Completion score: mean mirrored-to-original nearest-neighbor distance
  // over a capped subset (larger means more hidden surface recovered).
  auto mean_nn = [&](const SymmetryPlane& plane) {
    const std::size_t stride = std::max<std::size_t>(
        1, cloud.points.size() / 400);
    double total = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < cloud.points.size(); i += stride) {
      Vec3d m = plane.reflect(cloud.points[i]);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cloud.points.size(); j += stride)
        best = std::min(best, (m - cloud.points[j]).squaredNorm());
      total += std::sqrt(best);
      ++count;
    }
    return total / count;
  };

  int best_idx = -1;
  double best_nn = -1.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (violations[k] != best_violations) continue;
    double nn = mean_nn(candidates[k]);
    if (nn > best_nn) {
      best_nn = nn;
      best_idx = static_cast<int>(k);
    }
  }

  const SymmetryPlane& plane = candidates[best_idx];
  PointCloud out;
  out.viewpoint = cloud.viewpoint;
  out.points = cloud.points;
  out.points.reserve(2 * cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(plane.reflect(p));
  return {out, plane};
}

namespace {

struct FitParams {
  double a, b, c, e1, e2;
  Vec3d t;
  Mat3d r;
};

Eigen::VectorXd residuals(const FitParams& fp,
                          const std::vector<Vec3d>& points) {
  Superquadricd sq{fp.a, fp.b, fp.c, fp.e1, fp.e2, {}};
  double reg = std::sqrt(fp.a * fp.b * fp.c);
  Mat3d rt = fp.r.transpose();
  Eigen::VectorXd res(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Vec3d local = rt * (points[i] - fp.t);
    double f = implicit_value(sq, local);
    res[static_cast<int>(i)] = reg * (std::pow(f, fp.e1) - 1.0);
  }
  return res;
}

}  // namespace

FitResult fit_superquadric(const PointCloud& cloud, double exp_min,
                           double exp_max) {
  const auto& pts = cloud.points;
  if (pts.size() < 10)
    throw DegenerateCloud("fitting needs at least 10 points");

  // PCA initialization: bounding-box center, principal axes with the
  // largest-extent direction as local z, inflated half-extents, e = 1.
  Vec3d mean = cloud.centroid();
  Mat3d cov = Mat3d::Zero();
  for (const auto& p : pts) {
    Vec3d d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size());
  Eigen::SelfAdjointEigenSolver<Mat3d> eig(cov);
  if (eig.info() != Eigen::Success)
    throw DegenerateCloud("principal axis estimation failed");
  Vec3d z_axis = eig.eigenvectors().col(2);
  Vec3d x_axis = eig.eigenvectors().col(1);
  Vec3d y_axis = z_axis.cross(x_axis);
  Mat3d r0;
  r0.col(0) = x_axis;
  r0.col(1) = y_axis.normalized();
  r0.col(2) = z_axis;

  Vec3d lo(1e30, 1e30, 1e30), hi(-1e30, -1e30, -1e30);
  for (const auto& p : pts) {
    Vec3d local = r0.transpose() * (p - mean);
    lo = lo.cwiseMin(local);
    hi = hi.cwiseMax(local);
  }
  Vec3d half = 0.5 * (hi - lo);
  if (half.minCoeff() < 1e-9)
    throw DegenerateCloud("cloud is planar or lower-dimensional");

  FitParams fp;
  fp.a = 1.05 * half.x();
  fp.b = 1.05 * half.y();
  fp.c = 1.05 * half.z();
  fp.e1 = 1.0;
  fp.e2 = 1.0;
  fp.r = r0;
  fp.t = mean + r0 * (0.5 * (hi + lo));

  // Physical extent cap from the data: no semi-axis may exceed the cloud's
  // bounding half-diagonal by more than a margin factor, which keeps
  // partial-view fits from escaping into degenerate giant shapes.
  const double extent_cap = 2.0 * half.norm();
  auto clampp = [&](FitParams& p) {
    p.a = std::clamp(p.a, 1e-4, extent_cap);
    p.b = std::clamp(p.b, 1e-4, extent_cap);
    p.c = std::clamp(p.c, 1e-4, extent_cap);
    p.e1 = std::clamp(p.e1, exp_min, exp_max);
    p.e2 = std::clamp(p.e2, exp_min, exp_max);
  };
  clampp(fp);

  auto pack = [](const FitParams& p) {
    Eigen::Matrix<double, 11, 1> v;
    v << p.a, p.b, p.c, p.e1, p.e2, p.t.x(), p.t.y(), p.t.z(), 0, 0, 0;
    return v;
  };
  auto unpack = [&](const FitParams& base,
                    const Eigen::Matrix<double, 11, 1>& v) {
    FitParams p = base;
    p.a = v[0];
    p.b = v[1];
    p.c = v[2];
    p.e1 = v[3];
    p.e2 = v[4];
    p.t = Vec3d(v[5], v[6], v[7]);
    p.r = base.r * rotation_exp<double>(Vec3d(v[8], v[9], v[10]));
    clampp(p);
    return p;
  };

  constexpr int kMaxIterations = 200;
  double lambda = 1e-3;
  Eigen::VectorXd res = residuals(fp, pts);
  double cost = res.squaredNorm();
  if (!std::isfinite(cost)) throw FitDiverged("non-finite initial cost");

  FitResult out;
  out.cost_history.push_back(cost);

  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    // Forward-difference Jacobian about the current estimate (rotation in a
    // local exponential chart, zero at the linearization point).
    Eigen::Matrix<double, 11, 1> x0 = pack(fp);
    Eigen::MatrixXd jac(static_cast<int>(pts.size()), 11);
    for (int k = 0; k < 11; ++k) {
      double h = 1e-6 * std::max(1.0, std::abs(x0[k]));
      Eigen::Matrix<double, 11, 1> xk = x0;
      xk[k] += h;
      Eigen::VectorXd rk = residuals(unpack(fp, xk), pts);
      jac.col(k) = (rk - res) / h;
    }

    Eigen::Matrix<double, 11, 11> jtj = jac.transpose() * jac;
    Eigen::Matrix<double, 11, 1> jtr = jac.transpose() * res;

    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::Matrix<double, 11, 11> damped = jtj;
      for (int k = 0; k < 11; ++k)
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      Eigen::Matrix<double, 11, 1> delta = damped.ldlt().solve(-jtr);
      FitParams trial = unpack(fp, x0 + delta);
      Eigen::VectorXd trial_res = residuals(trial, pts);
      double trial_cost = trial_res.squaredNorm();
      if (!std::isfinite(trial_cost)) throw FitDiverged("non-finite cost");
      if (trial_cost < cost) {
        fp = trial;
        res = trial_res;
        double improvement = cost - trial_cost;
        cost = trial_cost;
        out.cost_history.push_back(cost);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (improvement < 1e-9) iter = kMaxIterations;  // converged
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
  }

  out.sq = Superquadricd::make(fp.a, fp.b, fp.c, fp.e1, fp.e2,
                               Transformd::from_parts(fp.r, fp.t));
  out.residual = cost / static_cast<double>(pts.size());
  out.iterations = static_cast<int>(out.cost_history.size()) - 1;
  return out;
}

}  // namespace sqgrasp
