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

#ifndef SQGRASP_CLOUDFIT_HPP_
#define SQGRASP_CLOUDFIT_HPP_

#include <cstdint>
#include <utility>

#include "sqgrasp/cloud.hpp"
#include "sqgrasp/superquadric.hpp"

namespace sqgrasp {

struct NoHits : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCloud : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FitDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Synthetic single-view scan: casts a regular angular ray grid from the
/// viewpoint, keeps first hits only, then perturbs each hit with isotropic
/// Gaussian noise. Deterministic for a fixed seed.
PointCloud render_single_view(const Superquadricd& sq, const Vec3d& viewpoint,
                              double angular_res, double noise_sigma,
                              std::uint64_t rng_seed);

/// Mirror plane as normal . x = offset.
struct SymmetryPlane {
  Vec3d normal;
  double offset = 0.0;

  Vec3d reflect(const Vec3d& p) const {
    return p - 2.0 * (normal.dot(p) - offset) * normal;
  }
};

/// Number of mirrored points that would sit in front of the observed
/// surface along their view ray (a consistency score; lower is better).
int count_visibility_violations(const PointCloud& cloud,
                                const SymmetryPlane& plane);

/// Completes a single-view cloud by reflecting it across the best vertical
/// symmetry plane through the centroid. Candidate plane yaw is discretized
/// (36 steps over pi); candidates are ranked by visibility violations, ties
/// by mirrored-to-original nearest-neighbor distance. Returns the union
/// cloud and the chosen plane.
std::pair<PointCloud, SymmetryPlane> mirror_cloud(const PointCloud& cloud,
                                                  const Vec3d& table_normal);

struct FitResult {
  Superquadricd sq;
  double residual = 0.0;  // mean per-point squared cost
  int iterations = 0;
  std::vector<double> cost_history;  // accepted total costs, non-increasing
};

/// Recovers shape and pose by damped least squares on the
/// volume-regularized inside-outside residual, initialized from PCA.
FitResult fit_superquadric(const PointCloud& cloud,
                           double exp_min = kExponentMin,
                           double exp_max = kExponentMax);

}  // namespace sqgrasp

#endif  // SQGRASP_CLOUDFIT_HPP_
