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

#ifndef SQGRASP_CLOUD_HPP_
#define SQGRASP_CLOUD_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqgrasp/geometry.hpp"

namespace sqgrasp {

/// World-frame point set with the sensor origin it was acquired from.
struct PointCloud {
  std::vector<Vec3d> points;
  std::optional<Vec3d> viewpoint;

  Vec3d centroid() const;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ASCII cloud file: one "x y z" triple per line, optional
/// "# viewpoint x y z" comment header. A literal "x y z" column header
/// line is tolerated.
PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

}  // namespace sqgrasp

#endif  // SQGRASP_CLOUD_HPP_
