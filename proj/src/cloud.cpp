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

#include "sqgrasp/cloud.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sqgrasp {

Vec3d PointCloud::centroid() const {
  Vec3d c = Vec3d::Zero();
  for (const auto& p : points) c += p;
  return points.empty() ? c : Vec3d(c / static_cast<double>(points.size()));
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open cloud file: " + path);
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tag;
      ss >> tag;
      if (tag == "viewpoint") {
        Vec3d v;
        if (!(ss >> v.x() >> v.y() >> v.z()))
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": malformed viewpoint header");
        cloud.viewpoint = v;
      }
      continue;
    }
    std::istringstream ss(line);
    Vec3d p;
    if (!(ss >> p.x() >> p.y() >> p.z())) {
      // Tolerate a single "x y z" column-header line.
      std::istringstream hs(line);
      std::string a, b, c;
      if (line_no == 1 && (hs >> a >> b >> c) && a == "x" && b == "y" && c == "z")
        continue;
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected three numbers");
    }
    if (!p.allFinite())
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": non-finite coordinate");
    cloud.points.push_back(p);
  }
  if (cloud.points.empty())
    throw ParseError(path + ": no points found");
  return cloud;
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char line[160];
  if (cloud.viewpoint) {
    std::snprintf(line, sizeof(line), "# viewpoint %.17g %.17g %.17g\n",
                  cloud.viewpoint->x(), cloud.viewpoint->y(),
                  cloud.viewpoint->z());
    out << line;
  }
  for (const auto& p : cloud.points) {
    std::snprintf(line, sizeof(line), "%.17g %.17g %.17g\n", p.x(), p.y(),
                  p.z());
    out << line;
  }
}

}  // namespace sqgrasp
