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

#include "sqgrasp/scene.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sqgrasp {

namespace {

Superquadricd deflated(const Superquadricd& shape, double margin) {
  Superquadricd s = shape;
  s.a = std::max(s.a - margin, 1e-6);
  s.b = std::max(s.b - margin, 1e-6);
  s.c = std::max(s.c - margin, 1e-6);
  return s;
}

double point_primitive_signed(const Primitive& prim, const Vec3d& p) {
  switch (prim.kind) {
    case PrimitiveKind::kSphere:
      return (p - prim.pose.translation).norm() - prim.radius;
    case PrimitiveKind::kCapsule: {
      auto [a, b] = prim.segment();
      return point_segment_distance(p, a, b) - prim.radius;
    }
    case PrimitiveKind::kBox:
      return point_box_signed(prim.pose.inverse().apply(p),
                              prim.half_extents);
  }
  return 0.0;
}

// Capsule surface probe: axial stations x 8 radial directions plus end
// caps, tested against the margin-deflated implicit surface.
bool capsule_vs_sq(const Primitive& cap, const Superquadricd& shape,
                   const Transformd& object_pose, double margin) {
  double center_dist = (cap.pose.translation - object_pose.translation).norm();
  if (center_dist > cap.bounding_radius() + shape.bounding_radius() + margin)
    return false;
  Superquadricd probe = deflated(shape, margin);
  Transformd world_to_obj = object_pose.inverse();
  auto [a, b] = cap.segment();
  Vec3d u = cap.pose.rotation.col(0), v = cap.pose.rotation.col(1);
  int n_axial = std::max(
      2, static_cast<int>(std::ceil((b - a).norm() / 0.02)) + 1);
  for (int i = 0; i < n_axial; ++i) {
    Vec3d on_axis = a + (b - a) * (static_cast<double>(i) / (n_axial - 1));
    for (int k = 0; k < 8; ++k) {
      double phi = M_PI * k / 4.0;
      Vec3d p = on_axis + cap.radius * (std::cos(phi) * u + std::sin(phi) * v);
      if (implicit_value(probe, world_to_obj.apply(p)) < 1.0) return true;
    }
  }
  Vec3d axis = cap.pose.rotation.col(2);
  if (implicit_value(probe, world_to_obj.apply(a - cap.radius * axis)) < 1.0)
    return true;
  if (implicit_value(probe, world_to_obj.apply(b + cap.radius * axis)) < 1.0)
    return true;
  return false;
}

}  // namespace

bool object_vs_primitive(const Superquadricd& shape,
                         const Transformd& object_pose, const Primitive& prim,
                         const std::vector<Vec3d>& prim_surface_world,
                         const std::vector<Vec3d>& object_surface_local,
                         double margin) {
  double center_dist =
      (prim.pose.translation - object_pose.translation).norm();
  if (center_dist > prim.bounding_radius() + shape.bounding_radius() + margin)
    return false;

  Superquadricd probe = deflated(shape, margin);
  Transformd world_to_obj = object_pose.inverse();
  for (const auto& p : prim_surface_world)
    if (implicit_value(probe, world_to_obj.apply(p)) < 1.0) return true;

  for (const auto& local : object_surface_local)
    if (point_primitive_signed(prim, object_pose.apply(local)) < -margin)
      return true;
  return false;
}

Scene Scene::make(Superquadricd object_shape, const Transformd& start_pose,
                  const Transformd& goal_pose,
                  std::vector<Primitive> obstacles, const Primitive& table,
                  std::shared_ptr<const KinematicChain> chain,
                  const JointConfig& home) {
  if (!chain) throw std::invalid_argument("scene requires a kinematic chain");
  if (table.kind != PrimitiveKind::kBox)
    throw std::invalid_argument("table must be a box");
  Scene scene;
  scene.object_shape = object_shape;
  scene.object_shape.pose = Transformd::identity();
  scene.start_pose = start_pose;
  scene.goal_pose = goal_pose;
  scene.obstacles = std::move(obstacles);
  scene.table = table;
  scene.chain = std::move(chain);
  scene.home = home;

  for (const auto& obs : scene.obstacles)
    scene.obstacle_points.push_back(obs.surface_points(400));
  scene.table_points = scene.table.surface_points(600);
  scene.object_points = to_mesh(scene.object_shape, 16).vertices;

  // Links that touch at the zero configuration are physically connected;
  // exempt those pairs (and index neighbors) from self-collision checks.
  auto zero_links = link_capsules(*scene.chain, JointConfig::Zero());
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = 0; j < kNumJoints; ++j) {
      if (std::abs(i - j) <= 1) {
        scene.self_exempt[i][j] = true;
        continue;
      }
      scene.self_exempt[i][j] =
          primitive_distance(zero_links[i], zero_links[j]) <= 5e-3;
    }
  }

  // Load-time invariants.
  Vec3d goal_in_table = scene.table.pose.inverse().apply(goal_pose.translation);
  if (goal_in_table.z() < scene.table.half_extents.z() - 1e-9)
    throw std::invalid_argument("goal pose must sit above the table surface");
  if (!object_collision_free_at(scene, start_pose))
    throw std::invalid_argument("object at start pose penetrates the scene");
  return scene;
}

bool check_hand_collision(const Scene& scene, const HandModel& hand,
                          const Transformd& hand_pose, double closure,
                          const Transformd& object_pose) {
  auto prims = hand.primitives(hand_pose, closure);
  for (const auto& prim : prims) {
    for (const auto& obs : scene.obstacles)
      if (primitive_distance(prim, obs) < -kContactTol) return true;
    if (primitive_distance(prim, scene.table) < -kContactTol) return true;
    auto surface = prim.surface_points(96);
    if (object_vs_primitive(scene.object_shape, object_pose, prim, surface,
                            scene.object_points, kContactTol))
      return true;
  }
  return false;
}

bool check_arm_collision(const Scene& scene, const JointConfig& q,
                         const std::optional<AttachedObject>& attached,
                         const std::optional<Transformd>& object_pose) {
  auto links = link_capsules(*scene.chain, q);
  for (int i = 0; i < kNumJoints; ++i) {
    for (const auto& obs : scene.obstacles)
      if (primitive_distance(links[i], obs) < -kContactTol) return true;
    if (primitive_distance(links[i], scene.table) < -kContactTol) return true;
    for (int j = i + 1; j < kNumJoints; ++j) {
      if (scene.self_exempt[i][j]) continue;
      if (primitive_distance(links[i], links[j]) < -kContactTol) return true;
    }
  }
  if (object_pose) {
    // All links but the hand link; the hand is expected to touch the
    // object at grasp configurations.
    for (int i = 0; i < kNumJoints - 1; ++i)
      if (capsule_vs_sq(links[i], scene.object_shape, *object_pose,
                        kContactTol))
        return true;
  }
  if (attached) {
    Transformd tcp = fk(*scene.chain, q);
    Transformd carried = tcp * attached->object_to_tcp.inverse();
    for (std::size_t k = 0; k < scene.obstacles.size(); ++k) {
      if (object_vs_primitive(attached->shape, carried, scene.obstacles[k],
                              scene.obstacle_points[k], scene.object_points,
                              kContactTol))
        return true;
    }
    if (object_vs_primitive(attached->shape, carried, scene.table,
                            scene.table_points, scene.object_points,
                            kContactTol))
      return true;
  }
  return false;
}

bool object_collision_free_at(const Scene& scene, const Transformd& pose) {
  for (std::size_t k = 0; k < scene.obstacles.size(); ++k) {
    if (object_vs_primitive(scene.object_shape, pose, scene.obstacles[k],
                            scene.obstacle_points[k], scene.object_points,
                            kContactTol))
      return false;
  }
  if (object_vs_primitive(scene.object_shape, pose, scene.table,
                          scene.table_points, scene.object_points,
                          kContactTol))
    return false;
  return true;
}

namespace {

Transformd parse_pose(std::istringstream& ss, const std::string& what) {
  double tx, ty, tz, qx, qy, qz, qw;
  if (!(ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
    throw std::runtime_error("scene file: malformed " + what);
  return Transformd::from_quaternion(Vec3d(tx, ty, tz),
                                     Eigen::Quaterniond(qw, qx, qy, qz));
}

void emit_pose(std::ofstream& out, const Transformd& t) {
  auto q = t.quaternion();
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g %.17g",
                t.translation.x(), t.translation.y(), t.translation.z(), q.x(),
                q.y(), q.z(), q.w());
  out << buf;
}

}  // namespace

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::filesystem::path dir = std::filesystem::path(path).parent_path();

  std::optional<Superquadricd> object;
  std::optional<Transformd> start, goal;
  std::optional<Primitive> table;
  std::vector<Primitive> obstacles;
  std::string chain_path;
  JointConfig home = JointConfig::Zero();

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format_version") {
      int v;
      ss >> v;
      if (v != 1) throw std::runtime_error("unsupported scene format version");
    } else if (key == "chain") {
      ss >> chain_path;
    } else if (key == "object") {
      double a, b, c, e1, e2;
      if (!(ss >> a >> b >> c >> e1 >> e2))
        throw std::runtime_error("scene file: malformed object line");
      object = Superquadricd::make(a, b, c, e1, e2);
    } else if (key == "start") {
      start = parse_pose(ss, "start pose");
    } else if (key == "goal") {
      goal = parse_pose(ss, "goal pose");
    } else if (key == "table") {
      Transformd pose = parse_pose(ss, "table pose");
      Vec3d h;
      if (!(ss >> h.x() >> h.y() >> h.z()))
        throw std::runtime_error("scene file: malformed table extents");
      table = Primitive::box(pose, h);
    } else if (key == "obstacle") {
      std::string kind;
      ss >> kind;
      if (kind == "box") {
        Transformd pose = parse_pose(ss, "obstacle pose");
        Vec3d h;
        if (!(ss >> h.x() >> h.y() >> h.z()))
          throw std::runtime_error("scene file: malformed box extents");
        obstacles.push_back(Primitive::box(pose, h));
      } else if (kind == "sphere") {
        Vec3d c;
        double r;
        if (!(ss >> c.x() >> c.y() >> c.z() >> r))
          throw std::runtime_error("scene file: malformed sphere");
        obstacles.push_back(Primitive::sphere(c, r));
      } else if (kind == "capsule") {
        Transformd pose = parse_pose(ss, "capsule pose");
        double r, hl;
        if (!(ss >> r >> hl))
          throw std::runtime_error("scene file: malformed capsule");
        obstacles.push_back(Primitive::capsule(pose, r, hl));
      } else {
        throw std::runtime_error("scene file: unknown obstacle kind " + kind);
      }
    } else if (key == "home") {
      for (int i = 0; i < kNumJoints; ++i)
        if (!(ss >> home[i]))
          throw std::runtime_error("scene file: malformed home config");
    } else {
      throw std::runtime_error("scene file: unknown key " + key);
    }
  }
  if (!object || !start || !goal || !table || chain_path.empty())
    throw std::runtime_error(
        "scene file must define chain, object, start, goal, and table");

  std::filesystem::path resolved = chain_path;
  if (resolved.is_relative() && !std::filesystem::exists(resolved))
    resolved = dir / resolved;
  auto chain = std::make_shared<KinematicChain>(load_chain(resolved.string()));
  Scene scene = Scene::make(*object, *start, *goal, std::move(obstacles),
                            *table, std::move(chain), home);
  scene.chain_path = chain_path;
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "format_version 1\n";
  out << "chain " << scene.chain_path << "\n";
  char buf[200];
  std::snprintf(buf, sizeof(buf), "object %.17g %.17g %.17g %.17g %.17g\n",
                scene.object_shape.a, scene.object_shape.b,
                scene.object_shape.c, scene.object_shape.e1,
                scene.object_shape.e2);
  out << buf;
  out << "start ";
  emit_pose(out, scene.start_pose);
  out << "\ngoal ";
  emit_pose(out, scene.goal_pose);
  out << "\ntable ";
  emit_pose(out, scene.table.pose);
  std::snprintf(buf, sizeof(buf), " %.17g %.17g %.17g\n",
                scene.table.half_extents.x(), scene.table.half_extents.y(),
                scene.table.half_extents.z());
  out << buf;
  for (const auto& obs : scene.obstacles) {
    switch (obs.kind) {
      case PrimitiveKind::kBox:
        out << "obstacle box ";
        emit_pose(out, obs.pose);
        std::snprintf(buf, sizeof(buf), " %.17g %.17g %.17g\n",
                      obs.half_extents.x(), obs.half_extents.y(),
                      obs.half_extents.z());
        out << buf;
        break;
      case PrimitiveKind::kSphere:
        std::snprintf(buf, sizeof(buf), "obstacle sphere %.17g %.17g %.17g %.17g\n",
                      obs.pose.translation.x(), obs.pose.translation.y(),
                      obs.pose.translation.z(), obs.radius);
        out << buf;
        break;
      case PrimitiveKind::kCapsule:
        out << "obstacle capsule ";
        emit_pose(out, obs.pose);
        std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", obs.radius,
                      obs.half_length);
        out << buf;
        break;
    }
  }
  out << "home";
  for (int i = 0; i < kNumJoints; ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", scene.home[i]);
    out << buf;
  }
  out << "\n";
}

}  // namespace sqgrasp
