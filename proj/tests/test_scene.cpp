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

#include <random>

#include "sqgrasp/scene.hpp"

using namespace sqgrasp;

namespace {

std::shared_ptr<const KinematicChain> reference_chain() {
  static auto chain = std::make_shared<const KinematicChain>(
      load_chain(std::string(SQGRASP_DATA_DIR) + "/chains/arm7.chain"));
  return chain;
}

Scene empty_table_scene(std::vector<Primitive> obstacles = {}) {
  auto object = Superquadricd::make(0.04, 0.04, 0.10, 0.3, 1.0);
  Transformd start = Transformd::translate(Vec3d(0.30, -0.20, 0.35));
  Transformd goal = Transformd::translate(Vec3d(0.45, 0.0, 0.35));
  Primitive table = Primitive::box(Transformd::translate(Vec3d(0.5, 0, 0.225)),
                                   Vec3d(0.35, 0.45, 0.025));
  JointConfig home;
  home << 0, 0.6, 0, 0.9, 0, 0, 0;
  return Scene::make(object, start, goal, std::move(obstacles), table,
                     reference_chain(), home);
}

}  // namespace

TEST_CASE("scene file round trip") {
  Scene scene = load_scene(std::string(SQGRASP_DATA_DIR) +
                           "/scenes/table_empty.scene");
  CHECK(scene.object_shape.a == doctest::Approx(0.04));
  CHECK(scene.object_shape.c == doctest::Approx(0.10));
  CHECK(scene.obstacles.empty());
  CHECK((scene.start_pose.translation - Vec3d(0.30, -0.20, 0.35)).norm() <
        1e-15);
  CHECK(scene.home[1] == doctest::Approx(0.6));

  std::string path = "/tmp/sqgrasp_test_scene.scene";
  scene.chain_path = std::string(SQGRASP_DATA_DIR) + "/chains/arm7.chain";
  save_scene(scene, path);
  Scene loaded = load_scene(path);
  CHECK(loaded.object_shape.e1 == scene.object_shape.e1);
  CHECK((loaded.goal_pose.translation - scene.goal_pose.translation).norm() <
        1e-15);

  Scene boxed = load_scene(std::string(SQGRASP_DATA_DIR) +
                           "/scenes/boxed_goal.scene");
  CHECK(boxed.obstacles.size() == 4);
}

TEST_CASE("load-time invariants reject bad scenes") {
  auto object = Superquadricd::make(0.04, 0.04, 0.10, 0.3, 1.0);
  Primitive table = Primitive::box(Transformd::translate(Vec3d(0.5, 0, 0.225)),
                                   Vec3d(0.35, 0.45, 0.025));
  // Goal below the table surface.
  CHECK_THROWS_AS(
      Scene::make(object, Transformd::translate(Vec3d(0.3, -0.2, 0.35)),
                  Transformd::translate(Vec3d(0.45, 0, 0.10)), {}, table,
                  reference_chain()),
      std::invalid_argument);
  // Object at start inside an obstacle.
  std::vector<Primitive> obstacles{
      Primitive::box(Transformd::translate(Vec3d(0.30, -0.20, 0.35)),
                     Vec3d(0.08, 0.08, 0.15))};
  CHECK_THROWS_AS(
      Scene::make(object, Transformd::translate(Vec3d(0.3, -0.2, 0.35)),
                  Transformd::translate(Vec3d(0.45, 0, 0.35)),
                  std::move(obstacles), table, reference_chain()),
      std::invalid_argument);
}

TEST_CASE("object placement queries honor the contact tolerance") {
  Scene scene = empty_table_scene(
      {Primitive::box(Transformd::translate(Vec3d(0.6, 0.3, 0.35)),
                      Vec3d(0.05, 0.05, 0.10))});
  CHECK(object_collision_free_at(scene, scene.start_pose));
  // Centered inside the obstacle.
  CHECK_FALSE(object_collision_free_at(
      scene, Transformd::translate(Vec3d(0.6, 0.3, 0.35))));
  // Resting exactly on the table top (z = 0.25 + c).
  CHECK(object_collision_free_at(
      scene, Transformd::translate(Vec3d(0.5, 0.1, 0.35))));
  // One centimeter into the table.
  CHECK_FALSE(object_collision_free_at(
      scene, Transformd::translate(Vec3d(0.5, 0.1, 0.34))));

  // Purity: repeated queries agree.
  for (int i = 0; i < 5; ++i)
    CHECK(object_collision_free_at(scene, scene.start_pose));
}

TEST_CASE("hand collision checks") {
  Scene scene = empty_table_scene(
      {Primitive::box(Transformd::translate(Vec3d(0.6, 0.3, 0.35)),
                      Vec3d(0.05, 0.05, 0.10))});
  HandModel hand = HandModel::default_three_finger();

  // Far above the table, open hand.
  CHECK_FALSE(check_hand_collision(
      scene, hand, Transformd::translate(Vec3d(0.4, 0, 1.0)), 0.0,
      scene.start_pose));
  // Palm center placed inside the obstacle box.
  CHECK(check_hand_collision(scene, hand,
                             Transformd::translate(Vec3d(0.6, 0.3, 0.35)),
                             0.0, scene.start_pose));
  // Palm through the table.
  CHECK(check_hand_collision(scene, hand,
                             Transformd::translate(Vec3d(0.4, 0, 0.25)), 0.0,
                             scene.start_pose));
}

TEST_CASE("shallow object contact is exempt, deep contact is not") {
  Scene scene = empty_table_scene();
  // Probe spheres against the object at its start pose: 1 mm penetration
  // tolerated, deeper rejected. The object surface is at (start + a) along
  // the world x axis.
  Vec3d surface = scene.start_pose.translation + Vec3d(0.04, 0, 0);
  Primitive shallow =
      Primitive::sphere(surface + Vec3d(0.019, 0, 0), 0.02);  // 1 mm in
  Primitive deep =
      Primitive::sphere(surface + Vec3d(0.012, 0, 0), 0.02);  // 8 mm in
  CHECK_FALSE(object_vs_primitive(scene.object_shape, scene.start_pose,
                                  shallow, shallow.surface_points(400),
                                  scene.object_points, kContactTol));
  CHECK(object_vs_primitive(scene.object_shape, scene.start_pose, deep,
                            deep.surface_points(400), scene.object_points,
                            kContactTol));
}

TEST_CASE("arm collision checks against obstacles and the carried object") {
  Scene free_scene = empty_table_scene();
  JointConfig home = free_scene.home;
  CHECK_FALSE(check_arm_collision(free_scene, home, std::nullopt, std::nullopt));

  // Obstacle at the home-config elbow.
  Vec3d elbow = fk_frames(*free_scene.chain, home)[3].translation;
  Scene blocked = empty_table_scene({Primitive::sphere(elbow, 0.05)});
  CHECK(check_arm_collision(blocked, home, std::nullopt, std::nullopt));
  CHECK_FALSE(check_arm_collision(free_scene, home, std::nullopt,
                                  free_scene.start_pose));

  // Carried object sweeping the table: TCP pointing down, low enough that
  // only the attached object (not the links) reaches the table.
  Transformd down = Transformd::from_parts(
      Transformd::rot_x(M_PI).rotation, Vec3d(0.45, 0.0, 0.34));
  IKSolutionSet sols = ik_enumerate(*free_scene.chain, down, 60, 5);
  REQUIRE(!sols.solutions.empty());
  AttachedObject carried{free_scene.object_shape, Transformd::identity()};
  JointConfig q = sols.solutions.front();
  CHECK_FALSE(check_arm_collision(free_scene, q, std::nullopt, std::nullopt));
  CHECK(check_arm_collision(free_scene, q, carried, std::nullopt));

  Transformd higher = Transformd::from_parts(
      Transformd::rot_x(M_PI).rotation, Vec3d(0.45, 0.0, 0.42));
  IKSolutionSet sols2 = ik_enumerate(*free_scene.chain, higher, 60, 5);
  REQUIRE(!sols2.solutions.empty());
  CHECK_FALSE(
      check_arm_collision(free_scene, sols2.solutions.front(), carried,
                          std::nullopt));
}

TEST_CASE("implicit collision route agrees with a mesh oracle") {
  // Random object shapes against random primitives; the sampled implicit
  // route must agree with a dense mesh-based oracle except within the
  // declared conservative margin around the contact threshold.
  constexpr double kMarginBand = 0.012;
  std::mt19937_64 rng(2027);
  std::uniform_real_distribution<double> ext(0.03, 0.12);
  std::uniform_real_distribution<double> ue(0.2, 1.8);
  std::uniform_real_distribution<double> upos(-0.15, 0.15);
  std::uniform_int_distribution<int> kind(0, 2);

  int deep_checks = 0, clear_checks = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto shape = Superquadricd::make(ext(rng), ext(rng), ext(rng), ue(rng),
                                     ue(rng));
    Transformd pose = Transformd::from_parts(
        Eigen::AngleAxisd(upos(rng) * 10, Vec3d(upos(rng), upos(rng), 1.0)
                                              .normalized())
            .toRotationMatrix(),
        Vec3d(upos(rng), upos(rng), upos(rng)));

    Primitive prim;
    Transformd ppose = Transformd::translate(
        Vec3d(upos(rng) * 2, upos(rng) * 2, upos(rng) * 2));
    switch (kind(rng)) {
      case 0:
        prim = Primitive::box(ppose, Vec3d(ext(rng), ext(rng), ext(rng)));
        break;
      case 1:
        prim = Primitive::sphere(ppose.translation, ext(rng));
        break;
      default:
        prim = Primitive::capsule(ppose, 0.5 * ext(rng), ext(rng));
        break;
    }

    bool impl = object_vs_primitive(shape, pose, prim,
                                    prim.surface_points(400),
                                    to_mesh(shape, 16).vertices, kContactTol);

    // Oracle: dense mesh vertices against the primitive, plus primitive
    // center containment for the fully-swallowed case.
    auto mesh = transformed(to_mesh(shape, 48), pose);
    double d_oracle = 1e30;
    for (const auto& v : mesh.vertices) {
      double d;
      switch (prim.kind) {
        case PrimitiveKind::kSphere:
          d = (v - prim.pose.translation).norm() - prim.radius;
          break;
        case PrimitiveKind::kCapsule: {
          auto [a, b] = prim.segment();
          d = point_segment_distance(v, a, b) - prim.radius;
          break;
        }
        default:
          d = point_box_signed(prim.pose.inverse().apply(v),
                               prim.half_extents);
      }
      d_oracle = std::min(d_oracle, d);
    }
    bool center_inside =
        implicit_value(shape, pose.inverse().apply(prim.pose.translation)) <
        1.0;
    if (center_inside) d_oracle = std::min(d_oracle, -0.05);

    if (d_oracle < -(kContactTol + kMarginBand)) {
      CHECK(impl);  // deep penetration must never be missed
      ++deep_checks;
    } else if (d_oracle > kMarginBand) {
      CHECK_FALSE(impl);  // clear separation must never be flagged
      ++clear_checks;
    }
  }
  CHECK(deep_checks > 5);
  CHECK(clear_checks > 5);
}
