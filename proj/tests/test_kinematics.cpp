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

#include "sqgrasp/kinematics.hpp"

using namespace sqgrasp;

namespace {

const KinematicChain& reference_chain() {
  static KinematicChain chain =
      load_chain(std::string(SQGRASP_DATA_DIR) + "/chains/arm7.chain");
  return chain;
}

JointConfig random_config(const KinematicChain& chain, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  JointConfig q;
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& j = chain.joints[i];
    q[i] = j.lower + (j.upper - j.lower) * u(rng);
  }
  return q;
}

}  // namespace

TEST_CASE("zero configuration matches the documented home pose") {
  // Composed by hand from the config file: base z 0.5, links 0.3 + 0.3,
  // tool 0.25, all along +z, identity orientation.
  Transformd tcp = fk(reference_chain(), JointConfig::Zero());
  CHECK((tcp.translation - Vec3d(0, 0, 1.35)).norm() < 1e-12);
  CHECK((tcp.rotation - Mat3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-joint motions match closed-form poses") {
  const auto& chain = reference_chain();

  // Joint 1 (base z axis): the zero-config TCP lies on the axis, so the
  // position is unchanged and the orientation spins by the joint angle.
  JointConfig q = JointConfig::Zero();
  q[0] = M_PI;
  Transformd tcp = fk(chain, q);
  CHECK((tcp.translation - Vec3d(0, 0, 1.35)).norm() < 1e-12);
  CHECK((tcp.rotation - Transformd::rot_z(M_PI).rotation).cwiseAbs().maxCoeff() <
        1e-12);

  // Joint 2 (shoulder y axis) by pi/2: everything distal rotates about the
  // shoulder point.
  q = JointConfig::Zero();
  q[1] = M_PI / 2.0;
  tcp = fk(chain, q);
  CHECK((tcp.translation - Vec3d(0.85, 0, 0.5)).norm() < 1e-12);
  CHECK((tcp.rotation - Transformd::rot_y(M_PI / 2.0).rotation)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("fk and jacobian are 2-pi periodic per joint") {
  const auto& chain = reference_chain();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    JointConfig q = random_config(chain, rng);
    Transformd base_pose = fk(chain, q);
    for (int j = 0; j < kNumJoints; ++j) {
      JointConfig shifted = q;
      shifted[j] += 2.0 * M_PI;
      Transformd moved = fk(chain, shifted);
      CHECK((moved.translation - base_pose.translation).norm() < 1e-12);
      CHECK((moved.rotation - base_pose.rotation).cwiseAbs().maxCoeff() <
            1e-12);
      CHECK((jacobian(chain, shifted) - jacobian(chain, q))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("jacobian matches central differences of fk") {
  const auto& chain = reference_chain();
  std::mt19937_64 rng(37);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    JointConfig q = random_config(chain, rng);
    Jacobian analytic = jacobian(chain, q);
    Jacobian fd;
    for (int j = 0; j < kNumJoints; ++j) {
      JointConfig qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      Transformd fp = fk(chain, qp);
      Transformd fm = fk(chain, qm);
      fd.block<3, 1>(0, j) = (fp.translation - fm.translation) / (2 * h);
      fd.block<3, 1>(3, j) =
          rotation_log<double>(fp.rotation * fm.rotation.transpose()) /
          (2 * h);
    }
    CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("a joint whose axis passes through the TCP has no linear effect") {
  // The wrist roll (joint 7) axis runs along the tool axis through the TCP.
  const auto& chain = reference_chain();
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    Jacobian jac = jacobian(chain, random_config(chain, rng));
    CHECK(jac.block<3, 1>(0, 6).norm() < 1e-12);
  }
}

TEST_CASE("manipulability is the product of singular values") {
  const auto& chain = reference_chain();
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    JointConfig q = random_config(chain, rng);
    double m = manipulability(chain, q);
    CHECK(m >= 0.0);
    Jacobian jac = jacobian(chain, q);
    double det = (jac * jac.transpose()).determinant();
    double oracle = std::sqrt(std::max(det, 0.0));
    if (oracle > 1e-12)
      CHECK(std::abs(m - oracle) / oracle < 1e-9);
  }
}

TEST_CASE("the stretched configuration is singular") {
  CHECK(manipulability(reference_chain(), JointConfig::Zero()) < 1e-6);
}

TEST_CASE("ik solutions satisfy tolerance, limits, and distinctness") {
  const auto& chain = reference_chain();
  std::mt19937_64 rng(47);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    JointConfig q_true = 0.7 * random_config(chain, rng);
    Transformd target = fk(chain, q_true);
    IKSolutionSet set = ik_enumerate(chain, target, 40, 1234 + trial);
    for (const auto& q : set.solutions) {
      auto [pos, ang] = pose_error(chain, q, target);
      CHECK(pos <= kIkPositionTol);
      CHECK(ang <= kIkOrientationTol);
      CHECK(chain.within_limits(q));
      ++checked;
    }
    CHECK(!set.solutions.empty());
    for (std::size_t i = 0; i < set.solutions.size(); ++i)
      for (std::size_t j = i + 1; j < set.solutions.size(); ++j)
        CHECK((set.solutions[i] - set.solutions[j]).cwiseAbs().maxCoeff() >
              set.distinctness_radius);
  }
  CHECK(checked > 0);
}

TEST_CASE("unreachable targets produce an empty set") {
  const auto& chain = reference_chain();
  Transformd target = Transformd::translate(Vec3d(10, 0, 0));
  IKSolutionSet set = ik_enumerate(chain, target, 30, 99);
  CHECK(set.solutions.empty());
  CHECK_FALSE(ik_exists(chain, target, 30, 99));
}

TEST_CASE("redundancy yields multiple distinct solutions") {
  const auto& chain = reference_chain();
  JointConfig q_true;
  q_true << 0.3, 0.7, -0.4, 1.1, 0.5, 0.6, -0.2;
  Transformd target = fk(chain, q_true);
  IKSolutionSet set = ik_enumerate(chain, target, 200, 2024);
  CHECK(set.solutions.size() >= 2);
}

TEST_CASE("ik enumeration is deterministic per seed") {
  const auto& chain = reference_chain();
  JointConfig q_true;
  q_true << -0.2, 0.5, 0.3, 1.0, -0.6, 0.4, 0.1;
  Transformd target = fk(chain, q_true);
  IKSolutionSet a = ik_enumerate(chain, target, 60, 555);
  IKSolutionSet b = ik_enumerate(chain, target, 60, 555);
  REQUIRE(a.solutions.size() == b.solutions.size());
  REQUIRE(!a.solutions.empty());
  for (std::size_t i = 0; i < a.solutions.size(); ++i)
    CHECK((a.solutions[i] - b.solutions[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("chain file round trip") {
  const auto& chain = reference_chain();
  std::string path = "/tmp/sqgrasp_test_chain.chain";
  save_chain(chain, path);
  KinematicChain loaded = load_chain(path);
  CHECK((loaded.base.translation - chain.base.translation).norm() < 1e-15);
  CHECK((loaded.tool.translation - chain.tool.translation).norm() < 1e-15);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK((loaded.joints[i].axis - chain.joints[i].axis).norm() < 1e-15);
    CHECK(loaded.joints[i].lower == chain.joints[i].lower);
    CHECK(loaded.joints[i].link_radius == chain.joints[i].link_radius);
  }
}
