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

#include "sqgrasp/kinematics.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "sqgrasp/scene.hpp"

namespace sqgrasp {

bool KinematicChain::within_limits(const JointConfig& q, double slack) const {
  for (int i = 0; i < kNumJoints; ++i)
    if (q[i] < joints[i].lower - slack || q[i] > joints[i].upper + slack)
      return false;
  return true;
}

JointConfig KinematicChain::clamp_to_limits(const JointConfig& q) const {
  JointConfig out = q;
  for (int i = 0; i < kNumJoints; ++i)
    out[i] = std::clamp(out[i], joints[i].lower, joints[i].upper);
  return out;
}

namespace {

Transformd read_pose_tokens(std::istringstream& ss, const std::string& what) {
  double tx, ty, tz, qx, qy, qz, qw;
  if (!(ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
    throw std::runtime_error("malformed " + what +
                             " (expected tx ty tz qx qy qz qw)");
  return Transformd::from_quaternion(Vec3d(tx, ty, tz),
                                     Eigen::Quaterniond(qw, qx, qy, qz));
}

void write_pose(std::ofstream& out, const Transformd& t) {
  auto q = t.quaternion();
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g %.17g",
                t.translation.x(), t.translation.y(), t.translation.z(), q.x(),
                q.y(), q.z(), q.w());
  out << buf;
}

}  // namespace

KinematicChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain file: " + path);
  KinematicChain chain;
  int joint_count = 0;
  bool saw_base = false, saw_tool = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format_version") {
      int v;
      ss >> v;
      if (v != 1) throw std::runtime_error("unsupported chain format version");
    } else if (key == "base") {
      chain.base = read_pose_tokens(ss, "base");
      saw_base = true;
    } else if (key == "tool") {
      chain.tool = read_pose_tokens(ss, "tool");
      saw_tool = true;
    } else if (key == "joint") {
      if (joint_count >= kNumJoints)
        throw std::runtime_error("chain must have exactly 7 joints");
      RevoluteJoint j;
      std::string tag;
      ss >> tag;
      if (tag != "axis") throw std::runtime_error("expected 'axis'");
      ss >> j.axis.x() >> j.axis.y() >> j.axis.z();
      j.axis.normalize();
      ss >> tag;
      if (tag != "offset") throw std::runtime_error("expected 'offset'");
      j.parent_to_joint = read_pose_tokens(ss, "joint offset");
      ss >> tag;
      if (tag != "limits") throw std::runtime_error("expected 'limits'");
      if (!(ss >> j.lower >> j.upper) || !(j.lower < j.upper))
        throw std::runtime_error("bad joint limits");
      ss >> tag;
      if (tag != "radius") throw std::runtime_error("expected 'radius'");
      if (!(ss >> j.link_radius) || j.link_radius <= 0.0)
        throw std::runtime_error("bad link radius");
      chain.joints[joint_count++] = j;
    } else {
      throw std::runtime_error("unknown chain file key: " + key);
    }
  }
  if (joint_count != kNumJoints)
    throw std::runtime_error("chain must have exactly 7 joints");
  if (!saw_base || !saw_tool)
    throw std::runtime_error("chain file missing base or tool");
  return chain;
}

void save_chain(const KinematicChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "format_version 1\nbase ";
  write_pose(out, chain.base);
  out << "\n";
  for (const auto& j : chain.joints) {
    char buf[128];
    out << "joint axis ";
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", j.axis.x(),
                  j.axis.y(), j.axis.z());
    out << buf << " offset ";
    write_pose(out, j.parent_to_joint);
    std::snprintf(buf, sizeof(buf), " limits %.17g %.17g radius %.17g\n",
                  j.lower, j.upper, j.link_radius);
    out << buf;
  }
  out << "tool ";
  write_pose(out, chain.tool);
  out << "\n";
}

std::array<Transformd, kNumJoints + 1> fk_frames(const KinematicChain& chain,
                                                 const JointConfig& q) {
  std::array<Transformd, kNumJoints + 1> frames;
  Transformd cur = chain.base;
  for (int i = 0; i < kNumJoints; ++i) {
    cur = cur * chain.joints[i].parent_to_joint;
    cur = cur * Transformd::from_axis_angle(chain.joints[i].axis, q[i]);
    frames[i] = cur;
  }
  frames[kNumJoints] = cur * chain.tool;
  return frames;
}

Transformd fk(const KinematicChain& chain, const JointConfig& q) {
  return fk_frames(chain, q)[kNumJoints];
}

Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  auto frames = fk_frames(chain, q);
  const Vec3d tcp = frames[kNumJoints].translation;
  Jacobian jac;
  for (int i = 0; i < kNumJoints; ++i) {
    Vec3d axis_world = frames[i].rotation * chain.joints[i].axis;
    Vec3d origin = frames[i].translation;
    jac.block<3, 1>(0, i) = axis_world.cross(tcp - origin);
    jac.block<3, 1>(3, i) = axis_world;
  }
  return jac;
}

double manipulability(const KinematicChain& chain, const JointConfig& q) {
  Jacobian jac = jacobian(chain, q);
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, kNumJoints>> svd(jac);
  return svd.singularValues().prod();
}

std::vector<Primitive> link_capsules(const KinematicChain& chain,
                                     const JointConfig& q) {
  auto frames = fk_frames(chain, q);
  std::vector<Primitive> links;
  links.reserve(kNumJoints);
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3d& from = frames[i].translation;
    const Vec3d& to = frames[i + 1].translation;
    links.push_back(
        Primitive::capsule_between(from, to, chain.joints[i].link_radius));
  }
  return links;
}

std::pair<double, double> pose_error(const KinematicChain& chain,
                                     const JointConfig& q,
                                     const Transformd& target) {
  Transformd actual = fk(chain, q);
  double pos = (target.translation - actual.translation).norm();
  Vec3d w = rotation_log<double>(target.rotation *
                                 actual.rotation.transpose());
  return {pos, w.norm()};
}

namespace {

// One damped-least-squares descent from a seed. Returns true on
// convergence within the FK tolerance, with q within limits.
bool dls_descend(const KinematicChain& chain, const Transformd& target,
                 JointConfig& q) {
  constexpr int kMaxIters = 300;
  constexpr double kDamping = 1e-3;
  constexpr double kMaxStep = 0.5;
  double best_err = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int it = 0; it < kMaxIters; ++it) {
    Transformd actual = fk(chain, q);
    Vec3d dp = target.translation - actual.translation;
    Vec3d dw = rotation_log<double>(target.rotation *
                                    actual.rotation.transpose());
    if (dp.norm() <= kIkPositionTol && dw.norm() <= kIkOrientationTol)
      return true;

    double err = dp.norm() + 0.2 * dw.norm();
    if (err < best_err - 1e-10) {
      best_err = err;
      stall = 0;
    } else if (++stall > 40) {
      return false;  // stuck in a local minimum or joint-limit corner
    }

    Eigen::Matrix<double, 6, 1> e;
    e << dp, dw;
    Jacobian jac = jacobian(chain, q);
    Eigen::Matrix<double, 6, 6> jjt = jac * jac.transpose();
    jjt.diagonal().array() += kDamping * kDamping;
    JointConfig dq = jac.transpose() * jjt.ldlt().solve(e);
    double norm = dq.norm();
    if (norm > kMaxStep) dq *= kMaxStep / norm;
    q = chain.clamp_to_limits(q + dq);
  }
  return false;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

IKSolutionSet ik_enumerate(const KinematicChain& chain,
                           const Transformd& target, int budget,
                           std::uint64_t rng_seed,
                           double distinctness_radius) {
  IKSolutionSet set;
  set.target = target;
  set.distinctness_radius = distinctness_radius;
  std::mt19937_64 rng(splitmix64(rng_seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < budget; ++s) {
    JointConfig q = JointConfig::Zero();
    if (s > 0) {
      for (int i = 0; i < kNumJoints; ++i) {
        const auto& j = chain.joints[i];
        q[i] = j.lower + (j.upper - j.lower) * unit(rng);
      }
    }
    if (!dls_descend(chain, target, q)) continue;
    bool distinct = true;
    for (const auto& sol : set.solutions) {
      if ((sol - q).cwiseAbs().maxCoeff() <= distinctness_radius) {
        distinct = false;
        break;
      }
    }
    if (distinct) set.solutions.push_back(q);
  }
  return set;
}

bool ik_exists(const KinematicChain& chain, const Transformd& target,
               int budget, std::uint64_t rng_seed,
               const std::function<bool(const JointConfig&)>& accept) {
  std::mt19937_64 rng(splitmix64(rng_seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < budget; ++s) {
    JointConfig q = JointConfig::Zero();
    if (s > 0) {
      for (int i = 0; i < kNumJoints; ++i) {
        const auto& j = chain.joints[i];
        q[i] = j.lower + (j.upper - j.lower) * unit(rng);
      }
    }
    if (!dls_descend(chain, target, q)) continue;
    if (!accept || accept(q)) return true;
  }
  return false;
}

std::pair<double, int> situated_manipulability_solutions(
    const KinematicChain& chain, const Scene& scene,
    const Transformd& tcp_target, int budget, std::uint64_t rng_seed,
    const std::optional<Transformd>& object_pose,
    std::vector<JointConfig>* survivors) {
  IKSolutionSet set = ik_enumerate(chain, tcp_target, budget, rng_seed);
  double total = 0.0;
  int n = 0;
  for (const auto& q : set.solutions) {
    if (check_arm_collision(scene, q, std::nullopt, object_pose)) continue;
    total += manipulability(chain, q);
    ++n;
    if (survivors) survivors->push_back(q);
  }
  if (n == 0) return {0.0, 0};
  return {total / n, n};
}

std::pair<double, int> situated_manipulability(
    const KinematicChain& chain, const Scene& scene,
    const Transformd& tcp_target, int budget, std::uint64_t rng_seed,
    const std::optional<Transformd>& object_pose) {
  return situated_manipulability_solutions(chain, scene, tcp_target, budget,
                                           rng_seed, object_pose, nullptr);
}

}  // namespace sqgrasp
