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

#include "sqgrasp/grasping.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sqgrasp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t grasp_ik_seed(std::uint64_t rng_seed, int sample_index,
                            int variant_index) {
  return splitmix64(rng_seed ^ splitmix64(
                                   static_cast<std::uint64_t>(sample_index) *
                                       3ULL +
                                   static_cast<std::uint64_t>(variant_index)));
}

std::optional<Transformd> build_grasp_frame(const SurfaceSample& sample,
                                            const Superquadricd& sq) {
  Vec3d z = -sample.normal;
  auto orthogonalize = [&](const Vec3d& axis) -> std::optional<Vec3d> {
    Vec3d proj = axis - axis.dot(z) * z;
    if (proj.norm() < 1e-6) return std::nullopt;
    return proj.normalized();
  };
  std::optional<Vec3d> x = orthogonalize(smallest_axis(sq));
  if (!x) x = orthogonalize(second_smallest_axis(sq));
  if (!x) return std::nullopt;
  Vec3d y = z.cross(*x);
  Mat3d r;
  r.col(0) = *x;
  r.col(1) = y;
  r.col(2) = z;
  return Transformd::from_parts(r, sample.point);
}

std::array<Transformd, 3> alpha_variants(const Transformd& frame,
                                         double alpha) {
  return {frame, frame * Transformd::rot_x(alpha),
          frame * Transformd::rot_x(-alpha)};
}

double close_fingers(const HandModel& hand, const Transformd& hand_pose,
                     const Superquadricd& shape,
                     const Transformd& object_pose) {
  Transformd world_to_obj = object_pose.inverse();
  double common = hand.closure_max;
  for (int f = 0; f < 3; ++f) {
    auto in_contact = [&](double closure) {
      auto pts = hand.inner_contact_points(hand_pose, closure)[f];
      for (const auto& p : pts)
        if (implicit_value(shape, world_to_obj.apply(p)) < 1.0) return true;
      return false;
    };
    double finger_closure;
    if (in_contact(0.0)) {
      finger_closure = 0.0;
    } else if (!in_contact(hand.closure_max)) {
      finger_closure = hand.closure_max;
    } else {
      double lo = 0.0, hi = hand.closure_max;
      for (int i = 0; i < 30; ++i) {
        double mid = 0.5 * (lo + hi);
        (in_contact(mid) ? hi : lo) = mid;
      }
      finger_closure = lo;
    }
    common = std::min(common, finger_closure);
  }
  return common;
}

double auto_spacing(const Superquadricd& sq) {
  return std::clamp(0.25 * std::min({sq.a, sq.b, sq.c}), 0.01, 0.04);
}

CandidateSet generate_grasps(const HandModel& hand,
                             const KinematicChain& chain, const Scene& scene,
                             const Transformd& object_pose,
                             const Superquadricd& sq,
                             const GenerationParams& params) {
  double spacing = params.spacing > 0.0 ? params.spacing : auto_spacing(sq);
  std::vector<SurfaceSample> samples;
  try {
    samples = sample_equal_distance(sq, spacing);
  } catch (const SpacingTooLarge&) {
    samples = sample_equal_distance(sq, 0.45 * std::min({sq.a, sq.b, sq.c}));
  }

  CandidateSet set;
  set.generated_at = object_pose;
  const Transformd tcp_to_hand = hand.tcp_offset();

  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    auto frame = build_grasp_frame(samples[i], sq);
    if (!frame) continue;
    auto variants = alpha_variants(*frame, params.alpha);
    const int variant_tags[3] = {0, +1, -1};
    for (int j = 0; j < 3; ++j) {
      Transformd object_to_tcp = variants[j];
      Transformd tcp_world = object_pose * object_to_tcp;
      Transformd hand_world = tcp_world * tcp_to_hand;
      double closure = close_fingers(hand, hand_world, sq, object_pose);
      if (check_hand_collision(scene, hand, hand_world, closure, object_pose))
        continue;
      bool reachable = ik_exists(
          chain, tcp_world, params.ik_budget,
          grasp_ik_seed(params.rng_seed, i, j), [&](const JointConfig& q) {
            return !check_arm_collision(scene, q, std::nullopt, object_pose);
          });
      if (!reachable) continue;
      GraspCandidate cand;
      cand.object_to_tcp = object_to_tcp;
      cand.tcp_to_hand = tcp_to_hand;
      cand.closure = closure;
      cand.alpha_variant = variant_tags[j];
      cand.eta = samples[i].eta;
      cand.omega = samples[i].omega;
      cand.sample_index = i;
      cand.variant_index = j;
      set.grasps.push_back(cand);
    }
  }
  return set;
}

CandidateSet get_valid_candidates(const HandModel& hand,
                                  const KinematicChain& chain,
                                  const Scene& scene, const Superquadricd& sq,
                                  const GenerationParams& params) {
  CandidateSet set =
      generate_grasps(hand, chain, scene, scene.goal_pose, sq, params);

  std::vector<GraspCandidate> survivors;
  for (const auto& cand : set.grasps) {
    Transformd tcp_start = scene.start_pose * cand.object_to_tcp;
    Transformd hand_start = tcp_start * cand.tcp_to_hand;
    if (check_hand_collision(scene, hand, hand_start, cand.closure,
                             scene.start_pose))
      continue;
    std::uint64_t seed = splitmix64(
        grasp_ik_seed(params.rng_seed, cand.sample_index, cand.variant_index) ^
        0xA5A5A5A5ULL);
    bool reachable = ik_exists(chain, tcp_start, params.ik_budget, seed,
                               [&](const JointConfig& q) {
                                 return !check_arm_collision(
                                     scene, q, std::nullopt, scene.start_pose);
                               });
    if (reachable) survivors.push_back(cand);
  }
  set.grasps = std::move(survivors);
  set.validated = true;
  if (set.grasps.empty())
    throw NoCandidates("no grasp is feasible at both start and goal poses");
  return set;
}

void save_candidates(const CandidateSet& set, const std::string& path,
                     const std::vector<std::pair<double, double>>* scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "format_version 1\n";
  out << "validated " << (set.validated ? 1 : 0) << "\n";
  {
    auto q = set.generated_at.quaternion();
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "generated_at %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  set.generated_at.translation.x(),
                  set.generated_at.translation.y(),
                  set.generated_at.translation.z(), q.x(), q.y(), q.z(),
                  q.w());
    out << buf;
  }
  out << "count " << set.grasps.size() << "\n";
  for (std::size_t k = 0; k < set.grasps.size(); ++k) {
    const auto& g = set.grasps[k];
    auto qf = g.object_to_tcp.quaternion();
    auto qh = g.tcp_to_hand.quaternion();
    char buf[640];
    std::snprintf(
        buf, sizeof(buf),
        "grasp sample %d variant %d tag %d eta %.17g omega %.17g closure "
        "%.17g frame %.17g %.17g %.17g %.17g %.17g %.17g %.17g tcp_to_hand "
        "%.17g %.17g %.17g %.17g %.17g %.17g %.17g",
        g.sample_index, g.variant_index, g.alpha_variant, g.eta, g.omega,
        g.closure, g.object_to_tcp.translation.x(),
        g.object_to_tcp.translation.y(), g.object_to_tcp.translation.z(),
        qf.x(), qf.y(), qf.z(), qf.w(), g.tcp_to_hand.translation.x(),
        g.tcp_to_hand.translation.y(), g.tcp_to_hand.translation.z(), qh.x(),
        qh.y(), qh.z(), qh.w());
    out << buf;
    if (scores && k < scores->size()) {
      char sbuf[96];
      std::snprintf(sbuf, sizeof(sbuf), " m_start %.17g m_goal %.17g",
                    (*scores)[k].first, (*scores)[k].second);
      out << sbuf;
    }
    out << "\n";
  }
}

CandidateSet load_candidates(const std::string& path,
                             std::vector<std::pair<double, double>>* scores) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open candidate file: " + path);
  CandidateSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format_version" || key == "count") {
      continue;
    } else if (key == "validated") {
      int v;
      ss >> v;
      set.validated = v != 0;
    } else if (key == "generated_at") {
      double tx, ty, tz, qx, qy, qz, qw;
      ss >> tx >> ty >> tz >> qx >> qy >> qz >> qw;
      set.generated_at = Transformd::from_quaternion(
          Vec3d(tx, ty, tz), Eigen::Quaterniond(qw, qx, qy, qz));
    } else if (key == "grasp") {
      GraspCandidate g;
      std::string tag;
      double tx, ty, tz, qx, qy, qz, qw;
      ss >> tag >> g.sample_index >> tag >> g.variant_index >> tag >>
          g.alpha_variant >> tag >> g.eta >> tag >> g.omega >> tag >>
          g.closure;
      ss >> tag >> tx >> ty >> tz >> qx >> qy >> qz >> qw;
      g.object_to_tcp = Transformd::from_quaternion(
          Vec3d(tx, ty, tz), Eigen::Quaterniond(qw, qx, qy, qz));
      ss >> tag >> tx >> ty >> tz >> qx >> qy >> qz >> qw;
      g.tcp_to_hand = Transformd::from_quaternion(
          Vec3d(tx, ty, tz), Eigen::Quaterniond(qw, qx, qy, qz));
      if (!ss) throw std::runtime_error("malformed grasp line in " + path);
      if (scores) {
        double ms, mg;
        std::string k1, k2;
        if (ss >> k1 >> ms >> k2 >> mg) scores->emplace_back(ms, mg);
      }
      set.grasps.push_back(g);
    } else {
      throw std::runtime_error("candidate file: unknown key " + key);
    }
  }
  return set;
}

}  // namespace sqgrasp
