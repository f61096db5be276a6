// Copyright 2026 The mion Authors. All rights reserved.
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

#include "mion/pose_sampler.hpp"

#include <algorithm>
#include <string>

#include "mion/errors.hpp"

namespace mion {

namespace {

struct Limits {
  Vec3 lo, hi;
};

// Limits for central and left joints; right joints mirror the left ones.
Limits limits_for(const std::string& name) {
  if (name == "chest") return {{-0.3, -0.4, -0.3}, {0.5, 0.4, 0.3}};
  if (name == "neck") return {{-0.3, -0.5, -0.3}, {0.4, 0.5, 0.3}};
  if (name == "head") return {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}};
  if (name == "l_shoulder") return {{-1.2, -0.5, -1.6}, {1.2, 0.5, 0.4}};
  if (name == "l_elbow") return {{0.0, -0.2, -0.2}, {2.0, 0.2, 0.2}};
  if (name == "l_wrist") return {{-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4}};
  if (name == "l_hip") return {{-1.4, -0.4, -0.6}, {0.5, 0.4, 0.2}};
  if (name == "l_knee") return {{0.0, -0.1, -0.1}, {2.0, 0.1, 0.1}};
  if (name == "l_ankle") return {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}};
  return {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}};
}

Limits mirrored(const Limits& l) {
  // (x, y, z) -> (x, -y, -z)
  return {{l.lo.x, -l.hi.y, -l.hi.z}, {l.hi.x, -l.lo.y, -l.lo.z}};
}

}  // namespace

PoseSampler::PoseSampler(const BodyModel& model, std::uint64_t seed, PoseSamplerConfig cfg)
    : num_joints_(model.num_joints), seed_(seed), cfg_(cfg) {
  if (cfg_.archetypes < 1) fail(ErrorCode::kInvalidArgument, "pose sampler needs at least one archetype");
  const int K = model.num_joints;
  for (int k = 1; k < K; ++k) {
    const std::string& name = model.joint_names[k];
    Limits l;
    if (name.rfind("r_", 0) == 0) {
      l = mirrored(limits_for("l_" + name.substr(2)));
    } else {
      l = limits_for(name);
    }
    for (int d = 0; d < 3; ++d) {
      lo_.push_back(l.lo[d]);
      hi_.push_back(l.hi[d]);
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int a = 0; a < cfg_.archetypes; ++a) {
    std::vector<double> pose(lo_.size());
    for (size_t i = 0; i < pose.size(); ++i) {
      const double u = 0.5 * (unit(rng) + unit(rng));
      pose[i] = lo_[i] + (hi_[i] - lo_[i]) * u;
    }
    archetypes_.push_back(std::move(pose));
  }
}

PoseParams PoseSampler::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = static_cast<int>(archetypes_.size());
  const int a = static_cast<int>(unit(rng) * n) % n;
  const int b = static_cast<int>(unit(rng) * n) % n;
  const double lambda = cfg_.blend * unit(rng);
  std::vector<double> flat(3 + lo_.size());
  for (size_t i = 0; i < lo_.size(); ++i) {
    double x = (1.0 - lambda) * archetypes_[a][i] + lambda * archetypes_[b][i];
    x += cfg_.jitter * 0.5 * (hi_[i] - lo_[i]) * gauss(rng);
    flat[3 + i] = std::clamp(x, lo_[i], hi_[i]);
  }
  const double yaw = cfg_.yaw_range * (2.0 * unit(rng) - 1.0);
  const double pitch = cfg_.tilt_sigma * gauss(rng);
  const double roll = cfg_.tilt_sigma * gauss(rng);
  const AxisAngle g = log_map(rot_y(yaw) * rot_x(pitch) * rot_z(roll));
  flat[0] = g.v.x;
  flat[1] = g.v.y;
  flat[2] = g.v.z;
  return PoseParams::from_flat(flat);
}

std::vector<PoseParams> PoseSampler::sample_n(int count, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<PoseParams> out;
  out.reserve(std::max(0, count));
  for (int i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

}  // namespace mion
