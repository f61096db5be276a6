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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mion/body.hpp"

namespace mion {

struct PoseSamplerConfig {
  int archetypes = 12;      // procedurally generated base poses
  double jitter = 0.15;     // per-joint noise, fraction of the joint's half range
  double blend = 0.5;       // max interpolation weight towards a second archetype
  double yaw_range = 3.14159265358979323846;  // global yaw uniform in [-range, range]
  double tilt_sigma = 0.08; // pitch/roll standard deviation (rad)
};

/// Procedural motion source over the toy model's pose space: a fixed set of
/// archetype poses (derived from the seed) blended and jittered within
/// per-joint limits, with a random global orientation.
class PoseSampler {
 public:
  PoseSampler(const BodyModel& model, std::uint64_t seed, PoseSamplerConfig cfg = {});

  PoseParams sample(std::mt19937_64& rng) const;
  std::vector<PoseParams> sample_n(int count, std::uint64_t seed) const;

  const PoseSamplerConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  /// Per-joint axis-angle component limits, 3(K-1) entries each.
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }

 private:
  int num_joints_;
  std::uint64_t seed_;
  PoseSamplerConfig cfg_;
  std::vector<double> lo_, hi_;
  std::vector<std::vector<double>> archetypes_;
};

}  // namespace mion
