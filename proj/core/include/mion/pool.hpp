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

// Stage 1: clustered candidate pool, batch camera fitting and diverse
// low-loss candidate selection.

#include <cstdint>
#include <string>
#include <vector>

#include "mion/body.hpp"
#include "mion/camera.hpp"
#include "mion/kmeans.hpp"

namespace mion {

struct CandidatePool {
  int num_poses = 0;         // P
  int num_orients = 0;       // O
  int num_regressed = 0;     // N
  int num_joints = 0;        // K
  Matrix pose_centroids;     // P x 3(K-1)
  Matrix orient_centroids;   // O x 3
  std::vector<Vec3> joints_cache;  // (P*O) x N, member i = p * O + o

  int size() const { return num_poses * num_orients; }
  int pose_of(int member) const { return member / num_orients; }
  int orient_of(int member) const { return member % num_orients; }

  PoseParams member_pose(int member) const;
  std::span<const Vec3> member_joints(int member) const {
    return {joints_cache.data() + static_cast<size_t>(member) * num_regressed, static_cast<size_t>(num_regressed)};
  }
};

struct Candidate {
  int pool_index = -1;
  PoseParams pose;
  Translation translation;
  double fit_loss = 0.0;
};

/// Oriented regressed joints of (pose, orient) at zero shape, rotated about the root.
std::vector<Vec3> oriented_joints(const BodyModel& model, const std::vector<double>& joints_flat, Vec3 orient);

/// Clusters the motion set (pose and global orientation separately) and
/// fills the joints cache for every combination.
CandidatePool build_pool(const std::vector<PoseParams>& motion_set, int num_poses, int num_orients,
                         std::uint64_t seed, const BodyModel& model, int threads = 1);

/// Index-aligned fits for every pool member; failures become +inf loss.
std::vector<FitResult> fit_all(const CandidatePool& pool, std::span<const Vec2> j2d, const Intrinsics& intr,
                               std::span<const double> conf = {}, int threads = 1);

/// Lowest-loss member first, then farthest-point sampling in pose space
/// among members with loss < threshold (falling back to the n lowest-loss
/// members when fewer are admissible). Throws EmptyPool.
std::vector<Candidate> select_candidates(const std::vector<FitResult>& fits, const CandidatePool& pool,
                                         double threshold, int n_branches);

/// Concatenated [orient, joints] axis-angle vector of a member.
std::vector<double> member_pose_vector(const CandidatePool& pool, int member);

void save_pool(const CandidatePool& pool, const std::string& path);
CandidatePool load_pool(const std::string& path);

std::string candidates_to_json(const std::vector<Candidate>& cands);
std::vector<Candidate> candidates_from_json(const std::string& text);

}  // namespace mion
