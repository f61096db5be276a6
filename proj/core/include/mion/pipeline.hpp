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

// End-to-end three-stage inference and its configuration.

#include <limits>
#include <string>
#include <vector>

#include "mion/body.hpp"
#include "mion/cen.hpp"
#include "mion/mrt.hpp"
#include "mion/pool.hpp"
#include "mion/synth.hpp"

namespace mion {

struct PipelineConfig {
  std::string body_path;
  std::string pool_path;
  std::string mrt_path;
  std::string cen_path;
  Intrinsics intr;
  double threshold = 2000.0;
  int n_branches = 5;
  MrtConfig mrt;
  CenConfig cen;
};

std::string pipeline_config_to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults. Throws InvalidArgument.
PipelineConfig pipeline_config_from_json(const std::string& text);

/// Borrowed stage models. A null `mrt` is the identity refinement; a null
/// `cen` always keeps the first branch.
struct Stages {
  const BodyModel* model = nullptr;
  const CandidatePool* pool = nullptr;
  const Mrt* mrt = nullptr;
  const Cen* cen = nullptr;
  Intrinsics intr;  // crop frame
};

struct BranchResult {
  Candidate candidate;
  MrtOutput refined;
  double cen_score = std::numeric_limits<double>::quiet_NaN();
};

struct Reconstruction {
  PoseParams pose;
  ShapeParams shape;
  Translation translation;
  Mesh mesh;
  int branch_index = 0;
  std::vector<BranchResult> branches;
};

MrtOutput identity_refinement(const BodyModel& model, const Candidate& cand);

/// Stage 2 (and stage 3 scoring when a CEN is present and there are at
/// least two branches) for the given candidates; parallel per branch.
std::vector<BranchResult> refine_branches(const Stages& st, const Sample& s, const std::vector<Candidate>& cands,
                                          int threads = 1);

Reconstruction infer(const Stages& st, const Sample& s, double threshold, int n_branches, int threads = 1);

std::string reconstruction_to_json(const Reconstruction& r);

}  // namespace mion
