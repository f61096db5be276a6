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

// Branch-count and selection-mode ablation over a labeled test set.

#include <cstdint>
#include <string>
#include <vector>

#include "mion/pipeline.hpp"

namespace mion {

struct AblationConfig {
  int max_branches = 6;
  int random_seeds = 3;
  double threshold = 2000.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct AblationRow {
  int branches = 0;
  std::string selection;  // "cen", "random", "oracle"
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double mpjpe_std = 0.0;  // across random seeds (random rows only)
};

struct AblationReport {
  int samples = 0;
  std::vector<AblationRow> rows;
  double stage1_mpjpe = 0.0;   // all branches at max_branches, before refinement
  double refined_mpjpe = 0.0;  // same branches after refinement

  const AblationRow* find(int branches, const std::string& selection) const;
};

/// Requires ground truth on every sample. Deterministic given the seeds.
AblationReport run_ablation(const Stages& st, const std::vector<Sample>& testset, const AblationConfig& cfg);

std::string ablation_to_json(const AblationReport& r);
std::string ablation_to_table(const AblationReport& r);

/// MPJPE of a refined body against ground-truth joints (pelvis root).
double branch_mpjpe(const BodyModel& model, const MrtOutput& out, const std::vector<Vec3>& gt_j3d,
                    double* pa = nullptr);

}  // namespace mion
