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

#include "mion/metrics.hpp"

#include "mion/errors.hpp"

namespace mion {

double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt, std::span<const int> root) {
  if (pred.size() != gt.size() || pred.empty()) fail(ErrorCode::kShapeMismatch, "mpjpe: joint counts differ");
  Vec3 rp, rg;
  if (root.empty()) {
    rp = pred[0];
    rg = gt[0];
  } else {
    for (int r : root) {
      if (r < 0 || r >= static_cast<int>(pred.size())) fail(ErrorCode::kShapeMismatch, "mpjpe: bad root index");
      rp += pred[r];
      rg += gt[r];
    }
    rp = (1.0 / root.size()) * rp;
    rg = (1.0 / root.size()) * rg;
  }
  double s = 0;
  for (size_t i = 0; i < pred.size(); ++i) s += norm((pred[i] - rp) - (gt[i] - rg));
  return s / pred.size();
}

double pa_mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  if (pred.size() != gt.size()) fail(ErrorCode::kShapeMismatch, "pa_mpjpe: joint counts differ");
  if (pred.size() < 3) fail(ErrorCode::kDegenerateCloud, "pa_mpjpe needs at least 3 joints");
  const Similarity sim = procrustes(pred, gt);
  double s = 0;
  for (size_t i = 0; i < pred.size(); ++i) s += norm(sim.apply(pred[i]) - gt[i]);
  return s / pred.size();
}

}  // namespace mion
