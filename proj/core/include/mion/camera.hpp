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

// Perspective projection and the closed-form camera translation fit.

#include <limits>
#include <span>
#include <vector>

#include "mion/geometry.hpp"

namespace mion {

struct Intrinsics {
  double f = 5000.0;   // pixels
  double c1 = 112.0;   // principal point (pixels)
  double c2 = 112.0;

  /// Same camera for an image resampled from `from` to `to` pixels wide.
  Intrinsics rescaled(double from, double to) const {
    const double s = to / from;
    return {f * s, c1 * s, c2 * s};
  }
};

struct Vec2 {
  double u = 0, v = 0;
};

using Translation = Vec3;

inline constexpr double kInfiniteLoss = std::numeric_limits<double>::infinity();

struct FitResult {
  Translation translation;
  double loss = 0.0;      // pixels^2 summed over joints, or +inf when behind the camera
  bool behind_camera = false;
  bool degenerate = false;  // no joint carried weight; loss reported as 0
};

/// Throws BehindCamera when any point has depth z + Tz <= 1e-6.
std::vector<Vec2> project(std::span<const Vec3> points, const Intrinsics& intr, const Translation& t);
Vec2 project_point(Vec3 p, const Intrinsics& intr, const Translation& t);

/// sum_i conf_i * ||project(j3d_i) - j2d_i||^2. Empty conf means all ones.
double reproj_loss(std::span<const Vec3> j3d, std::span<const Vec2> j2d, const Intrinsics& intr,
                   const Translation& t, std::span<const double> conf = {});

/// Closed-form translation from the linearized projection equations
///   f (x_i + Tx) + (c1 - u_i)(z_i + Tz) = 0,  f (y_i + Ty) + (c2 - v_i)(z_i + Tz) = 0
/// solved through weighted normal equations. Throws SingularSystem; a fit
/// that leaves any joint behind the camera returns loss = +inf instead.
FitResult fit_translation(std::span<const Vec3> j3d, std::span<const Vec2> j2d, const Intrinsics& intr,
                          std::span<const double> conf = {});

}  // namespace mion
