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

// Training-time augmentation with consistent label updates. Keypoints live
// in the crop frame; the image is assumed to cover that frame exactly.

#include <random>

#include "mion/body.hpp"
#include "mion/synth.hpp"

namespace mion {

/// Rotates the image about the principal point by `angle` radians (image
/// plane, positive turns +x towards +y). The ground truth orientation is
/// pre-multiplied by the matching camera roll and the translation follows.
Sample rotate_sample(const Sample& s, const BodyModel& model, const Intrinsics& intr, double angle);

/// Horizontal mirror: u' = 2 c1 - u, left/right joints swapped, pose mirrored
/// and Tx negated. Applying it twice restores the sample.
Sample flip_sample(const Sample& s, const BodyModel& model, const Intrinsics& intr);

/// Multiplies each color channel by its factor and clamps to [0, 1].
void scale_channels(Image& img, const Vec3& factors);

struct AugmentConfig {
  double max_rotation = 60.0 * 3.14159265358979323846 / 180.0;
  double rotation_prob = 0.5;
  double min_channel = 0.6;
  double max_channel = 1.4;
  double flip_prob = 0.5;
};

Sample augment(const Sample& s, const BodyModel& model, const Intrinsics& intr, const AugmentConfig& cfg,
               std::mt19937_64& rng);

}  // namespace mion
