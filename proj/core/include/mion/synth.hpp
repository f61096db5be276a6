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

// Synthetic labeled samples: posed toy bodies rendered with procedural
// part textures, Lambertian shading and smooth procedural backgrounds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mion/body.hpp"
#include "mion/camera.hpp"
#include "mion/pose_sampler.hpp"
#include "mion/raster.hpp"

namespace mion {

/// Side of the square crop frame in which keypoints and intrinsics live.
inline constexpr double kCropSize = 224.0;

struct GroundTruth {
  PoseParams pose;
  ShapeParams shape;
  Translation translation;
  std::vector<Vec3> j3d;  // N, camera-independent (body frame)
  Mesh mesh;
};

struct Sample {
  Image image;                // H x W x 3 in [0, 1]
  std::vector<Vec2> j2d;      // N, crop-frame pixels
  std::vector<double> conf;   // N
  std::optional<GroundTruth> gt;
  std::uint64_t texture_seed = 0;
  std::uint64_t bg_seed = 0;
};

struct KeypointNoise {
  double j2d_sigma = 0.0;     // crop-frame pixels
  double dropout_prob = 0.0;  // chance a joint gets conf 0
};

struct SynthConfig {
  int image_size = 64;
  Intrinsics intr;            // crop frame
  double shape_sigma = 0.5;
  double body_fraction = 0.75;  // rest height over crop size
  double depth_jitter = 0.1;    // relative
  double center_jitter = 6.0;   // crop pixels
  KeypointNoise noise;
};

/// Per-vertex albedo from part membership and seeded garment colors.
std::vector<Vec3> procedural_vertex_colors(const BodyModel& model, std::uint64_t texture_seed);

/// Smooth low-saturation background.
Image procedural_background(std::uint64_t bg_seed, int height, int width);

/// Flat-shaded Z-buffered render composited over the background. `intr` is
/// given in the output raster's pixel frame. `mask`, when given, receives the
/// per-pixel coverage.
Image render_rgb(const Mesh& mesh, std::span<const int> faces, std::span<const Vec3> vertex_colors,
                 const Intrinsics& intr, const Translation& t, std::uint64_t bg_seed, int height, int width,
                 std::vector<char>* mask = nullptr);
Image render_rgb(const BodyModel& model, const Mesh& mesh, const Intrinsics& intr, const Translation& t,
                 std::uint64_t texture_seed, std::uint64_t bg_seed, int height, int width,
                 std::vector<char>* mask = nullptr);

/// Rounds every channel to the nearest 1/255 (the PPM storage grid).
void quantize_8bit(Image& img);

/// Translation placing a body of rest height h near the crop center.
Translation default_translation(const BodyModel& model, const SynthConfig& cfg);

/// Builds a complete sample for a given body state; deterministic in the seeds.
Sample make_sample(const BodyModel& model, const PoseParams& pose, const ShapeParams& shape, const Translation& t,
                   std::uint64_t texture_seed, std::uint64_t bg_seed, const SynthConfig& cfg,
                   std::uint64_t noise_seed);

std::vector<Sample> gen_dataset(const BodyModel& model, const PoseSampler& sampler, int count, std::uint64_t seed,
                                const SynthConfig& cfg, int threads = 1);

/// Directory layout: manifest.json, labels.jsonl, images/NNNNNN.ppm.
void save_dataset(const std::vector<Sample>& samples, const std::string& dir, const std::string& manifest_json);
std::vector<Sample> load_dataset(const std::string& dir, const BodyModel& model);

std::string synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const std::string& text);

}  // namespace mion
