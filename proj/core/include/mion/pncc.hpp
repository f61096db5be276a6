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

// Normalized coordinate code (NCC) colors, projected NCC (PNCC) rendering and
// the sinusoidal PNCC positional encoding.

#include <span>
#include <string>
#include <vector>

#include "mion/body.hpp"
#include "mion/camera.hpp"
#include "mion/raster.hpp"

namespace mion {

struct NccColors {
  std::vector<Vec3> colors;  // V, each component in [0, 1]
};

/// H x W x 3 raster in [0, 1], background exactly zero.
using PnccMap = Image;

/// H x W x C encoding in [-1, 1], C = 3 * d_pe, channel-interleaved per pixel.
struct PosEncoding {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;
};

/// Per-axis min-max normalization of the template. Throws DegenerateAxis.
NccColors ncc(std::span<const Vec3> template_vertices);
NccColors ncc(const BodyModel& model);

PnccMap render_pncc(const Mesh& mesh, std::span<const int> faces, const Intrinsics& intr, const Translation& t,
                    const NccColors& colors, int height, int width);

/// PE(2i) = sin(s p / 10000^(2i/d_pe)), PE(2i+1) = cos(...), one block of
/// d_pe channels per PNCC channel. Throws OddDim when d_pe is odd.
PosEncoding pncc_pe(const PnccMap& map, int d_pe, double scale = 1.0);

/// "MIONPNCC", u32 H, u32 W, f32 H*W*3 row-major.
void save_pncc(const PnccMap& map, const std::string& path);
PnccMap load_pncc(const std::string& path);

}  // namespace mion
