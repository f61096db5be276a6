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

// Z-buffered triangle rasterizer shared by PNCC and RGB rendering.
// Pixel (x, y) is sampled at its center (x + 0.5, y + 0.5), origin top-left.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mion/camera.hpp"
#include "mion/geometry.hpp"

namespace mion {

/// H x W x 3 float raster, row-major, channels interleaved.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, 0.0f) {}

  float* at(int y, int x) { return data.data() + (static_cast<size_t>(y) * width + x) * 3; }
  const float* at(int y, int x) const { return data.data() + (static_cast<size_t>(y) * width + x) * 3; }
};

/// Per-pixel visibility: winning triangle (or -1), perspective-correct
/// depth and barycentric weights of the winner.
struct RasterBuffer {
  int height = 0;
  int width = 0;
  std::vector<int> triangle;
  std::vector<double> depth;
  std::vector<std::array<double, 3>> bary;

  bool covered(int y, int x) const { return triangle[static_cast<size_t>(y) * width + x] >= 0; }
};

inline constexpr double kDepthTieEpsilon = 1e-9;

/// Rasterizes camera-space vertices (translation already applied). Triangles
/// with any vertex depth <= 1e-6 or zero projected area are skipped; there is
/// no back-face culling. Ties in depth keep the lower triangle index.
RasterBuffer rasterize(std::span<const Vec3> cam_vertices, std::span<const int> faces, const Intrinsics& intr,
                       int height, int width);

/// Signed edge function used for coverage tests.
inline double edge_function(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

/// Binary P6 PPM, values scaled by 255 and rounded half-up.
void save_ppm(const Image& img, const std::string& path);
Image load_ppm(const std::string& path);

}  // namespace mion
