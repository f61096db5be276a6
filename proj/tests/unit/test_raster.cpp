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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "mion/pncc.hpp"
#include "mion/raster.hpp"

namespace mion {
namespace {

struct Scene {
  std::vector<Vec3> verts;
  std::vector<int> faces;
  NccColors colors;
};

Scene random_scene(std::mt19937_64& rng, int tris) {
  std::uniform_real_distribution<double> xy(-2.5, 2.5), z(2.0, 10.0), d(-1.2, 1.2), c(0, 1);
  Scene s;
  for (int t = 0; t < tris; ++t) {
    const Vec3 center{xy(rng), xy(rng), z(rng)};
    for (int k = 0; k < 3; ++k) {
      s.verts.push_back(center + Vec3{d(rng), d(rng), 0.6 * d(rng)});
      s.faces.push_back(3 * t + k);
      s.colors.colors.push_back({c(rng), c(rng), c(rng)});
    }
  }
  return s;
}

// Every pixel tests every triangle; barycentrics come from a 2x2 solve.
struct OraclePixel {
  int tri = -1;
  Vec3 color{};
};

std::vector<OraclePixel> oracle(const Scene& s, const Intrinsics& intr, int h, int w) {
  std::vector<OraclePixel> out(static_cast<size_t>(h) * w);
  const int nf = static_cast<int>(s.faces.size() / 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      double best = std::numeric_limits<double>::infinity();
      for (int f = 0; f < nf; ++f) {
        Vec3 p[3];
        double u[3], v[3];
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
          p[k] = s.verts[s.faces[3 * f + k]];
          ok = ok && p[k].z > 1e-6;
          u[k] = intr.f * p[k].x / p[k].z + intr.c1;
          v[k] = intr.f * p[k].y / p[k].z + intr.c2;
        }
        if (!ok) continue;
        const double a = u[1] - u[0], b = u[2] - u[0], c = v[1] - v[0], d = v[2] - v[0];
        const double det = a * d - b * c;
        if (std::abs(det) <= 1e-12) continue;
        const double l1 = (d * (px - u[0]) - b * (py - v[0])) / det;
        const double l2 = (a * (py - v[0]) - c * (px - u[0])) / det;
        const double l0 = 1 - l1 - l2;
        if (l0 < 0 || l1 < 0 || l2 < 0) continue;
        const double q0 = l0 / p[0].z, q1 = l1 / p[1].z, q2 = l2 / p[2].z, q = q0 + q1 + q2;
        const double depth = 1 / q;
        if (!(depth < best - kDepthTieEpsilon)) continue;
        best = depth;
        OraclePixel& o = out[static_cast<size_t>(y) * w + x];
        o.tri = f;
        o.color = (q0 / q) * s.colors.colors[s.faces[3 * f]] + (q1 / q) * s.colors.colors[s.faces[3 * f + 1]] +
                  (q2 / q) * s.colors.colors[s.faces[3 * f + 2]];
      }
    }
  return out;
}

const Intrinsics kIntr{60.0, 32.0, 32.0};

TEST(Raster, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  int mismatched_ids = 0, covered = 0;
  double max_color = 0;
  for (int scene = 0; scene < 100; ++scene) {
    const Scene s = random_scene(rng, 12);
    const RasterBuffer rb = rasterize(s.verts, s.faces, kIntr, 64, 64);
    const Mesh mesh{s.verts};
    const PnccMap map = render_pncc(mesh, s.faces, kIntr, {0, 0, 0}, s.colors, 64, 64);
    const auto ref = oracle(s, kIntr, 64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const OraclePixel& o = ref[static_cast<size_t>(y) * 64 + x];
        mismatched_ids += rb.triangle[static_cast<size_t>(y) * 64 + x] != o.tri;
        covered += o.tri >= 0;
        for (int c = 0; c < 3; ++c) max_color = std::max(max_color, std::abs(map.at(y, x)[c] - o.color[c]));
      }
  }
  EXPECT_EQ(mismatched_ids, 0);
  EXPECT_GT(covered, 10000);
  EXPECT_LT(max_color, 1e-6);
}

TEST(Raster, SingleTriangleBarycentrics) {
  // Fronto-parallel triangle at z = 1 with f = 1: screen coords equal x, y.
  const std::vector<Vec3> v = {{0, 0, 1}, {8, 0, 1}, {0, 8, 1}};
  const std::vector<int> f = {0, 1, 2};
  const RasterBuffer rb = rasterize(v, f, {1.0, 0.0, 0.0}, 8, 8);
  ASSERT_TRUE(rb.covered(1, 2));
  const auto& b = rb.bary[1 * 8 + 2];
  EXPECT_NEAR(b[1], 2.5 / 8, 1e-12);
  EXPECT_NEAR(b[2], 1.5 / 8, 1e-12);
  EXPECT_NEAR(b[0], 1 - 4.0 / 8, 1e-12);
  EXPECT_NEAR(rb.depth[1 * 8 + 2], 1.0, 1e-12);
  EXPECT_FALSE(rb.covered(7, 7));
}

TEST(Raster, NearerTriangleWins) {
  const std::vector<Vec3> v = {{-5, -5, 4}, {5, -5, 4}, {0, 5, 4}, {-5, -5, 2}, {5, -5, 2}, {0, 5, 2}};
  const std::vector<int> f = {0, 1, 2, 3, 4, 5};
  const RasterBuffer rb = rasterize(v, f, kIntr, 64, 64);
  EXPECT_EQ(rb.triangle[32 * 64 + 32], 1);
  EXPECT_NEAR(rb.depth[32 * 64 + 32], 2.0, 1e-12);
  // Reversed submission order, same winner geometry.
  const std::vector<int> g = {3, 4, 5, 0, 1, 2};
  EXPECT_EQ(rasterize(v, g, kIntr, 64, 64).triangle[32 * 64 + 32], 0);
}

TEST(Raster, EqualDepthKeepsLowerIndex) {
  const std::vector<Vec3> v = {{-5, -5, 3}, {5, -5, 3}, {0, 5, 3}};
  const std::vector<int> f = {0, 1, 2, 2, 1, 0};
  const RasterBuffer rb = rasterize(v, f, kIntr, 64, 64);
  EXPECT_EQ(rb.triangle[32 * 64 + 32], 0);
}

TEST(Raster, BehindCameraIsEmpty) {
  const std::vector<Vec3> v = {{-5, -5, -3}, {5, -5, -3}, {0, 5, -3}};
  const std::vector<int> f = {0, 1, 2};
  const RasterBuffer rb = rasterize(v, f, kIntr, 32, 32);
  for (int t : rb.triangle) EXPECT_EQ(t, -1);
}

TEST(Raster, PpmRoundTripQuantizes) {
  Image img(3, 5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  for (float& v : img.data) v = u(rng);
  const std::string path = ::testing::TempDir() + "/img.ppm";
  save_ppm(img, path);
  const Image back = load_ppm(path);
  ASSERT_EQ(back.height, 3);
  ASSERT_EQ(back.width, 5);
  for (size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(back.data[i], img.data[i], 0.5 / 255 + 1e-6);
}

}  // namespace
}  // namespace mion
