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

#include <cmath>
#include <cstdio>
#include <random>

#include "mion/errors.hpp"
#include "mion/pncc.hpp"

namespace mion {
namespace {

const BodyModel& model() {
  static const BodyModel m = make_toy_model(3);
  return m;
}

TEST(Ncc, CubeCornersMapToUnitCube) {
  std::vector<Vec3> cube;
  for (int i = 0; i < 8; ++i) cube.push_back({i & 1 ? 2.0 : -1.0, i & 2 ? 5.0 : 3.0, i & 4 ? 0.5 : -0.5});
  cube.push_back({0.5, 4.0, 0.0});  // midpoint
  const NccColors c = ncc(cube);
  for (int i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(c.colors[i].x, i & 1 ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(c.colors[i].y, i & 2 ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(c.colors[i].z, i & 4 ? 1.0 : 0.0);
  }
  EXPECT_NEAR(c.colors[8].x, 0.5, 1e-15);
  EXPECT_NEAR(c.colors[8].y, 0.5, 1e-15);
  EXPECT_NEAR(c.colors[8].z, 0.5, 1e-15);
}

TEST(Ncc, ModelColorsSpanUnitRange) {
  const NccColors c = ncc(model());
  ASSERT_EQ(static_cast<int>(c.colors.size()), model().num_vertices);
  for (int d = 0; d < 3; ++d) {
    double lo = 1, hi = 0;
    for (const Vec3& v : c.colors) {
      lo = std::min(lo, v[d]);
      hi = std::max(hi, v[d]);
    }
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
  }
}

TEST(Ncc, FlatAxisThrows) {
  const std::vector<Vec3> flat = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
  try {
    ncc(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateAxis);
  }
}

TEST(RenderPncc, BodyInFrameHasColorsInRange) {
  const Mesh mesh = forward(model(), PoseParams::zero(model().num_joints), ShapeParams{std::vector<double>(model().num_betas, 0.0)});
  const Intrinsics intr = Intrinsics{}.rescaled(224, 64);
  const PnccMap map = render_pncc(mesh, model().faces, intr, {0, 0, 55}, ncc(model()), 64, 64);
  int fg = 0;
  for (int p = 0; p < 64 * 64; ++p) {
    const float* px = map.data.data() + 3 * p;
    const bool any = px[0] != 0 || px[1] != 0 || px[2] != 0;
    fg += any;
    for (int c = 0; c < 3; ++c) {
      EXPECT_GE(px[c], 0.0f);
      EXPECT_LE(px[c], 1.0f);
    }
  }
  EXPECT_GT(fg, 200);
  EXPECT_LT(fg, 64 * 64);
}

TEST(RenderPncc, BehindCameraIsBlack) {
  const Mesh mesh = forward(model(), PoseParams::zero(model().num_joints), ShapeParams{std::vector<double>(model().num_betas, 0.0)});
  const PnccMap map = render_pncc(mesh, model().faces, {}, {0, 0, -40}, ncc(model()), 32, 32);
  for (float v : map.data) EXPECT_EQ(v, 0.0f);
}

TEST(RenderPncc, ColorCountMismatchThrows) {
  const Mesh mesh{{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}}};
  NccColors c;
  c.colors.resize(2);
  EXPECT_THROW(render_pncc(mesh, std::vector<int>{0, 1, 2}, {}, {}, c, 8, 8), Error);
}

TEST(PnccPe, MatchesSinusoidFormula) {
  PnccMap map(2, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0, 1);
  for (float& v : map.data) v = u(rng);
  const int d = 6;
  const double scale = 3.0;
  const PosEncoding pe = pncc_pe(map, d, scale);
  ASSERT_EQ(pe.channels, 18);
  for (int p = 0; p < 6; ++p)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < d / 2; ++i) {
        const double a = scale * map.data[3 * p + c] / std::pow(10000.0, 2.0 * i / d);
        EXPECT_NEAR(pe.data[p * 18 + c * d + 2 * i], std::sin(a), 1e-6);
        EXPECT_NEAR(pe.data[p * 18 + c * d + 2 * i + 1], std::cos(a), 1e-6);
      }
  for (float v : pe.data) {
    EXPECT_GE(v, -1.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(PnccPe, OddWidthThrows) {
  try {
    pncc_pe(PnccMap(2, 2), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOddDim);
  }
}

TEST(PnccIo, RoundTripAndBadMagic) {
  PnccMap map(4, 7);
  for (size_t i = 0; i < map.data.size(); ++i) map.data[i] = static_cast<float>(i) / map.data.size();
  const std::string path = ::testing::TempDir() + "/m.pncc";
  save_pncc(map, path);
  EXPECT_EQ(load_pncc(path).data, map.data);
  const std::string bad = ::testing::TempDir() + "/bad.pncc";
  std::FILE* f = std::fopen(bad.c_str(), "wb");
  std::fputs("NOTAPNCCFILE....", f);
  std::fclose(f);
  try {
    load_pncc(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

}  // namespace
}  // namespace mion
