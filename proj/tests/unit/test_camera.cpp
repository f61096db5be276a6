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
#include <random>

#include "mion/camera.hpp"
#include "mion/errors.hpp"

namespace mion {
namespace {

const Intrinsics kIntr;

std::vector<Vec3> random_joints(std::mt19937_64& rng, int n = 14) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec3> j(n);
  for (auto& p : j) p = {u(rng), 2 * u(rng), 0.4 * u(rng)};
  return j;
}

// Gauss-Newton on the geometric reprojection loss, started from `t`.
Translation gauss_newton(const std::vector<Vec3>& j3d, const std::vector<Vec2>& j2d, Translation t, int iters = 50) {
  for (int it = 0; it < iters; ++it) {
    Mat3 jtj;
    Vec3 jtr;
    for (size_t i = 0; i < j3d.size(); ++i) {
      const Vec3 p = j3d[i] + t;
      const double iz = 1.0 / p.z;
      const double ru = kIntr.f * p.x * iz + kIntr.c1 - j2d[i].u;
      const double rv = kIntr.f * p.y * iz + kIntr.c2 - j2d[i].v;
      const Vec3 gu{kIntr.f * iz, 0, -kIntr.f * p.x * iz * iz};
      const Vec3 gv{0, kIntr.f * iz, -kIntr.f * p.y * iz * iz};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) jtj(r, c) += gu[r] * gu[c] + gv[r] * gv[c];
        jtr[r] += gu[r] * ru + gv[r] * rv;
      }
    }
    const Vec3 step = solve_3x3(jtj, jtr);
    t -= step;
    if (norm(step) < 1e-12 * norm(t)) break;
  }
  return t;
}

TEST(Project, OpticalAxis) {
  const Translation t{0.3, -0.2, 7};
  const auto uv = project_point({-0.3, 0.2, 1.0}, kIntr, t);
  EXPECT_DOUBLE_EQ(uv.u, kIntr.c1);
  EXPECT_DOUBLE_EQ(uv.v, kIntr.c2);
}

TEST(Project, DepthDoublingHalvesOffset) {
  const Vec3 p{0.2, -0.1, 0.0};
  const auto a = project_point(p, kIntr, {0, 0, 5});
  const auto b = project_point(p, kIntr, {0, 0, 10});
  EXPECT_NEAR(b.u - kIntr.c1, 0.5 * (a.u - kIntr.c1), 1e-12);
  EXPECT_NEAR(b.v - kIntr.c2, 0.5 * (a.v - kIntr.c2), 1e-12);
}

TEST(Project, HandEvaluation) {
  const auto uv = project_point({0.1, 0, 0}, kIntr, {0, 0, 5});
  EXPECT_NEAR(uv.u, 212.0, 1e-12);
  EXPECT_NEAR(uv.v, 112.0, 1e-12);
}

TEST(ReprojLoss, ExactFitIsZero) {
  std::mt19937_64 rng(1);
  const auto j = random_joints(rng);
  const Translation t{0.1, 0.2, 6};
  EXPECT_NEAR(reproj_loss(j, project(j, kIntr, t), kIntr, t), 0.0, 1e-18);
}

TEST(ReprojLoss, ThreeFourFive) {
  std::mt19937_64 rng(2);
  const auto j = random_joints(rng);
  const Translation t{0, 0, 6};
  auto uv = project(j, kIntr, t);
  uv[3].u += 3;
  uv[3].v += 4;
  EXPECT_NEAR(reproj_loss(j, uv, kIntr, t), 25.0, 1e-9);
}

TEST(ReprojLoss, ZeroConfidenceMasksEverything) {
  std::mt19937_64 rng(3);
  const auto j = random_joints(rng);
  std::vector<Vec2> uv(j.size(), Vec2{1000, -50});
  const std::vector<double> conf(j.size(), 0.0);
  EXPECT_EQ(reproj_loss(j, uv, kIntr, {0, 0, 6}, conf), 0.0);
}

TEST(FitTranslation, RecoversExactTranslation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> tz(2, 10), txy(-0.3, 0.3);
  for (int i = 0; i < 200; ++i) {
    const auto j = random_joints(rng);
    const Translation t{txy(rng), txy(rng), tz(rng)};
    const FitResult r = fit_translation(j, project(j, kIntr, t), kIntr);
    EXPECT_LT(norm(r.translation - t) / norm(t), 1e-6);
    EXPECT_LT(r.loss, 1e-8);
  }
}

TEST(FitTranslation, CollapsedKeypointsAreSingular) {
  std::vector<Vec3> j;
  for (int i = 0; i < 14; ++i) j.push_back({0.1 * i, 0.05 * i, 0.0});
  const std::vector<Vec2> uv(14, Vec2{112, 112});
  try {
    fit_translation(j, uv, kIntr);
    FAIL() << "expected SingularSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(FitTranslation, ClosedFormNearGaussNewton) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tz(2, 10), txy(-0.3, 0.3);
  std::normal_distribution<double> noise(0.0, 3.0);
  int good = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto j = random_joints(rng);
    const Translation t{txy(rng), txy(rng), tz(rng)};
    auto uv = project(j, kIntr, t);
    for (auto& p : uv) {
      p.u += noise(rng);
      p.v += noise(rng);
    }
    const FitResult r = fit_translation(j, uv, kIntr);
    const double refined = reproj_loss(j, uv, kIntr, gauss_newton(j, uv, r.translation));
    if (r.loss <= 1.05 * refined + 1e-12) ++good;
  }
  EXPECT_GE(good, 0.95 * trials);
}

TEST(FitTranslation, ShiftedJointsShiftTranslation) {
  std::mt19937_64 rng(6);
  const auto j = random_joints(rng);
  const Translation t{0.1, -0.05, 5};
  const auto uv = project(j, kIntr, t);
  const Vec3 delta{0.2, -0.1, 0.3};
  std::vector<Vec3> shifted;
  for (const auto& p : j) shifted.push_back(p + delta);
  const FitResult r = fit_translation(shifted, uv, kIntr);
  EXPECT_LT(norm(r.translation - (t - delta)), 1e-6);
}

TEST(FitTranslation, ConfidenceScaleInvariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(0.2, 1.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  const auto j = random_joints(rng);
  auto uv = project(j, kIntr, {0, 0, 6});
  for (auto& p : uv) p.u += noise(rng);
  std::vector<double> conf(j.size()), scaled(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    conf[i] = c(rng);
    scaled[i] = 3.7 * conf[i];
  }
  const Translation a = fit_translation(j, uv, kIntr, conf).translation;
  const Translation b = fit_translation(j, uv, kIntr, scaled).translation;
  EXPECT_LT(norm(a - b), 1e-10 * norm(a));
}

TEST(FitTranslation, LossMatchesRecomputation) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const auto j = random_joints(rng);
    auto uv = project(j, kIntr, {0.05, 0.1, 4});
    for (auto& p : uv) p.v += noise(rng);
    const FitResult r = fit_translation(j, uv, kIntr);
    const double again = reproj_loss(j, uv, kIntr, r.translation);
    EXPECT_NEAR(r.loss, again, 1e-9 * std::max(1.0, again));
  }
}

TEST(FitTranslation, BehindCameraIsInfiniteLoss) {
  std::mt19937_64 rng(9);
  const auto j = random_joints(rng);
  // Mirror image through the principal point is consistent with negative depth.
  auto uv = project(j, kIntr, {0, 0, 5});
  for (auto& p : uv) {
    p.u = 2 * kIntr.c1 - p.u;
    p.v = 2 * kIntr.c2 - p.v;
  }
  const FitResult r = fit_translation(j, uv, kIntr);
  ASSERT_TRUE(r.behind_camera);
  EXPECT_EQ(r.loss, kInfiniteLoss);
}

}  // namespace
}  // namespace mion
