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
#include <numbers>
#include <random>

#include "mion/errors.hpp"
#include "mion/geometry.hpp"

namespace mion {
namespace {

Mat3 quaternion_rotation(Vec3 axis, double angle) {
  const double h = 0.5 * angle, s = std::sin(h);
  const double w = std::cos(h), x = axis.x * s, y = axis.y * s, z = axis.z * s;
  return Mat3{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
               2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
               2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

// Partial-pivot elimination on an augmented copy.
Vec3 eliminate(Mat3 a, Vec3 b) {
  double m[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r][c] = a(r, c);
    m[r][3] = b[r];
  }
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[p][k]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  Vec3 x;
  for (int r = 2; r >= 0; --r) {
    double s = m[r][3];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v{n(rng), n(rng), n(rng)};
  return (1.0 / norm(v)) * v;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
  double d = 0;
  for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
  return d;
}

TEST(Rodrigues, ZeroIsIdentity) { EXPECT_EQ(max_abs_diff(rodrigues({}), Mat3::identity()), 0.0); }

TEST(Rodrigues, HalfTurnAboutX) {
  EXPECT_LT(max_abs_diff(rodrigues({{std::numbers::pi, 0, 0}}), Mat3::diag(1, -1, -1)), 1e-15);
}

TEST(Rodrigues, MatchesQuaternion) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = random_unit(rng);
    EXPECT_LT(max_abs_diff(rodrigues({0.7 * axis}), quaternion_rotation(axis, 0.7)), 1e-12);
  }
}

TEST(Rodrigues, LogRoundTrip) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> mag(1e-6, std::numbers::pi - 1e-6);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a = mag(rng) * random_unit(rng);
    const Vec3 back = log_map(rodrigues({a})).v;
    EXPECT_LT(norm(back - a), 1e-9) << "angle " << norm(a);
  }
}

TEST(Rodrigues, SmallAnglesStayOrthonormal) {
  for (double t : {0.0, 1e-12, 1e-8, 1e-4}) {
    const Mat3 r = rodrigues({{t, -t, 0.5 * t}});
    EXPECT_LT(max_abs_diff(r * r.transposed(), Mat3::identity()), 1e-14);
  }
}

TEST(Solve3x3, Identity) {
  const Vec3 x = solve_3x3(Mat3::identity(), {1, 2, 3});
  EXPECT_EQ(x, (Vec3{1, 2, 3}));
}

TEST(Solve3x3, RepeatedRowsAreSingular) {
  const Mat3 a{{1, 2, 3, 1, 2, 3, 0, 1, 4}};
  try {
    solve_3x3(a, {1, 1, 1});
    FAIL() << "expected SingularSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
}

TEST(Solve3x3, MatchesElimination) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    Mat3 a;
    for (double& v : a.m) v = u(rng);
    const Svd3 s = svd_3x3(a);
    if (s.sigma.z <= 0 || s.sigma.x / s.sigma.z >= 1e6) continue;
    const Vec3 b{u(rng), u(rng), u(rng)};
    const Vec3 x = solve_3x3(a, b), y = eliminate(a, b);
    EXPECT_LT(norm(x - y) / std::max(1e-300, norm(y)), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 9000);
}

std::vector<Vec3> random_cloud(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = {g(rng), g(rng), g(rng)};
  return pts;
}

double residual(const Similarity& s, const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
  double r = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const Vec3 d = s.apply(x[i]) - y[i];
    r += dot(d, d);
  }
  return r;
}

TEST(Procrustes, SelfAlignment) {
  std::mt19937_64 rng(14);
  const auto x = random_cloud(10, rng);
  const Similarity s = procrustes(x, x);
  EXPECT_NEAR(s.s, 1.0, 1e-12);
  EXPECT_LT(max_abs_diff(s.r, Mat3::identity()), 1e-12);
  EXPECT_LT(norm(s.t), 1e-12);
  EXPECT_LT(residual(s, x, x), 1e-20);
}

TEST(Procrustes, RecoversSimilarity) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_cloud(12, rng);
    const Mat3 r0 = rodrigues({2.0 * random_unit(rng)});
    const Vec3 t0{0.3, -1.2, 4.0};
    std::vector<Vec3> y;
    for (const auto& p : x) y.push_back(2.0 * (r0 * p) + t0);
    const Similarity s = procrustes(x, y);
    EXPECT_NEAR(s.s, 2.0, 1e-9);
    EXPECT_LT(max_abs_diff(s.r, r0), 1e-9);
    EXPECT_LT(norm(s.t - t0), 1e-9);
  }
}

TEST(Procrustes, MirroredCloudGivesProperRotation) {
  std::mt19937_64 rng(16);
  const auto x = random_cloud(15, rng);
  std::vector<Vec3> y;
  for (const auto& p : x) y.push_back({-p.x, p.y, p.z});
  EXPECT_NEAR(procrustes(x, y).r.det(), 1.0, 1e-12);
}

TEST(Procrustes, ResidualInvariantUnderPreTransform) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_cloud(14, rng);
    auto y = random_cloud(14, rng);
    const Similarity pre{0.4 + trial * 0.05, rodrigues({1.3 * random_unit(rng)}), {1, 2, -3}};
    std::vector<Vec3> x2;
    for (const auto& p : x) x2.push_back(pre.apply(p));
    EXPECT_NEAR(residual(procrustes(x, y), x, y), residual(procrustes(x2, y), x2, y), 1e-9);
  }
}

TEST(Svd3, Reconstructs) {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    Mat3 a;
    for (double& v : a.m) v = u(rng);
    const Svd3 s = svd_3x3(a);
    const Mat3 back = s.u * Mat3::diag(s.sigma.x, s.sigma.y, s.sigma.z) * s.v.transposed();
    EXPECT_LT(max_abs_diff(back, a), 1e-10);
    EXPECT_GE(s.sigma.x, s.sigma.y);
    EXPECT_GE(s.sigma.y, s.sigma.z);
    EXPECT_GE(s.sigma.z, 0.0);
  }
}

}  // namespace
}  // namespace mion
