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

#include <random>

#include "mion/kmeans.hpp"

namespace mion {
namespace {

Matrix blobs(int per, double sigma, std::uint64_t seed, std::vector<double>* means) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  const double centers[2][3] = {{-5, 0, 2}, {5, 1, -2}};
  Matrix m(2 * per, 3);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < per; ++i)
      for (int d = 0; d < 3; ++d) m.row(b * per + i)[d] = centers[b][d] + g(rng);
  means->assign(6, 0.0);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < per; ++i)
      for (int d = 0; d < 3; ++d) (*means)[b * 3 + d] += m.row(b * per + i)[d] / per;
  return m;
}

TEST(KMeans, SaturatedKReturnsData) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(9, 4);
  for (double& v : m.data) v = u(rng);
  const KMeansResult r = kmeans(m, 9, 3);
  EXPECT_EQ(r.objective.back(), 0.0);
  for (int i = 0; i < 9; ++i) {
    const int c = r.assignment[i];
    for (int d = 0; d < 4; ++d) EXPECT_EQ(r.centroids.row(c)[d], m.row(i)[d]);
  }
}

TEST(KMeans, SeparatedBlobs) {
  std::vector<double> means;
  const double sigma = 0.5;
  const Matrix m = blobs(200, sigma, 2, &means);
  const KMeansResult r = kmeans(m, 2, 5);
  for (int b = 0; b < 2; ++b) {
    const int c = r.assignment[b * 200];
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(r.centroids.row(c)[d], means[b * 3 + d], 0.1 * sigma);
  }
}

TEST(KMeans, Deterministic) {
  std::vector<double> means;
  const Matrix m = blobs(100, 2.0, 3, &means);
  const KMeansResult a = kmeans(m, 7, 42), b = kmeans(m, 7, 42);
  EXPECT_EQ(a.centroids.data, b.centroids.data);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(KMeans, ObjectiveNonIncreasing) {
  std::vector<double> means;
  const Matrix m = blobs(150, 3.0, 4, &means);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult r = kmeans(m, 6, seed);
    for (size_t i = 1; i < r.objective.size(); ++i) EXPECT_LE(r.objective[i], r.objective[i - 1] * (1 + 1e-12));
  }
}

}  // namespace
}  // namespace mion
