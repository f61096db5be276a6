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

#include <cstdint>
#include <vector>

namespace mion {

/// Row-major M x D matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
};

struct KMeansResult {
  Matrix centroids;               // k x D
  std::vector<int> assignment;    // M
  std::vector<double> objective;  // sum of squared distances after each iteration
  int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment is a
/// fixpoint or `max_iter` is reached. Empty clusters are re-seeded to the
/// point farthest from its centroid. Throws InvalidK unless 1 <= k <= M.
KMeansResult kmeans(const Matrix& data, int k, std::uint64_t seed, int max_iter = 100);

}  // namespace mion
