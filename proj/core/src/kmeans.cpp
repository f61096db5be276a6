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

#include "mion/kmeans.hpp"

#include <cassert>
#include <limits>
#include <random>

#include "mion/errors.hpp"

namespace mion {

namespace {

double dist2(const double* a, const double* b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, int k, std::uint64_t seed, int max_iter) {
  const int m = data.rows, d = data.cols;
  if (d < 1 || k < 1 || k > m) fail(ErrorCode::kInvalidK, "kmeans requires 1 <= k <= M and D >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KMeansResult res;
  res.centroids = Matrix(k, d);

  // k-means++ seeding.
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(unit(rng) * m) % m;
  std::copy(data.row(first), data.row(first) + d, res.centroids.row(0));
  for (int c = 1; c < k; ++c) {
    double total = 0;
    for (int i = 0; i < m; ++i) {
      best[i] = std::min(best[i], dist2(data.row(i), res.centroids.row(c - 1), d));
      total += best[i];
    }
    int pick = 0;
    if (total > 0) {
      double target = unit(rng) * total;
      pick = m - 1;
      for (int i = 0; i < m; ++i) {
        target -= best[i];
        if (target < 0 && best[i] > 0) {
          pick = i;
          break;
        }
      }
      if (best[pick] == 0) {
        for (int i = m - 1; i >= 0; --i)
          if (best[i] > 0) { pick = i; break; }
      }
    } else {
      pick = static_cast<int>(unit(rng) * m) % m;
    }
    std::copy(data.row(pick), data.row(pick) + d, res.centroids.row(c));
  }

  res.assignment.assign(m, -1);
  std::vector<double> sums(static_cast<size_t>(k) * d);
  std::vector<int> counts(k);
  std::vector<double> dmin(m);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (int i = 0; i < m; ++i) {
      int arg = 0;
      double bd = dist2(data.row(i), res.centroids.row(0), d);
      for (int c = 1; c < k; ++c) {
        const double dd = dist2(data.row(i), res.centroids.row(c), d);
        if (dd < bd) {
          bd = dd;
          arg = c;
        }
      }
      dmin[i] = bd;
      if (res.assignment[i] != arg) {
        res.assignment[i] = arg;
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < m; ++i) {
      const int c = res.assignment[i];
      ++counts[c];
      double* s = &sums[static_cast<size_t>(c) * d];
      const double* x = data.row(i);
      for (int j = 0; j < d; ++j) s[j] += x[j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double* dst = res.centroids.row(c);
      const double* s = &sums[static_cast<size_t>(c) * d];
      for (int j = 0; j < d; ++j) dst[j] = s[j] / counts[c];
    }
    // Re-seed empty clusters at the farthest points from their centroids.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      int far = 0;
      double fd = -1;
      for (int i = 0; i < m; ++i) {
        const double dd = dist2(data.row(i), res.centroids.row(res.assignment[i]), d);
        if (dd > fd) {
          fd = dd;
          far = i;
        }
      }
      if (fd <= 0) continue;
      --counts[res.assignment[far]];
      res.assignment[far] = c;
      counts[c] = 1;
      std::copy(data.row(far), data.row(far) + d, res.centroids.row(c));
    }

    double obj = 0;
    for (int i = 0; i < m; ++i) obj += dist2(data.row(i), res.centroids.row(res.assignment[i]), d);
    res.objective.push_back(obj);
    res.iterations = it + 1;
  }
  if (res.objective.empty()) {
    double obj = 0;
    for (int i = 0; i < m; ++i) obj += dist2(data.row(i), res.centroids.row(res.assignment[i]), d);
    res.objective.push_back(obj);
  }
  return res;
}

}  // namespace mion
