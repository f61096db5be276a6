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

// Central finite differences in double precision.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mion/nn/tensor.hpp"

namespace mion::testing {

using nn::Tensor64;

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Max relative error between analytic and numeric gradients over all inputs.
// rel = |a - n| / max(1, |a|, |n|).
inline double gradcheck(const std::function<Tensor64(const std::vector<Tensor64>&)>& f,
                        std::vector<nn::Shape> shapes, std::vector<std::vector<double>> values, double h = 1e-6) {
  std::vector<Tensor64> in;
  for (std::size_t i = 0; i < shapes.size(); ++i) in.push_back(Tensor64::variable(shapes[i], values[i]));
  Tensor64 out = f(in);
  out.backward();
  double worst = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::vector<double> analytic(in[i].grad().begin(), in[i].grad().end());
    for (std::size_t k = 0; k < values[i].size(); ++k) {
      auto eval = [&](double delta) {
        std::vector<Tensor64> c;
        for (std::size_t j = 0; j < shapes.size(); ++j) {
          std::vector<double> v = values[j];
          if (j == i) v[k] += delta;
          c.push_back(Tensor64::constant(shapes[j], v));
        }
        return f(c).item();
      };
      const double numeric = (eval(h) - eval(-h)) / (2 * h);
      const double a = analytic.empty() ? 0.0 : analytic[k];
      worst = std::max(worst, std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)}));
    }
  }
  return worst;
}

}  // namespace mion::testing
