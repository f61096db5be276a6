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

// Differentiable regressed joints and perspective projection, used by the
// refinement loss. Joints are computed as
//   J_n = sum_k Rg_k (P_nk + Q_nk beta) + C_nk tg_k
// with regressor-by-skinning products precomputed from the model.

#include <memory>
#include <vector>

#include "mion/body.hpp"
#include "mion/camera.hpp"
#include "mion/nn/tensor.hpp"

namespace mion {

/// Rodrigues coefficients A = sin t / t, B = (1 - cos t) / t^2 and their
/// derivatives divided by t, stable near zero.
struct RodriguesCoeffs {
  double a, b, da_t, db_t;
};
RodriguesCoeffs rodrigues_coeffs(double theta);

/// Gradient of L with respect to an axis-angle vector given dL/dR.
Vec3 rodrigues_backward(Vec3 v, const Mat3& d_r);

template <class T>
class BodyJointsLayer {
 public:
  explicit BodyJointsLayer(const BodyModel& model);

  /// pose [K, 3] (row 0 = global orientation), beta [S] -> joints [N, 3].
  nn::TensorT<T> operator()(const nn::TensorT<T>& pose, const nn::TensorT<T>& beta) const;

  int num_regressed() const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

/// j3d [N, 3], t [3] -> pixels [N, 2]. Joints with depth <= 1e-6 produce 0
/// with zero gradient and are flagged in `behind` when provided.
template <class T>
nn::TensorT<T> project_joints(const nn::TensorT<T>& j3d, const nn::TensorT<T>& t, const Intrinsics& intr,
                              std::vector<char>* behind = nullptr);

}  // namespace mion
