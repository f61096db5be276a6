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

// Differentiable operations. Unless noted, ops accept identical shapes or a
// right operand whose shape is a suffix of the left one (broadcast), and
// throw ShapeMismatch otherwise. Images are [C, H, W] without a batch axis.

#include <vector>

#include "mion/nn/tensor.hpp"

namespace mion::nn {

template <class T> TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b);
template <class T> TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b);
template <class T> TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b);
template <class T> TensorT<T> div(const TensorT<T>& a, const TensorT<T>& b);
template <class T> TensorT<T> scale(const TensorT<T>& a, T s);
template <class T> TensorT<T> add_scalar(const TensorT<T>& a, T s);

/// [M, K] x [K, N] -> [M, N]
template <class T> TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b);
/// 2-D transpose.
template <class T> TensorT<T> transpose(const TensorT<T>& a);

template <class T> TensorT<T> relu(const TensorT<T>& a);
/// Exact GELU, x * Phi(x).
template <class T> TensorT<T> gelu(const TensorT<T>& a);
template <class T> TensorT<T> tanh(const TensorT<T>& a);

template <class T> TensorT<T> softmax(const TensorT<T>& a, int axis);
/// Normalizes over the last axis, then applies gamma/beta of shape [D].
template <class T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta, int axis = -1,
                      T eps = T(1e-5));

/// x [C, H, W], w [O, C, k, k], b [O] -> [O, (H + 2p - k)/s + 1, ...]
template <class T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride, int pad);
/// Transposed convolution. x [C, H, W], w [C, O, k, k], b [O] -> [O, (H - 1)s - 2p + k, ...]
template <class T>
TensorT<T> deconv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride, int pad);

template <class T> TensorT<T> reshape(const TensorT<T>& a, Shape shape);
template <class T> TensorT<T> concat(const std::vector<TensorT<T>>& parts, int axis);
template <class T> TensorT<T> slice(const TensorT<T>& a, int axis, int begin, int end);

template <class T> TensorT<T> sum(const TensorT<T>& a);
template <class T> TensorT<T> mean(const TensorT<T>& a);
/// Mean over one axis (the axis is removed).
template <class T> TensorT<T> mean(const TensorT<T>& a, int axis);

/// mean((a - b)^2)
template <class T> TensorT<T> mse_loss(const TensorT<T>& a, const TensorT<T>& b);
/// ||a - b||_2 over all elements; the subgradient at zero is zero.
template <class T> TensorT<T> l2_loss(const TensorT<T>& a, const TensorT<T>& b);
/// mean |a - b|
template <class T> TensorT<T> l1_loss(const TensorT<T>& a, const TensorT<T>& b);

}  // namespace mion::nn
