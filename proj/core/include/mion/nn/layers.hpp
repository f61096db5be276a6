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

// Parameterized building blocks for the refinement and scoring networks.
// Each block registers its parameters in a ParamStore at construction and
// binds them into a GraphT on every forward call.

#include <string>

#include "mion/nn/ops.hpp"
#include "mion/nn/tensor.hpp"

namespace mion::nn {

/// He-uniform gain for weights feeding a rectifier.
inline const double kReluGain = 2.449489742783178;  // sqrt(6)

/// x [L, in] -> x W + b, W [in, out].
template <class T>
struct Linear {
  Parameter<T>* w = nullptr;
  Parameter<T>* b = nullptr;
  int in = 0, out = 0;

  Linear() = default;
  Linear(ParamStore<T>& store, const std::string& name, int in_features, int out_features, bool zero_init = false,
         double gain = 1.0);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

template <class T>
struct Conv2d {
  Parameter<T>* w = nullptr;  // [O, C, k, k]
  Parameter<T>* b = nullptr;
  int stride = 1, pad = 0;

  Conv2d() = default;
  Conv2d(ParamStore<T>& store, const std::string& name, int in_ch, int out_ch, int kernel, int stride, int pad);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

template <class T>
struct Deconv2d {
  Parameter<T>* w = nullptr;  // [C, O, k, k]
  Parameter<T>* b = nullptr;
  int stride = 1, pad = 0;

  Deconv2d() = default;
  Deconv2d(ParamStore<T>& store, const std::string& name, int in_ch, int out_ch, int kernel, int stride, int pad);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

template <class T>
struct LayerNorm {
  Parameter<T>* gamma = nullptr;
  Parameter<T>* beta = nullptr;

  LayerNorm() = default;
  LayerNorm(ParamStore<T>& store, const std::string& name, int dim);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

/// Scaled dot-product attention with `heads` heads over d = d_model.
template <class T>
struct MultiHeadAttention {
  Linear<T> q, k, v, o;
  int heads = 1;
  int dim = 0;

  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore<T>& store, const std::string& name, int d_model, int heads,
                     bool zero_out = false);
  /// query [Lq, d], context [Lk, d] -> [Lq, d]
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& query, const TensorT<T>& context) const;
};

template <class T>
struct FeedForward {
  Linear<T> fc1, fc2;

  FeedForward() = default;
  FeedForward(ParamStore<T>& store, const std::string& name, int d_model, int hidden, bool zero_out = false);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

/// Pre-norm encoder block.
template <class T>
struct EncoderLayer {
  LayerNorm<T> ln1, ln2;
  MultiHeadAttention<T> attn;
  FeedForward<T> ff;

  EncoderLayer() = default;
  EncoderLayer(ParamStore<T>& store, const std::string& name, int d_model, int heads, int hidden);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x) const;
};

/// Pre-norm decoder block: query self-attention, cross-attention, FFN.
template <class T>
struct DecoderLayer {
  LayerNorm<T> ln1, ln2, ln3;
  MultiHeadAttention<T> self_attn, cross_attn;
  FeedForward<T> ff;

  DecoderLayer() = default;
  DecoderLayer(ParamStore<T>& store, const std::string& name, int d_model, int heads, int hidden);
  TensorT<T> operator()(GraphT<T>& g, const TensorT<T>& x, const TensorT<T>& memory) const;
};

}  // namespace mion::nn
