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

#include "mion/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "mion/errors.hpp"

namespace mion::nn {

template <class T>
Linear<T>::Linear(ParamStore<T>& store, const std::string& name, int in_features, int out_features, bool zero_init,
                  double gain)
    : in(in_features), out(out_features) {
  w = zero_init ? store.add_constant(name + ".w", {in, out}, T(0)) : store.add(name + ".w", {in, out}, in, gain);
  b = store.add_constant(name + ".b", {out}, T(0));
}

template <class T>
TensorT<T> Linear<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  return add(matmul(x, g.param(w)), g.param(b));
}

template <class T>
Conv2d<T>::Conv2d(ParamStore<T>& store, const std::string& name, int in_ch, int out_ch, int kernel, int s, int p)
    : stride(s), pad(p) {
  w = store.add(name + ".w", {out_ch, in_ch, kernel, kernel}, in_ch * kernel * kernel, kReluGain);
  b = store.add_constant(name + ".b", {out_ch}, T(0));
}

template <class T>
TensorT<T> Conv2d<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  return conv2d(x, g.param(w), g.param(b), stride, pad);
}

template <class T>
Deconv2d<T>::Deconv2d(ParamStore<T>& store, const std::string& name, int in_ch, int out_ch, int kernel, int s, int p)
    : stride(s), pad(p) {
  // Each output pixel sees about in_ch * (k / s)^2 inputs.
  const int per_axis = std::max(1, kernel / s);
  w = store.add(name + ".w", {in_ch, out_ch, kernel, kernel}, in_ch * per_axis * per_axis, kReluGain);
  b = store.add_constant(name + ".b", {out_ch}, T(0));
}

template <class T>
TensorT<T> Deconv2d<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  return deconv2d(x, g.param(w), g.param(b), stride, pad);
}

template <class T>
LayerNorm<T>::LayerNorm(ParamStore<T>& store, const std::string& name, int dim) {
  gamma = store.add_constant(name + ".gamma", {dim}, T(1));
  beta = store.add_constant(name + ".beta", {dim}, T(0));
}

template <class T>
TensorT<T> LayerNorm<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  return layer_norm(x, g.param(gamma), g.param(beta));
}

template <class T>
MultiHeadAttention<T>::MultiHeadAttention(ParamStore<T>& store, const std::string& name, int d_model, int h,
                                          bool zero_out)
    : q(store, name + ".q", d_model, d_model),
      k(store, name + ".k", d_model, d_model),
      v(store, name + ".v", d_model, d_model),
      o(store, name + ".o", d_model, d_model, zero_out),
      heads(h),
      dim(d_model) {
  if (h <= 0 || d_model % h != 0) fail(ErrorCode::kShapeMismatch, "d_model must be divisible by heads");
}

template <class T>
TensorT<T> MultiHeadAttention<T>::operator()(GraphT<T>& g, const TensorT<T>& query, const TensorT<T>& context) const {
  if (query.rank() != 2 || context.rank() != 2 || query.dim(1) != dim || context.dim(1) != dim)
    fail(ErrorCode::kShapeMismatch, "attention expects [L, d] inputs with d = " + std::to_string(dim));
  const TensorT<T> qp = q(g, query);
  const TensorT<T> kp = k(g, context);
  const TensorT<T> vp = v(g, context);
  const int dh = dim / heads;
  const T inv = T(1) / std::sqrt(static_cast<T>(dh));
  std::vector<TensorT<T>> outs;
  outs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    const TensorT<T> qh = slice(qp, 1, h * dh, (h + 1) * dh);
    const TensorT<T> kh = slice(kp, 1, h * dh, (h + 1) * dh);
    const TensorT<T> vh = slice(vp, 1, h * dh, (h + 1) * dh);
    const TensorT<T> att = softmax(scale(matmul(qh, transpose(kh)), inv), 1);
    outs.push_back(matmul(att, vh));
  }
  return o(g, heads == 1 ? outs[0] : concat(outs, 1));
}

template <class T>
FeedForward<T>::FeedForward(ParamStore<T>& store, const std::string& name, int d_model, int hidden, bool zero_out)
    : fc1(store, name + ".fc1", d_model, hidden), fc2(store, name + ".fc2", hidden, d_model, zero_out) {}

template <class T>
TensorT<T> FeedForward<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  return fc2(g, gelu(fc1(g, x)));
}

template <class T>
EncoderLayer<T>::EncoderLayer(ParamStore<T>& store, const std::string& name, int d_model, int heads, int hidden)
    : ln1(store, name + ".ln1", d_model),
      ln2(store, name + ".ln2", d_model),
      attn(store, name + ".attn", d_model, heads),
      ff(store, name + ".ff", d_model, hidden) {}

template <class T>
TensorT<T> EncoderLayer<T>::operator()(GraphT<T>& g, const TensorT<T>& x) const {
  const TensorT<T> h = ln1(g, x);
  const TensorT<T> y = add(x, attn(g, h, h));
  return add(y, ff(g, ln2(g, y)));
}

template <class T>
DecoderLayer<T>::DecoderLayer(ParamStore<T>& store, const std::string& name, int d_model, int heads, int hidden)
    : ln1(store, name + ".ln1", d_model),
      ln2(store, name + ".ln2", d_model),
      ln3(store, name + ".ln3", d_model),
      self_attn(store, name + ".self", d_model, heads),
      cross_attn(store, name + ".cross", d_model, heads),
      ff(store, name + ".ff", d_model, hidden) {}

template <class T>
TensorT<T> DecoderLayer<T>::operator()(GraphT<T>& g, const TensorT<T>& x, const TensorT<T>& memory) const {
  const TensorT<T> h = ln1(g, x);
  TensorT<T> y = add(x, self_attn(g, h, h));
  y = add(y, cross_attn(g, ln2(g, y), memory));
  return add(y, ff(g, ln3(g, y)));
}

template struct Linear<float>;
template struct Linear<double>;
template struct Conv2d<float>;
template struct Conv2d<double>;
template struct Deconv2d<float>;
template struct Deconv2d<double>;
template struct LayerNorm<float>;
template struct LayerNorm<double>;
template struct MultiHeadAttention<float>;
template struct MultiHeadAttention<double>;
template struct FeedForward<float>;
template struct FeedForward<double>;
template struct EncoderLayer<float>;
template struct EncoderLayer<double>;
template struct DecoderLayer<float>;
template struct DecoderLayer<double>;

}  // namespace mion::nn
