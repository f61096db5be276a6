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

#include "mion/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mion/errors.hpp"

namespace mion::nn {

namespace {

template <class T>
using NodeP = std::shared_ptr<Node<T>>;

[[noreturn]] void mismatch(const std::string& op, const Shape& a, const Shape& b) {
  fail(ErrorCode::kShapeMismatch, op + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

// Returns the broadcast period of b over a (b.size() when b is a suffix of
// a, or 1 for scalars).
template <class T>
std::int64_t broadcast_period(const std::string& op, const TensorT<T>& a, const TensorT<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (b.size() == 1) return 1;
  if (sb.size() > sa.size()) mismatch(op, sa, sb);
  if (!std::equal(sb.rbegin(), sb.rend(), sa.rbegin())) mismatch(op, sa, sb);
  return b.size();
}

int norm_axis(int axis, int rank, const char* op) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) fail(ErrorCode::kShapeMismatch, std::string(op) + ": axis out of range");
  return axis;
}

// Splits a shape around `axis` into outer * len * inner.
void split(const Shape& s, int axis, std::int64_t& outer, int& len, std::int64_t& inner) {
  outer = 1;
  inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[i];
  len = s[axis];
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
}

enum class BinOp { kAdd, kSub, kMul, kDiv };

template <class T>
TensorT<T> binary(const TensorT<T>& a, const TensorT<T>& b, BinOp op, const char* name) {
  const std::int64_t period = broadcast_period(name, a, b);
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(av.size());
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(av.size()); ++i) {
    const T x = av[i], y = bv[i % period];
    switch (op) {
      case BinOp::kAdd: out[i] = x + y; break;
      case BinOp::kSub: out[i] = x - y; break;
      case BinOp::kMul: out[i] = x * y; break;
      case BinOp::kDiv: out[i] = x / y; break;
    }
  }
  return make_result<T>(a.shape(), std::move(out), {a, b}, [op, period](Node<T>& n) {
    Node<T>& pa = *n.parents[0];
    Node<T>& pb = *n.parents[1];
    const std::int64_t total = static_cast<std::int64_t>(n.value.size());
    for (std::int64_t i = 0; i < total; ++i) {
      const T g = n.grad[i];
      const T x = pa.value[i], y = pb.value[i % period];
      T ga = 0, gb = 0;
      switch (op) {
        case BinOp::kAdd: ga = g; gb = g; break;
        case BinOp::kSub: ga = g; gb = -g; break;
        case BinOp::kMul: ga = g * y; gb = g * x; break;
        case BinOp::kDiv: ga = g / y; gb = -g * x / (y * y); break;
      }
      if (pa.requires_grad) pa.grad[i] += ga;
      if (pb.requires_grad) pb.grad[i % period] += gb;
    }
  });
}

template <class T>
TensorT<T> unary(const TensorT<T>& a, auto fwd, auto dfdx) {
  const auto av = a.data();
  std::vector<T> out(av.size());
  for (size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return make_result<T>(a.shape(), std::move(out), {a}, [dfdx](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (size_t i = 0; i < n.value.size(); ++i) p.grad[i] += n.grad[i] * dfdx(p.value[i], n.value[i]);
  });
}

// [C, H, W] -> [C*k*k, Ho*Wo]
template <class T>
void im2col(const T* x, int c, int h, int w, int k, int s, int p, int ho, int wo, T* cols) {
  for (int ci = 0; ci < c; ++ci)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        T* row = cols + (static_cast<std::int64_t>(ci) * k * k + ky * k + kx) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * s - p + ky;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * s - p + kx;
            row[oy * wo + ox] = (iy >= 0 && iy < h && ix >= 0 && ix < w) ? x[(static_cast<std::int64_t>(ci) * h + iy) * w + ix] : T(0);
          }
        }
      }
}

// Adjoint of im2col: accumulates cols into x.
template <class T>
void col2im(const T* cols, int c, int h, int w, int k, int s, int p, int ho, int wo, T* x) {
  for (int ci = 0; ci < c; ++ci)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        const T* row = cols + (static_cast<std::int64_t>(ci) * k * k + ky * k + kx) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * s - p + ky;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * s - p + kx;
            if (ix < 0 || ix >= w) continue;
            x[(static_cast<std::int64_t>(ci) * h + iy) * w + ix] += row[oy * wo + ox];
          }
        }
      }
}

}  // namespace

template <class T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::kAdd, "add"); }
template <class T>
TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::kSub, "sub"); }
template <class T>
TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::kMul, "mul"); }
template <class T>
TensorT<T> div(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::kDiv, "div"); }

template <class T>
TensorT<T> scale(const TensorT<T>& a, T s) {
  return unary<T>(a, [s](T x) { return s * x; }, [s](T, T) { return s; });
}

template <class T>
TensorT<T> add_scalar(const TensorT<T>& a, T s) {
  return unary<T>(a, [s](T x) { return x + s; }, [](T, T) { return T(1); });
}

template <class T>
TensorT<T> relu(const TensorT<T>& a) {
  return unary<T>(a, [](T x) { return x > 0 ? x : T(0); }, [](T x, T) { return x > 0 ? T(1) : T(0); });
}

template <class T>
TensorT<T> gelu(const TensorT<T>& a) {
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary<T>(
      a, [=](T x) { return static_cast<T>(0.5 * x * (1.0 + std::erf(x * inv_sqrt2))); },
      [=](T x, T) {
        const double cdf = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
        const double pdf = inv_sqrt2pi * std::exp(-0.5 * static_cast<double>(x) * x);
        return static_cast<T>(cdf + x * pdf);
      });
}

template <class T>
TensorT<T> tanh(const TensorT<T>& a) {
  return unary<T>(a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <class T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) mismatch("matmul", a.shape(), b.shape());
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<T> out(static_cast<size_t>(m) * n);
  gemm<T>(false, false, m, n, k, T(1), a.data().data(), b.data().data(), T(0), out.data());
  return make_result<T>({m, n}, std::move(out), {a, b}, [m, k, n](Node<T>& nd) {
    Node<T>& pa = *nd.parents[0];
    Node<T>& pb = *nd.parents[1];
    if (pa.requires_grad) gemm<T>(false, true, m, k, n, T(1), nd.grad.data(), pb.value.data(), T(1), pa.grad.data());
    if (pb.requires_grad) gemm<T>(true, false, k, n, m, T(1), pa.value.data(), nd.grad.data(), T(1), pb.grad.data());
  });
}

template <class T>
TensorT<T> transpose(const TensorT<T>& a) {
  if (a.rank() != 2) fail(ErrorCode::kShapeMismatch, "transpose expects a 2-D tensor");
  const int r = a.dim(0), c = a.dim(1);
  const auto av = a.data();
  std::vector<T> out(av.size());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out[static_cast<size_t>(j) * r + i] = av[static_cast<size_t>(i) * c + j];
  return make_result<T>({c, r}, std::move(out), {a}, [r, c](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) p.grad[static_cast<size_t>(i) * c + j] += n.grad[static_cast<size_t>(j) * r + i];
  });
}

template <class T>
TensorT<T> softmax(const TensorT<T>& a, int axis) {
  axis = norm_axis(axis, a.rank(), "softmax");
  std::int64_t outer, inner;
  int len;
  split(a.shape(), axis, outer, len, inner);
  const auto av = a.data();
  std::vector<T> out(av.size());
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t in = 0; in < inner; ++in) {
      const std::int64_t base = o * len * inner + in;
      T mx = av[base];
      for (int l = 1; l < len; ++l) mx = std::max(mx, av[base + l * inner]);
      T s = 0;
      for (int l = 0; l < len; ++l) {
        const T e = std::exp(av[base + l * inner] - mx);
        out[base + l * inner] = e;
        s += e;
      }
      for (int l = 0; l < len; ++l) out[base + l * inner] /= s;
    }
  return make_result<T>(a.shape(), std::move(out), {a}, [outer, len, inner](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t in = 0; in < inner; ++in) {
        const std::int64_t base = o * len * inner + in;
        T dot = 0;
        for (int l = 0; l < len; ++l) dot += n.grad[base + l * inner] * n.value[base + l * inner];
        for (int l = 0; l < len; ++l) {
          const std::int64_t i = base + l * inner;
          p.grad[i] += n.value[i] * (n.grad[i] - dot);
        }
      }
  });
}

template <class T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gamma, const TensorT<T>& beta, int axis, T eps) {
  axis = norm_axis(axis, x.rank(), "layer_norm");
  if (axis != x.rank() - 1) fail(ErrorCode::kShapeMismatch, "layer_norm normalizes the last axis only");
  const int d = x.dim(-1);
  if (gamma.size() != d || beta.size() != d) mismatch("layer_norm", x.shape(), gamma.shape());
  const std::int64_t rows = x.size() / d;
  const auto xv = x.data();
  const auto gv = gamma.data();
  const auto bv = beta.data();
  std::vector<T> out(xv.size()), xhat(xv.size()), inv_std(rows);
  for (std::int64_t r = 0; r < rows; ++r) {
    const T* row = xv.data() + r * d;
    T mu = 0;
    for (int i = 0; i < d; ++i) mu += row[i];
    mu /= d;
    T var = 0;
    for (int i = 0; i < d; ++i) var += (row[i] - mu) * (row[i] - mu);
    var /= d;
    const T is = T(1) / std::sqrt(var + eps);
    inv_std[r] = is;
    for (int i = 0; i < d; ++i) {
      const T h = (row[i] - mu) * is;
      xhat[r * d + i] = h;
      out[r * d + i] = gv[i] * h + bv[i];
    }
  }
  return make_result<T>(x.shape(), std::move(out), {x, gamma, beta},
                        [rows, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& n) {
                          Node<T>& px = *n.parents[0];
                          Node<T>& pg = *n.parents[1];
                          Node<T>& pb = *n.parents[2];
                          std::vector<T> dxhat(d);
                          for (std::int64_t r = 0; r < rows; ++r) {
                            const T* g = n.grad.data() + r * d;
                            const T* h = xhat.data() + r * d;
                            T m1 = 0, m2 = 0;
                            for (int i = 0; i < d; ++i) {
                              if (pg.requires_grad) pg.grad[i] += g[i] * h[i];
                              if (pb.requires_grad) pb.grad[i] += g[i];
                              dxhat[i] = g[i] * pg.value[i];
                              m1 += dxhat[i];
                              m2 += dxhat[i] * h[i];
                            }
                            if (!px.requires_grad) continue;
                            m1 /= d;
                            m2 /= d;
                            for (int i = 0; i < d; ++i) px.grad[r * d + i] += inv_std[r] * (dxhat[i] - m1 - h[i] * m2);
                          }
                        });
}

template <class T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride, int pad) {
  if (x.rank() != 3 || w.rank() != 4 || w.dim(1) != x.dim(0) || w.dim(2) != w.dim(3) || b.size() != w.dim(0))
    mismatch("conv2d", x.shape(), w.shape());
  const int c = x.dim(0), h = x.dim(1), wd = x.dim(2), o = w.dim(0), k = w.dim(2);
  const int ho = (h + 2 * pad - k) / stride + 1, wo = (wd + 2 * pad - k) / stride + 1;
  if (ho <= 0 || wo <= 0 || stride <= 0) mismatch("conv2d", x.shape(), w.shape());
  const int ckk = c * k * k, hw = ho * wo;
  std::vector<T> cols(static_cast<size_t>(ckk) * hw);
  im2col(x.data().data(), c, h, wd, k, stride, pad, ho, wo, cols.data());
  std::vector<T> out(static_cast<size_t>(o) * hw);
  const auto bv = b.data();
  for (int oc = 0; oc < o; ++oc) std::fill(out.begin() + static_cast<size_t>(oc) * hw, out.begin() + static_cast<size_t>(oc + 1) * hw, bv[oc]);
  gemm<T>(false, false, o, hw, ckk, T(1), w.data().data(), cols.data(), T(1), out.data());
  return make_result<T>({o, ho, wo}, std::move(out), {x, w, b},
                        [=, cols = std::move(cols)](Node<T>& n) {
                          Node<T>& px = *n.parents[0];
                          Node<T>& pw = *n.parents[1];
                          Node<T>& pb = *n.parents[2];
                          if (pb.requires_grad)
                            for (int oc = 0; oc < o; ++oc) {
                              T s = 0;
                              for (int i = 0; i < hw; ++i) s += n.grad[static_cast<size_t>(oc) * hw + i];
                              pb.grad[oc] += s;
                            }
                          if (pw.requires_grad)
                            gemm<T>(false, true, o, ckk, hw, T(1), n.grad.data(), cols.data(), T(1), pw.grad.data());
                          if (px.requires_grad) {
                            std::vector<T> dcols(static_cast<size_t>(ckk) * hw);
                            gemm<T>(true, false, ckk, hw, o, T(1), pw.value.data(), n.grad.data(), T(0), dcols.data());
                            col2im(dcols.data(), c, h, wd, k, stride, pad, ho, wo, px.grad.data());
                          }
                        });
}

template <class T>
TensorT<T> deconv2d(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride, int pad) {
  if (x.rank() != 3 || w.rank() != 4 || w.dim(0) != x.dim(0) || w.dim(2) != w.dim(3) || b.size() != w.dim(1))
    mismatch("deconv2d", x.shape(), w.shape());
  const int c = x.dim(0), h = x.dim(1), wd = x.dim(2), o = w.dim(1), k = w.dim(2);
  const int ho = (h - 1) * stride - 2 * pad + k, wo = (wd - 1) * stride - 2 * pad + k;
  if (ho <= 0 || wo <= 0 || stride <= 0) mismatch("deconv2d", x.shape(), w.shape());
  // Check that a forward conv over the output maps back onto the input grid.
  if ((ho + 2 * pad - k) / stride + 1 != h || (wo + 2 * pad - k) / stride + 1 != wd)
    mismatch("deconv2d", x.shape(), w.shape());
  const int okk = o * k * k, hw = h * wd;
  std::vector<T> cols(static_cast<size_t>(okk) * hw);
  // cols = W^T x, W viewed as [C, O*k*k]
  gemm<T>(true, false, okk, hw, c, T(1), w.data().data(), x.data().data(), T(0), cols.data());
  std::vector<T> out(static_cast<size_t>(o) * ho * wo, T(0));
  col2im(cols.data(), o, ho, wo, k, stride, pad, h, wd, out.data());
  const auto bv = b.data();
  const int ohw = ho * wo;
  for (int oc = 0; oc < o; ++oc)
    for (int i = 0; i < ohw; ++i) out[static_cast<size_t>(oc) * ohw + i] += bv[oc];
  return make_result<T>({o, ho, wo}, std::move(out), {x, w, b}, [=](Node<T>& n) {
    Node<T>& px = *n.parents[0];
    Node<T>& pw = *n.parents[1];
    Node<T>& pb = *n.parents[2];
    if (pb.requires_grad)
      for (int oc = 0; oc < o; ++oc) {
        T s = 0;
        for (int i = 0; i < ohw; ++i) s += n.grad[static_cast<size_t>(oc) * ohw + i];
        pb.grad[oc] += s;
      }
    if (!px.requires_grad && !pw.requires_grad) return;
    std::vector<T> dcols(static_cast<size_t>(okk) * hw);
    im2col(n.grad.data(), o, ho, wo, k, stride, pad, h, wd, dcols.data());
    if (px.requires_grad) gemm<T>(false, false, c, hw, okk, T(1), pw.value.data(), dcols.data(), T(1), px.grad.data());
    if (pw.requires_grad) gemm<T>(false, true, c, okk, hw, T(1), px.value.data(), dcols.data(), T(1), pw.grad.data());
  });
}

template <class T>
TensorT<T> reshape(const TensorT<T>& a, Shape shape) {
  if (numel(shape) != a.size()) mismatch("reshape", a.shape(), shape);
  std::vector<T> out(a.data().begin(), a.data().end());
  return make_result<T>(std::move(shape), std::move(out), {a}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
  });
}

template <class T>
TensorT<T> concat(const std::vector<TensorT<T>>& parts, int axis) {
  if (parts.empty()) fail(ErrorCode::kShapeMismatch, "concat of nothing");
  const Shape& s0 = parts[0].shape();
  axis = norm_axis(axis, static_cast<int>(s0.size()), "concat");
  Shape out_shape = s0;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != static_cast<int>(s0.size())) mismatch("concat", s0, p.shape());
    for (int i = 0; i < p.rank(); ++i)
      if (i != axis && p.dim(i) != s0[i]) mismatch("concat", s0, p.shape());
    out_shape[axis] += p.dim(axis);
  }
  std::int64_t outer, inner;
  int total;
  split(out_shape, axis, outer, total, inner);
  std::vector<T> out(numel(out_shape));
  std::vector<int> offsets;
  int off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    const int len = p.dim(axis);
    const auto pv = p.data();
    for (std::int64_t o = 0; o < outer; ++o)
      std::copy(pv.begin() + o * len * inner, pv.begin() + (o + 1) * len * inner,
                out.begin() + (o * total + off) * inner);
    off += len;
  }
  return make_result<T>(out_shape, std::move(out), parts, [outer, total, inner, offsets](Node<T>& n) {
    for (size_t pi = 0; pi < n.parents.size(); ++pi) {
      Node<T>& p = *n.parents[pi];
      if (!p.requires_grad) continue;
      const int len = static_cast<int>(p.value.size() / (outer * inner));
      for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t i = 0; i < len * inner; ++i)
          p.grad[o * len * inner + i] += n.grad[(o * total + offsets[pi]) * inner + i];
    }
  });
}

template <class T>
TensorT<T> slice(const TensorT<T>& a, int axis, int begin, int end) {
  axis = norm_axis(axis, a.rank(), "slice");
  if (begin < 0 || end > a.dim(axis) || begin >= end)
    fail(ErrorCode::kShapeMismatch, "slice bounds out of range for " + shape_str(a.shape()));
  std::int64_t outer, inner;
  int len;
  split(a.shape(), axis, outer, len, inner);
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const int sl = end - begin;
  const auto av = a.data();
  std::vector<T> out(numel(out_shape));
  for (std::int64_t o = 0; o < outer; ++o)
    std::copy(av.begin() + (o * len + begin) * inner, av.begin() + (o * len + end) * inner,
              out.begin() + o * sl * inner);
  return make_result<T>(std::move(out_shape), std::move(out), {a}, [=](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t i = 0; i < sl * inner; ++i) p.grad[(o * len + begin) * inner + i] += n.grad[o * sl * inner + i];
  });
}

template <class T>
TensorT<T> sum(const TensorT<T>& a) {
  T s = 0;
  for (T v : a.data()) s += v;
  return make_result<T>({}, {s}, {a}, [](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    for (T& g : p.grad) g += n.grad[0];
  });
}

template <class T>
TensorT<T> mean(const TensorT<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <class T>
TensorT<T> mean(const TensorT<T>& a, int axis) {
  axis = norm_axis(axis, a.rank(), "mean");
  std::int64_t outer, inner;
  int len;
  split(a.shape(), axis, outer, len, inner);
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + axis);
  const auto av = a.data();
  std::vector<T> out(outer * inner, T(0));
  for (std::int64_t o = 0; o < outer; ++o)
    for (int l = 0; l < len; ++l)
      for (std::int64_t i = 0; i < inner; ++i) out[o * inner + i] += av[(o * len + l) * inner + i];
  for (T& v : out) v /= len;
  return make_result<T>(std::move(out_shape), std::move(out), {a}, [=](Node<T>& n) {
    Node<T>& p = *n.parents[0];
    if (!p.requires_grad) return;
    const T inv = T(1) / len;
    for (std::int64_t o = 0; o < outer; ++o)
      for (int l = 0; l < len; ++l)
        for (std::int64_t i = 0; i < inner; ++i) p.grad[(o * len + l) * inner + i] += n.grad[o * inner + i] * inv;
  });
}

template <class T>
TensorT<T> mse_loss(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.shape() != b.shape()) mismatch("mse_loss", a.shape(), b.shape());
  const TensorT<T> d = sub(a, b);
  return mean(mul(d, d));
}

template <class T>
TensorT<T> l2_loss(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.size() != b.size()) mismatch("l2_loss", a.shape(), b.shape());
  const auto av = a.data();
  const auto bv = b.data();
  T s = 0;
  for (size_t i = 0; i < av.size(); ++i) s += (av[i] - bv[i]) * (av[i] - bv[i]);
  const T norm = std::sqrt(s);
  return make_result<T>({}, {norm}, {a, b}, [norm](Node<T>& n) {
    if (norm == T(0)) return;
    Node<T>& pa = *n.parents[0];
    Node<T>& pb = *n.parents[1];
    const T g = n.grad[0] / norm;
    for (size_t i = 0; i < pa.value.size(); ++i) {
      const T d = pa.value[i] - pb.value[i];
      if (pa.requires_grad) pa.grad[i] += g * d;
      if (pb.requires_grad) pb.grad[i] -= g * d;
    }
  });
}

template <class T>
TensorT<T> l1_loss(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.size() != b.size()) mismatch("l1_loss", a.shape(), b.shape());
  const auto av = a.data();
  const auto bv = b.data();
  T s = 0;
  for (size_t i = 0; i < av.size(); ++i) s += std::abs(av[i] - bv[i]);
  const T count = static_cast<T>(av.size());
  return make_result<T>({}, {s / count}, {a, b}, [count](Node<T>& n) {
    Node<T>& pa = *n.parents[0];
    Node<T>& pb = *n.parents[1];
    const T g = n.grad[0] / count;
    for (size_t i = 0; i < pa.value.size(); ++i) {
      const T d = pa.value[i] - pb.value[i];
      const T sg = d > 0 ? g : (d < 0 ? -g : T(0));
      if (pa.requires_grad) pa.grad[i] += sg;
      if (pb.requires_grad) pb.grad[i] -= sg;
    }
  });
}

#define MION_INSTANTIATE_OPS(T)                                                                       \
  template TensorT<T> add(const TensorT<T>&, const TensorT<T>&);                                      \
  template TensorT<T> sub(const TensorT<T>&, const TensorT<T>&);                                      \
  template TensorT<T> mul(const TensorT<T>&, const TensorT<T>&);                                      \
  template TensorT<T> div(const TensorT<T>&, const TensorT<T>&);                                      \
  template TensorT<T> scale(const TensorT<T>&, T);                                                    \
  template TensorT<T> add_scalar(const TensorT<T>&, T);                                               \
  template TensorT<T> matmul(const TensorT<T>&, const TensorT<T>&);                                   \
  template TensorT<T> transpose(const TensorT<T>&);                                                   \
  template TensorT<T> relu(const TensorT<T>&);                                                        \
  template TensorT<T> gelu(const TensorT<T>&);                                                        \
  template TensorT<T> tanh(const TensorT<T>&);                                                        \
  template TensorT<T> softmax(const TensorT<T>&, int);                                                \
  template TensorT<T> layer_norm(const TensorT<T>&, const TensorT<T>&, const TensorT<T>&, int, T);    \
  template TensorT<T> conv2d(const TensorT<T>&, const TensorT<T>&, const TensorT<T>&, int, int);      \
  template TensorT<T> deconv2d(const TensorT<T>&, const TensorT<T>&, const TensorT<T>&, int, int);    \
  template TensorT<T> reshape(const TensorT<T>&, Shape);                                              \
  template TensorT<T> concat(const std::vector<TensorT<T>>&, int);                                    \
  template TensorT<T> slice(const TensorT<T>&, int, int, int);                                        \
  template TensorT<T> sum(const TensorT<T>&);                                                         \
  template TensorT<T> mean(const TensorT<T>&);                                                        \
  template TensorT<T> mean(const TensorT<T>&, int);                                                   \
  template TensorT<T> mse_loss(const TensorT<T>&, const TensorT<T>&);                                 \
  template TensorT<T> l2_loss(const TensorT<T>&, const TensorT<T>&);                                  \
  template TensorT<T> l1_loss(const TensorT<T>&, const TensorT<T>&);

MION_INSTANTIATE_OPS(float)
MION_INSTANTIATE_OPS(double)

}  // namespace mion::nn
