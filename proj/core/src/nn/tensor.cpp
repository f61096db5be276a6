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

#include "mion/nn/tensor.hpp"

#include <cblas.h>

#include <cmath>
#include <mutex>
#include <random>
#include <unordered_set>

#include "mion/errors.hpp"

namespace mion::nn {

std::int64_t numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

template <class T>
TensorT<T> TensorT<T>::constant(Shape shape, std::vector<T> values) {
  if (numel(shape) != static_cast<std::int64_t>(values.size()))
    fail(ErrorCode::kShapeMismatch, "tensor data does not match shape " + shape_str(shape));
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  return TensorT(n);
}

template <class T>
TensorT<T> TensorT<T>::variable(Shape shape, std::vector<T> values) {
  TensorT t = constant(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  return t;
}

template <class T>
TensorT<T> TensorT<T>::zeros(Shape shape, bool requires_grad) {
  const auto n = numel(shape);
  TensorT t = constant(std::move(shape), std::vector<T>(n, T(0)));
  t.node_->requires_grad = requires_grad;
  return t;
}

template <class T>
TensorT<T> TensorT<T>::scalar(T v) {
  return constant({}, {v});
}

template <class T>
T TensorT<T>::item() const {
  if (node_->value.size() != 1) fail(ErrorCode::kShapeMismatch, "item() on non-scalar " + shape_str(shape()));
  return node_->value[0];
}

template <class T>
void TensorT<T>::backward() {
  if (node_->value.size() != 1) fail(ErrorCode::kShapeMismatch, "backward() needs a scalar output");
  if (!node_->requires_grad) return;
  // Iterative post-order DFS for a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node<T>* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  for (Node<T>* n : order) n->ensure_grad();
  node_->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
}

template <class T>
TensorT<T> make_result(Shape shape, std::vector<T> value, std::vector<TensorT<T>> parents,
                       std::function<void(Node<T>&)> fn) {
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  for (auto& p : parents) {
    if (p.requires_grad()) n->requires_grad = true;
  }
  if (n->requires_grad) {
    for (auto& p : parents) n->parents.push_back(p.ptr());
    n->backward_fn = std::move(fn);
  }
  return TensorT<T>(n);
}

namespace {
std::once_flag blas_once;
void init_blas() {
  std::call_once(blas_once, [] { openblas_set_num_threads(1); });
}
}  // namespace

template <>
void gemm<float>(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, const float* b, float beta,
                 float* c) {
  init_blas();
  if (m == 0 || n == 0) return;
  cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m, n, k, alpha, a,
              ta ? m : k, b, tb ? k : n, beta, c, n);
}

template <>
void gemm<double>(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, const double* b,
                  double beta, double* c) {
  init_blas();
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m, n, k, alpha, a,
              ta ? m : k, b, tb ? k : n, beta, c, n);
}

template <class T>
Parameter<T>* ParamStore<T>::add(const std::string& name, Shape shape, int fan_in, double gain) {
  if (find(name)) fail(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  auto p = std::make_unique<Parameter<T>>();
  p->name = name;
  p->shape = shape;
  p->value.assign(numel(shape), T(0));
  if (fan_in > 0) {
    std::mt19937_64 rng(seed_ ^ fnv1a(name));
    const double bound = gain * std::sqrt(1.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (T& v : p->value) v = static_cast<T>(dist(rng));
  }
  params_.push_back(std::move(p));
  return params_.back().get();
}

template <class T>
Parameter<T>* ParamStore<T>::add_constant(const std::string& name, Shape shape, T value) {
  Parameter<T>* p = add(name, std::move(shape), 0);
  std::fill(p->value.begin(), p->value.end(), value);
  return p;
}

template <class T>
Parameter<T>* ParamStore<T>::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

template <class T>
std::int64_t ParamStore<T>::total_size() const {
  std::int64_t n = 0;
  for (auto& p : params_) n += static_cast<std::int64_t>(p->value.size());
  return n;
}

template <class T>
GradBuffer<T>::GradBuffer(const ParamStore<T>& store) {
  for (auto& p : store.params()) grads.emplace_back(p->value.size(), T(0));
}

template <class T>
void GradBuffer<T>::zero() {
  for (auto& g : grads) std::fill(g.begin(), g.end(), T(0));
}

template <class T>
void GradBuffer<T>::add(const GradBuffer& other) {
  for (size_t i = 0; i < grads.size(); ++i)
    for (size_t j = 0; j < grads[i].size(); ++j) grads[i][j] += other.grads[i][j];
}

template <class T>
void GradBuffer<T>::scale(T s) {
  for (auto& g : grads)
    for (T& v : g) v *= s;
}

template <class T>
T GradBuffer<T>::global_norm() const {
  double s = 0;
  for (auto& g : grads)
    for (T v : g) s += static_cast<double>(v) * v;
  return static_cast<T>(std::sqrt(s));
}

template <class T>
TensorT<T> GraphT<T>::param(const Parameter<T>* p) {
  auto it = bound_.find(p);
  if (it != bound_.end()) return it->second;
  TensorT<T> leaf = record_ ? TensorT<T>::variable(p->shape, p->value) : TensorT<T>::constant(p->shape, p->value);
  bound_.emplace(p, leaf);
  return leaf;
}

template <class T>
void GraphT<T>::accumulate(const ParamStore<T>& store, GradBuffer<T>& out) const {
  const auto& ps = store.params();
  for (size_t i = 0; i < ps.size(); ++i) {
    auto it = bound_.find(ps[i].get());
    if (it == bound_.end()) continue;
    const auto g = it->second.grad();
    if (g.empty()) continue;
    auto& dst = out.grads[i];
    for (size_t j = 0; j < dst.size(); ++j) dst[j] += g[j];
  }
}

template class TensorT<float>;
template class TensorT<double>;
template TensorT<float> make_result(Shape, std::vector<float>, std::vector<TensorT<float>>,
                                    std::function<void(Node<float>&)>);
template TensorT<double> make_result(Shape, std::vector<double>, std::vector<TensorT<double>>,
                                     std::function<void(Node<double>&)>);
template class ParamStore<float>;
template class ParamStore<double>;
template struct GradBuffer<float>;
template struct GradBuffer<double>;
template class GraphT<float>;
template class GraphT<double>;

}  // namespace mion::nn
