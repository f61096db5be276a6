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

// Minimal reverse-mode autodiff tensor. Every op records its parents and a
// backward closure; backward() walks the recorded graph in reverse
// topological order. Scalar type is float for training and double for the
// gradient-check shadow mode.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mion::nn {

using Shape = std::vector<int>;

std::int64_t numel(const Shape& s);
std::string shape_str(const Shape& s);

template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

template <class T>
class TensorT {
 public:
  TensorT() = default;
  explicit TensorT(std::shared_ptr<Node<T>> n) : node_(std::move(n)) {}

  static TensorT constant(Shape shape, std::vector<T> values);
  static TensorT variable(Shape shape, std::vector<T> values);  // requires_grad leaf
  static TensorT zeros(Shape shape, bool requires_grad = false);
  static TensorT scalar(T v);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape[i < 0 ? i + rank() : i]; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(node_->value.size()); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const T> data() const { return node_->value; }
  std::span<T> mutable_data() { return node_->value; }
  std::span<const T> grad() const { return node_->grad; }
  T item() const;

  /// Seeds d(this)/d(this) = 1 (scalar only) and propagates to all leaves.
  void backward();

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& ptr() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

/// Creates an op result. Requires grad iff any parent does; `fn` then runs
/// during backward with the result node (its grad already populated).
template <class T>
TensorT<T> make_result(Shape shape, std::vector<T> value, std::vector<TensorT<T>> parents,
                       std::function<void(Node<T>&)> fn);

/// C = alpha * op(A) op(B) + beta * C, row-major.
template <class T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, const T* b, T beta, T* c);

// ---------------------------------------------------------------------------
// Parameters and per-worker graphs.

template <class T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
};

/// Owns named parameters in insertion order (the checkpoint order).
template <class T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  /// Adds a parameter initialized uniform(-gain sqrt(1/fan_in), gain sqrt(1/fan_in))
  /// from a generator seeded by (seed, name). fan_in <= 0 means zeros.
  Parameter<T>* add(const std::string& name, Shape shape, int fan_in, double gain = 1.0);
  Parameter<T>* add_constant(const std::string& name, Shape shape, T value);

  Parameter<T>* find(const std::string& name);
  const std::vector<std::unique_ptr<Parameter<T>>>& params() const { return params_; }
  std::int64_t total_size() const;

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::vector<std::unique_ptr<Parameter<T>>> params_;
};

/// Gradient accumulator aligned with a ParamStore's order.
template <class T>
struct GradBuffer {
  std::vector<std::vector<T>> grads;

  explicit GradBuffer(const ParamStore<T>& store);
  void zero();
  void add(const GradBuffer& other);
  void scale(T s);
  T global_norm() const;
};

/// One recording context. Parameters are bound on first use as fresh leaves
/// holding a copy of the parameter value, so concurrent graphs over the same
/// store never share gradient storage.
template <class T>
class GraphT {
 public:
  /// With `record` false parameters bind as constants and nothing is taped.
  explicit GraphT(bool record = true) : record_(record) {}

  TensorT<T> param(const Parameter<T>* p);
  /// Adds the bound leaves' gradients into `out` (unused parameters add nothing).
  void accumulate(const ParamStore<T>& store, GradBuffer<T>& out) const;

 private:
  bool record_ = true;
  std::unordered_map<const Parameter<T>*, TensorT<T>> bound_;
};

using Graph = GraphT<float>;

std::uint64_t fnv1a(const std::string& s);

}  // namespace mion::nn
