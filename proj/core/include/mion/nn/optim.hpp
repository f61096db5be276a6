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

#include <optional>
#include <string>
#include <vector>

#include "mion/nn/tensor.hpp"

namespace mion::nn {

struct SgdConfig {
  double lr = 1e-2;
  double momentum = 0.9;
  double weight_decay = 0.0;  // decoupled: p -= lr * wd * p
  double clip_norm = 0.0;     // global gradient norm clip, 0 disables
};

/// SGD with heavy-ball momentum and decoupled weight decay:
///   v = mu v + g;  p -= lr (v + wd p)
template <class T>
class Sgd {
 public:
  Sgd(const ParamStore<T>& store, SgdConfig cfg);

  void step(ParamStore<T>& store, const GradBuffer<T>& grads);

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  const SgdConfig& config() const { return cfg_; }
  const std::vector<std::vector<T>>& velocity() const { return velocity_; }

 private:
  SgdConfig cfg_;
  std::vector<std::vector<T>> velocity_;
};

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: p -= lr * wd * p
  double clip_norm = 0.0;
};

/// Adam with bias correction and decoupled weight decay:
///   p -= lr (m_hat / (sqrt(v_hat) + eps) + wd p)
template <class T>
class AdamW {
 public:
  AdamW(const ParamStore<T>& store, AdamWConfig cfg);

  void step(ParamStore<T>& store, const GradBuffer<T>& grads);

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  const AdamWConfig& config() const { return cfg_; }
  long steps() const { return t_; }

 private:
  AdamWConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

/// Trainer-facing choice between the two optimizers.
struct OptimConfig {
  enum class Kind { kSgd, kAdamW };
  Kind kind = Kind::kAdamW;
  double lr = 1e-3;
  double momentum = 0.9;  // SGD momentum, Adam beta1
  double beta2 = 0.999;
  double weight_decay = 0.0;
  double clip_norm = 0.0;
};

template <class T>
class Optimizer {
 public:
  Optimizer(const ParamStore<T>& store, const OptimConfig& cfg);
  void step(ParamStore<T>& store, const GradBuffer<T>& grads);
  double lr() const;
  void set_lr(double lr);

 private:
  std::optional<Sgd<T>> sgd_;
  std::optional<AdamW<T>> adam_;
};

std::string optim_kind_name(OptimConfig::Kind k);
OptimConfig::Kind optim_kind_from_name(const std::string& name);

/// Step schedule: base until epoch >= ceil(epochs / 3), then base * 0.1.
double step_lr(double base, int epoch, int epochs);

}  // namespace mion::nn
