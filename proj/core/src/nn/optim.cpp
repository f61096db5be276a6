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

#include "mion/nn/optim.hpp"

#include <cmath>

#include "mion/errors.hpp"

namespace mion::nn {

template <class T>
Sgd<T>::Sgd(const ParamStore<T>& store, SgdConfig cfg) : cfg_(cfg) {
  for (auto& p : store.params()) velocity_.emplace_back(p->value.size(), T(0));
}

template <class T>
void Sgd<T>::step(ParamStore<T>& store, const GradBuffer<T>& grads) {
  const auto& ps = store.params();
  if (ps.size() != velocity_.size() || grads.grads.size() != ps.size())
    fail(ErrorCode::kShapeMismatch, "optimizer state does not match the parameter store");
  double clip = 1.0;
  if (cfg_.clip_norm > 0) {
    const double n = grads.global_norm();
    if (n > cfg_.clip_norm) clip = cfg_.clip_norm / n;
  }
  const T lr = static_cast<T>(cfg_.lr);
  const T mu = static_cast<T>(cfg_.momentum);
  const T wd = static_cast<T>(cfg_.weight_decay);
  const T c = static_cast<T>(clip);
  for (size_t i = 0; i < ps.size(); ++i) {
    auto& p = ps[i]->value;
    auto& v = velocity_[i];
    const auto& g = grads.grads[i];
    if (g.size() != p.size()) fail(ErrorCode::kShapeMismatch, "gradient size mismatch for " + ps[i]->name);
    for (size_t j = 0; j < p.size(); ++j) {
      v[j] = mu * v[j] + c * g[j];
      p[j] -= lr * (v[j] + wd * p[j]);
    }
  }
}

template <class T>
AdamW<T>::AdamW(const ParamStore<T>& store, AdamWConfig cfg) : cfg_(cfg) {
  for (auto& p : store.params()) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

template <class T>
void AdamW<T>::step(ParamStore<T>& store, const GradBuffer<T>& grads) {
  const auto& ps = store.params();
  if (ps.size() != m_.size() || grads.grads.size() != ps.size())
    fail(ErrorCode::kShapeMismatch, "optimizer state does not match the parameter store");
  double clip = 1.0;
  if (cfg_.clip_norm > 0) {
    const double n = grads.global_norm();
    if (n > cfg_.clip_norm) clip = cfg_.clip_norm / n;
  }
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (size_t i = 0; i < ps.size(); ++i) {
    auto& p = ps[i]->value;
    auto& m = m_[i];
    auto& v = v_[i];
    const auto& g = grads.grads[i];
    if (g.size() != p.size()) fail(ErrorCode::kShapeMismatch, "gradient size mismatch for " + ps[i]->name);
    for (size_t j = 0; j < p.size(); ++j) {
      const double gj = clip * static_cast<double>(g[j]);
      m[j] = b1 * m[j] + (1 - b1) * gj;
      v[j] = b2 * v[j] + (1 - b2) * gj * gj;
      const double update = (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg_.eps) + cfg_.weight_decay * p[j];
      p[j] = static_cast<T>(p[j] - cfg_.lr * update);
    }
  }
}

template <class T>
Optimizer<T>::Optimizer(const ParamStore<T>& store, const OptimConfig& cfg) {
  if (!(cfg.lr > 0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (cfg.kind == OptimConfig::Kind::kSgd)
    sgd_.emplace(store, SgdConfig{cfg.lr, cfg.momentum, cfg.weight_decay, cfg.clip_norm});
  else
    adam_.emplace(store, AdamWConfig{cfg.lr, cfg.momentum, cfg.beta2, 1e-8, cfg.weight_decay, cfg.clip_norm});
}

template <class T>
void Optimizer<T>::step(ParamStore<T>& store, const GradBuffer<T>& grads) {
  if (sgd_)
    sgd_->step(store, grads);
  else
    adam_->step(store, grads);
}

template <class T>
double Optimizer<T>::lr() const {
  return sgd_ ? sgd_->lr() : adam_->lr();
}

template <class T>
void Optimizer<T>::set_lr(double lr) {
  if (sgd_)
    sgd_->set_lr(lr);
  else
    adam_->set_lr(lr);
}

std::string optim_kind_name(OptimConfig::Kind k) { return k == OptimConfig::Kind::kSgd ? "sgd" : "adamw"; }

OptimConfig::Kind optim_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimConfig::Kind::kSgd;
  if (name == "adamw") return OptimConfig::Kind::kAdamW;
  fail(ErrorCode::kInvalidArgument, "unknown optimizer " + name);
}

double step_lr(double base, int epoch, int epochs) {
  const int drop = (epochs + 2) / 3;
  return epoch >= drop ? base * 0.1 : base;
}

template class Sgd<float>;
template class Sgd<double>;
template class AdamW<float>;
template class AdamW<double>;
template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace mion::nn
