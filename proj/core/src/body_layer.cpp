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

#include "mion/body_layer.hpp"

#include <cmath>

#include "mion/errors.hpp"

namespace mion {

RodriguesCoeffs rodrigues_coeffs(double t) {
  const double t2 = t * t;
  if (t < 0.05) {
    const double t4 = t2 * t2;
    return {1.0 - t2 / 6.0 + t4 / 120.0, 0.5 - t2 / 24.0 + t4 / 720.0, -1.0 / 3.0 + t2 / 30.0 - t4 / 840.0,
            -1.0 / 12.0 + t2 / 180.0 - t4 / 6720.0};
  }
  const double s = std::sin(t), c = std::cos(t);
  return {s / t, (1.0 - c) / t2, (t * c - s) / (t2 * t), (t * s - 2.0 + 2.0 * c) / (t2 * t2)};
}

namespace {

double frob_dot(const Mat3& a, const Mat3& b) {
  double s = 0;
  for (int i = 0; i < 9; ++i) s += a.m[i] * b.m[i];
  return s;
}

Mat3 outer(Vec3 a, Vec3 b) {
  return Mat3{{a.x * b.x, a.x * b.y, a.x * b.z, a.y * b.x, a.y * b.y, a.y * b.z, a.z * b.x, a.z * b.y, a.z * b.z}};
}

}  // namespace

Vec3 rodrigues_backward(Vec3 v, const Mat3& d_r) {
  // R = I + A K + B K^2, K = skew(v)
  const double theta = norm(v);
  const RodriguesCoeffs c = rodrigues_coeffs(theta);
  const Mat3 k = skew(v);
  const Mat3 k2 = k * k;
  const double ga = frob_dot(d_r, k), gb = frob_dot(d_r, k2);
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    Vec3 e;
    e[i] = 1.0;
    const Mat3 ei = skew(e);
    const Mat3 dk2 = ei * k + k * ei;
    out[i] = c.da_t * v[i] * ga + c.a * frob_dot(d_r, ei) + c.db_t * v[i] * gb + c.b * frob_dot(d_r, dk2);
  }
  return out;
}

template <class T>
struct BodyJointsLayer<T>::Data {
  int n = 0, k = 0, s = 0;
  std::vector<int> parents;
  std::vector<Vec3> rest;
  std::vector<double> c;  // N x K
  std::vector<Vec3> p;    // N x K
  std::vector<Vec3> q;    // (N x K) x S
};

template <class T>
BodyJointsLayer<T>::BodyJointsLayer(const BodyModel& model) {
  auto d = std::make_shared<Data>();
  const int N = model.num_regressed, K = model.num_joints, S = model.num_betas, V = model.num_vertices;
  d->n = N;
  d->k = K;
  d->s = S;
  d->parents = model.parents;
  for (int j = 0; j < K; ++j) d->rest.push_back(model.rest_joint(j));
  d->c.assign(static_cast<size_t>(N) * K, 0.0);
  d->p.assign(static_cast<size_t>(N) * K, Vec3{});
  d->q.assign(static_cast<size_t>(N) * K * S, Vec3{});
  for (int n = 0; n < N; ++n)
    for (int v = 0; v < V; ++v) {
      const double r = model.joint_regressor[static_cast<size_t>(n) * V + v];
      if (r == 0.0) continue;
      for (int j = 0; j < K; ++j) {
        const double w = r * model.skin_weights[static_cast<size_t>(v) * K + j];
        if (w == 0.0) continue;
        const size_t nk = static_cast<size_t>(n) * K + j;
        d->c[nk] += w;
        d->p[nk] += w * model.vertex(v);
        for (int b = 0; b < S; ++b) {
          Vec3 col;
          for (int ax = 0; ax < 3; ++ax) col[ax] = model.shape_basis[(static_cast<size_t>(v) * 3 + ax) * S + b];
          d->q[nk * S + b] += w * col;
        }
      }
    }
  d_ = std::move(d);
}

template <class T>
int BodyJointsLayer<T>::num_regressed() const {
  return d_->n;
}

template <class T>
nn::TensorT<T> BodyJointsLayer<T>::operator()(const nn::TensorT<T>& pose, const nn::TensorT<T>& beta) const {
  const Data& d = *d_;
  if (pose.rank() != 2 || pose.dim(0) != d.k || pose.dim(1) != 3 || beta.size() != d.s)
    fail(ErrorCode::kShapeMismatch, "body layer expects pose [K,3] and beta [S]");
  const int N = d.n, K = d.k, S = d.s;
  const auto pv = pose.data();
  const auto bv = beta.data();
  std::vector<Mat3> rl(K), rg(K);
  std::vector<Vec3> tg(K);
  for (int j = 0; j < K; ++j) {
    rl[j] = rodrigues(AxisAngle{{pv[3 * j], pv[3 * j + 1], pv[3 * j + 2]}});
    const int par = d.parents[j];
    const Vec3 off = d.rest[j] - rl[j] * d.rest[j];
    if (par < 0) {
      rg[j] = rl[j];
      tg[j] = off;
    } else {
      rg[j] = rg[par] * rl[j];
      tg[j] = rg[par] * off + tg[par];
    }
  }
  // a_nk = P_nk + Q_nk beta
  std::vector<Vec3> a(static_cast<size_t>(N) * K);
  std::vector<T> out(static_cast<size_t>(N) * 3);
  for (int n = 0; n < N; ++n) {
    Vec3 acc;
    for (int j = 0; j < K; ++j) {
      const size_t nk = static_cast<size_t>(n) * K + j;
      if (d.c[nk] == 0.0) continue;
      Vec3 an = d.p[nk];
      for (int b = 0; b < S; ++b) an += static_cast<double>(bv[b]) * d.q[nk * S + b];
      a[nk] = an;
      acc += rg[j] * an + d.c[nk] * tg[j];
    }
    out[3 * n] = static_cast<T>(acc.x);
    out[3 * n + 1] = static_cast<T>(acc.y);
    out[3 * n + 2] = static_cast<T>(acc.z);
  }
  auto data = d_;
  return nn::make_result<T>({N, 3}, std::move(out), {pose, beta},
                            [data, rl = std::move(rl), rg = std::move(rg), a = std::move(a)](nn::Node<T>& nd) {
                              const Data& d = *data;
                              const int N = d.n, K = d.k, S = d.s;
                              nn::Node<T>& pp = *nd.parents[0];
                              nn::Node<T>& pb = *nd.parents[1];
                              std::vector<Mat3> grg(K);
                              std::vector<Vec3> gtg(K);
                              std::vector<double> gbeta(S, 0.0);
                              for (int n = 0; n < N; ++n) {
                                const Vec3 g{nd.grad[3 * n], nd.grad[3 * n + 1], nd.grad[3 * n + 2]};
                                for (int j = 0; j < K; ++j) {
                                  const size_t nk = static_cast<size_t>(n) * K + j;
                                  if (d.c[nk] == 0.0) continue;
                                  grg[j] = grg[j] + outer(g, a[nk]);
                                  gtg[j] += d.c[nk] * g;
                                  if (pb.requires_grad) {
                                    const Vec3 rtg = rg[j].transposed() * g;
                                    for (int b = 0; b < S; ++b) gbeta[b] += dot(rtg, d.q[nk * S + b]);
                                  }
                                }
                              }
                              if (pb.requires_grad)
                                for (int b = 0; b < S; ++b) pb.grad[b] += static_cast<T>(gbeta[b]);
                              if (!pp.requires_grad) return;
                              for (int j = K - 1; j >= 0; --j) {
                                const int par = d.parents[j];
                                const Vec3 jr = d.rest[j];
                                Mat3 dr;
                                if (par < 0) {
                                  dr = grg[j] + (-1.0) * outer(gtg[j], jr);
                                } else {
                                  const Mat3 rpt = rg[par].transposed();
                                  const Vec3 off = jr - rl[j] * jr;
                                  grg[par] = grg[par] + grg[j] * rl[j].transposed() + outer(gtg[j], off);
                                  gtg[par] += gtg[j];
                                  dr = rpt * grg[j] + (-1.0) * outer(rpt * gtg[j], jr);
                                }
                                const Vec3 v{static_cast<double>(pp.value[3 * j]), static_cast<double>(pp.value[3 * j + 1]),
                                             static_cast<double>(pp.value[3 * j + 2])};
                                const Vec3 gv = rodrigues_backward(v, dr);
                                for (int ax = 0; ax < 3; ++ax) pp.grad[3 * j + ax] += static_cast<T>(gv[ax]);
                              }
                            });
}

template <class T>
nn::TensorT<T> project_joints(const nn::TensorT<T>& j3d, const nn::TensorT<T>& t, const Intrinsics& intr,
                              std::vector<char>* behind) {
  if (j3d.rank() != 2 || j3d.dim(1) != 3 || t.size() != 3)
    fail(ErrorCode::kShapeMismatch, "project_joints expects [N,3] points and a 3-vector");
  const int N = j3d.dim(0);
  const auto p = j3d.data();
  const auto tv = t.data();
  std::vector<T> out(static_cast<size_t>(N) * 2, T(0));
  std::vector<char> mask(N, 0);
  for (int n = 0; n < N; ++n) {
    const double z = static_cast<double>(p[3 * n + 2]) + tv[2];
    if (z <= 1e-6) {
      mask[n] = 1;
      continue;
    }
    out[2 * n] = static_cast<T>(intr.f * (static_cast<double>(p[3 * n]) + tv[0]) / z + intr.c1);
    out[2 * n + 1] = static_cast<T>(intr.f * (static_cast<double>(p[3 * n + 1]) + tv[1]) / z + intr.c2);
  }
  if (behind) *behind = mask;
  const double f = intr.f;
  return nn::make_result<T>({N, 2}, std::move(out), {j3d, t}, [N, f, mask](nn::Node<T>& nd) {
    nn::Node<T>& pj = *nd.parents[0];
    nn::Node<T>& pt = *nd.parents[1];
    for (int n = 0; n < N; ++n) {
      if (mask[n]) continue;
      const double x = static_cast<double>(pj.value[3 * n]) + pt.value[0];
      const double y = static_cast<double>(pj.value[3 * n + 1]) + pt.value[1];
      const double z = static_cast<double>(pj.value[3 * n + 2]) + pt.value[2];
      const double gu = nd.grad[2 * n], gv = nd.grad[2 * n + 1];
      const double dx = f * gu / z, dy = f * gv / z, dz = -f * (gu * x + gv * y) / (z * z);
      if (pj.requires_grad) {
        pj.grad[3 * n] += static_cast<T>(dx);
        pj.grad[3 * n + 1] += static_cast<T>(dy);
        pj.grad[3 * n + 2] += static_cast<T>(dz);
      }
      if (pt.requires_grad) {
        pt.grad[0] += static_cast<T>(dx);
        pt.grad[1] += static_cast<T>(dy);
        pt.grad[2] += static_cast<T>(dz);
      }
    }
  });
}

template class BodyJointsLayer<float>;
template class BodyJointsLayer<double>;
template nn::TensorT<float> project_joints(const nn::TensorT<float>&, const nn::TensorT<float>&, const Intrinsics&,
                                           std::vector<char>*);
template nn::TensorT<double> project_joints(const nn::TensorT<double>&, const nn::TensorT<double>&,
                                            const Intrinsics&, std::vector<char>*);

}  // namespace mion
