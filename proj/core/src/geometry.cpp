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

#include "mion/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "mion/errors.hpp"

namespace mion {

Mat3 Mat3::transposed() const {
  return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double Mat3::frobenius() const {
  double s = 0;
  for (double x : m) s += x * x;
  return std::sqrt(s);
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c.m[i] = a.m[i] + b.m[i];
  return c;
}

Mat3 operator*(double s, const Mat3& a) {
  Mat3 c;
  for (int i = 0; i < 9; ++i) c.m[i] = s * a.m[i];
  return c;
}

Mat3 skew(Vec3 v) { return Mat3{{0, -v.z, v.y, v.z, 0, -v.x, -v.y, v.x, 0}}; }

RotationMatrix rodrigues(AxisAngle a) {
  const double t2 = dot(a.v, a.v);
  const double t = std::sqrt(t2);
  double sa, cb;  // sin(t)/t and (1-cos t)/t^2
  if (t < 1e-4) {
    sa = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    cb = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    sa = std::sin(t) / t;
    cb = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = skew(a.v);
  return Mat3::identity() + sa * k + cb * (k * k);
}

AxisAngle log_map(const RotationMatrix& r) {
  const Vec3 w{0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1))};
  const double s = norm(w);
  const double c = 0.5 * (r(0, 0) + r(1, 1) + r(2, 2) - 1.0);
  const double theta = std::atan2(s, c);
  if (theta < 1e-6) return {(1.0 + theta * theta / 6.0) * w};
  if (theta < std::numbers::pi - 1e-3) return {(theta / s) * w};
  // Near a half turn the antisymmetric part vanishes; read the axis from nn^T.
  const double one_minus_c = 1.0 - std::cos(theta);
  Mat3 nn;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      nn(i, j) = (0.5 * (r(i, j) + r(j, i)) - (i == j ? std::cos(theta) : 0.0)) / one_minus_c;
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (nn(i, i) > nn(best, best)) best = i;
  Vec3 n{nn(0, best), nn(1, best), nn(2, best)};
  n = (1.0 / norm(n)) * n;
  if (dot(n, w) < 0) n = -n;
  return {theta * n};
}

AxisAngle canonicalize(AxisAngle a) {
  const double t = norm(a.v);
  if (t <= std::numbers::pi) return a;
  const double two_pi = 2.0 * std::numbers::pi;
  double wrapped = t - two_pi * std::round(t / two_pi);
  return {(wrapped / t) * a.v};
}

Vec3 solve_3x3(const Mat3& a, Vec3 b) {
  const double d = a.det();
  const double scale = a.frobenius();
  if (!std::isfinite(d) || std::abs(d) < 1e-12 * scale * scale * scale || scale == 0.0)
    fail(ErrorCode::kSingularSystem, "3x3 system is singular");
  // x = adj(A) b / det(A)
  const auto& m = a.m;
  const double c00 = m[4] * m[8] - m[5] * m[7];
  const double c01 = m[2] * m[7] - m[1] * m[8];
  const double c02 = m[1] * m[5] - m[2] * m[4];
  const double c10 = m[5] * m[6] - m[3] * m[8];
  const double c11 = m[0] * m[8] - m[2] * m[6];
  const double c12 = m[2] * m[3] - m[0] * m[5];
  const double c20 = m[3] * m[7] - m[4] * m[6];
  const double c21 = m[1] * m[6] - m[0] * m[7];
  const double c22 = m[0] * m[4] - m[1] * m[3];
  const double inv = 1.0 / d;
  return {inv * (c00 * b.x + c01 * b.y + c02 * b.z), inv * (c10 * b.x + c11 * b.y + c12 * b.z),
          inv * (c20 * b.x + c21 * b.y + c22 * b.z)};
}

namespace {

Vec3 column(const Mat3& a, int j) { return {a(0, j), a(1, j), a(2, j)}; }

void set_column(Mat3& a, int j, Vec3 v) {
  a(0, j) = v.x;
  a(1, j) = v.y;
  a(2, j) = v.z;
}

// Any unit vector orthogonal to n.
Vec3 orthogonal_unit(Vec3 n) {
  Vec3 e = std::abs(n.x) < 0.6 ? Vec3{1, 0, 0} : (std::abs(n.y) < 0.6 ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  Vec3 o = cross(n, e);
  return (1.0 / norm(o)) * o;
}

}  // namespace

Svd3 svd_3x3(const Mat3& a) {
  Mat3 b = a;
  Mat3 v = Mat3::identity();
  constexpr double kEps = 1e-15;
  for (int sweep = 0; sweep < 30; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const Vec3 bp = column(b, p), bq = column(b, q);
        const double alpha = dot(bp, bp), beta = dot(bq, bq), gamma = dot(bp, bq);
        if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        set_column(b, p, c * bp - s * bq);
        set_column(b, q, s * bp + c * bq);
        const Vec3 vp = column(v, p), vq = column(v, q);
        set_column(v, p, c * vp - s * vq);
        set_column(v, q, s * vp + c * vq);
      }
    }
    if (!rotated) break;
  }

  std::array<int, 3> order{0, 1, 2};
  std::array<double, 3> sig{norm(column(b, 0)), norm(column(b, 1)), norm(column(b, 2))};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return sig[i] > sig[j]; });

  Svd3 out;
  const double tiny = 1e-13 * std::max(sig[order[0]], 1e-300);
  std::array<Vec3, 3> us;
  int rank = 0;
  for (int k = 0; k < 3; ++k) {
    const int j = order[k];
    out.sigma[k] = sig[j];
    set_column(out.v, k, column(v, j));
    if (sig[j] > tiny) {
      us[k] = (1.0 / sig[j]) * column(b, j);
      ++rank;
    }
  }
  if (rank == 0) {
    us[0] = {1, 0, 0};
    us[1] = {0, 1, 0};
  } else if (rank == 1) {
    us[1] = orthogonal_unit(us[0]);
  }
  if (rank < 3) {
    us[2] = cross(us[0], us[1]);
    for (int k = rank; k < 3; ++k) out.sigma[k] = 0.0;
  }
  for (int k = 0; k < 3; ++k) set_column(out.u, k, us[k]);
  return out;
}

Similarity procrustes(std::span<const Vec3> x, std::span<const Vec3> y) {
  if (x.size() != y.size() || x.size() < 3)
    fail(ErrorCode::kDegenerateCloud, "procrustes needs two clouds of equal size >= 3");
  const double n = static_cast<double>(x.size());
  Vec3 mx, my;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx = (1.0 / n) * mx;
  my = (1.0 / n) * my;

  double var_x = 0;
  Mat3 cov;  // sum (y - my)(x - mx)^T / n
  for (size_t i = 0; i < x.size(); ++i) {
    const Vec3 dx = x[i] - mx, dy = y[i] - my;
    var_x += dot(dx, dx);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cov(r, c) += dy[r] * dx[c];
  }
  var_x /= n;
  cov = (1.0 / n) * cov;
  if (!(var_x > 1e-300)) fail(ErrorCode::kDegenerateCloud, "source cloud has zero variance");

  const Svd3 svd = svd_3x3(cov);
  const double d = (svd.u.det() * svd.v.det()) < 0 ? -1.0 : 1.0;
  const Mat3 sgn = Mat3::diag(1, 1, d);
  Similarity out;
  out.r = svd.u * sgn * svd.v.transposed();
  out.s = (svd.sigma.x + svd.sigma.y + d * svd.sigma.z) / var_x;
  out.t = my - out.s * (out.r * mx);
  return out;
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
}
Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}};
}
Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
}

}  // namespace mion
