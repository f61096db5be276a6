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

// Small fixed-size linear algebra used across the pipeline: rotations,
// 3x3 solves and similarity (Procrustes) alignment. All in double.

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mion {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return s * a; }
  Vec3& operator+=(Vec3 b) { x += b.x; y += b.y; z += b.z; return *this; }
  Vec3& operator-=(Vec3 b) { x -= b.x; y -= b.y; z -= b.z; return *this; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static Mat3 diag(double a, double b, double c) { return Mat3{{a, 0, 0, 0, b, 0, 0, 0, c}}; }

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  Mat3 transposed() const;
  double det() const;
  double frobenius() const;

  friend Mat3 operator*(const Mat3& a, const Mat3& b);
  friend Vec3 operator*(const Mat3& a, Vec3 v) {
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
  }
  friend Mat3 operator+(const Mat3& a, const Mat3& b);
  friend Mat3 operator*(double s, const Mat3& a);
};

/// Axis-angle rotation vector; the angle is |v| in radians.
struct AxisAngle {
  Vec3 v;
};

using RotationMatrix = Mat3;

/// x -> s * r * x + t
struct Similarity {
  double s = 1.0;
  RotationMatrix r = Mat3::identity();
  Vec3 t;

  Vec3 apply(Vec3 p) const { return s * (r * p) + t; }
};

Mat3 skew(Vec3 v);

RotationMatrix rodrigues(AxisAngle a);

/// Inverse of rodrigues; returns the rotation vector with angle in [0, pi].
AxisAngle log_map(const RotationMatrix& r);

/// Wraps the angle into [0, pi] keeping the same rotation.
AxisAngle canonicalize(AxisAngle a);

/// Solves A x = b by adjugate expansion. Throws SingularSystem when
/// |det A| < 1e-12 * ||A||_F^3.
Vec3 solve_3x3(const Mat3& a, Vec3 b);

struct Svd3 {
  Mat3 u;             // columns are left singular vectors
  Vec3 sigma;         // descending, non-negative
  Mat3 v;             // columns are right singular vectors
};

/// One-sided Jacobi SVD of a 3x3 matrix (at most 30 sweeps).
Svd3 svd_3x3(const Mat3& a);

/// Similarity (s, R, t) minimizing sum ||s R x_i + t - y_i||^2 with det R = +1.
/// Throws DegenerateCloud when x has zero spread or sizes are inconsistent.
Similarity procrustes(std::span<const Vec3> x, std::span<const Vec3> y);

/// Rotation about the x, y or z axis.
Mat3 rot_x(double a);
Mat3 rot_y(double a);
Mat3 rot_z(double a);

}  // namespace mion
