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

#include "mion/camera.hpp"

#include "mion/errors.hpp"

namespace mion {

namespace {
constexpr double kMinDepth = 1e-6;
}

Vec2 project_point(Vec3 p, const Intrinsics& intr, const Translation& t) {
  const double z = p.z + t.z;
  if (!(z > kMinDepth)) fail(ErrorCode::kBehindCamera, "point is behind the camera");
  return {intr.f * (p.x + t.x) / z + intr.c1, intr.f * (p.y + t.y) / z + intr.c2};
}

std::vector<Vec2> project(std::span<const Vec3> points, const Intrinsics& intr, const Translation& t) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(project_point(p, intr, t));
  return out;
}

double reproj_loss(std::span<const Vec3> j3d, std::span<const Vec2> j2d, const Intrinsics& intr,
                   const Translation& t, std::span<const double> conf) {
  if (j3d.size() != j2d.size() || (!conf.empty() && conf.size() != j3d.size()))
    fail(ErrorCode::kShapeMismatch, "reproj_loss: joint counts differ");
  double loss = 0;
  for (size_t i = 0; i < j3d.size(); ++i) {
    const Vec2 p = project_point(j3d[i], intr, t);
    const double w = conf.empty() ? 1.0 : conf[i];
    const double du = p.u - j2d[i].u, dv = p.v - j2d[i].v;
    loss += w * (du * du + dv * dv);
  }
  return loss;
}

FitResult fit_translation(std::span<const Vec3> j3d, std::span<const Vec2> j2d, const Intrinsics& intr,
                          std::span<const double> conf) {
  if (j3d.size() != j2d.size() || (!conf.empty() && conf.size() != j3d.size()))
    fail(ErrorCode::kShapeMismatch, "fit_translation: joint counts differ");
  // Rows: [f, 0, c1 - u] T = -(f x + (c1 - u) z), [0, f, c2 - v] T = -(f y + (c2 - v) z)
  const double f = intr.f;
  double a02 = 0, a12 = 0, a22 = 0, wsum = 0;
  double b0 = 0, b1 = 0, b2 = 0;
  for (size_t i = 0; i < j3d.size(); ++i) {
    const double w = conf.empty() ? 1.0 : conf[i];
    if (w == 0.0) continue;
    const double du = intr.c1 - j2d[i].u, dv = intr.c2 - j2d[i].v;
    const Vec3& p = j3d[i];
    const double rx = -(f * p.x + du * p.z), ry = -(f * p.y + dv * p.z);
    wsum += w;
    a02 += w * f * du;
    a12 += w * f * dv;
    a22 += w * (du * du + dv * dv);
    b0 += w * f * rx;
    b1 += w * f * ry;
    b2 += w * (du * rx + dv * ry);
  }
  const double a00 = wsum * f * f;
  const Mat3 a{{a00, 0, a02, 0, a00, a12, a02, a12, a22}};
  FitResult out;
  out.translation = solve_3x3(a, {b0, b1, b2});
  for (const Vec3& p : j3d) {
    if (!(p.z + out.translation.z > kMinDepth)) {
      out.behind_camera = true;
      out.loss = kInfiniteLoss;
      return out;
    }
  }
  out.loss = reproj_loss(j3d, j2d, intr, out.translation, conf);
  return out;
}

}  // namespace mion
