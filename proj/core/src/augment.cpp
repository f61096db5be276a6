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

#include "mion/augment.hpp"

#include <algorithm>
#include <cmath>

namespace mion {

namespace {

// Bilinear sample with edge clamping, pixel centers at integer + 0.5.
void bilinear(const Image& img, double x, double y, float* out) {
  x = std::clamp(x - 0.5, 0.0, img.width - 1.0);
  y = std::clamp(y - 0.5, 0.0, img.height - 1.0);
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0, fy = y - y0;
  for (int c = 0; c < 3; ++c) {
    const double top = (1 - fx) * img.at(y0, x0)[c] + fx * img.at(y0, x1)[c];
    const double bot = (1 - fx) * img.at(y1, x0)[c] + fx * img.at(y1, x1)[c];
    out[c] = static_cast<float>((1 - fy) * top + fy * bot);
  }
}

}  // namespace

Sample rotate_sample(const Sample& s, const BodyModel& model, const Intrinsics& intr, double angle) {
  Sample out = s;
  const double c = std::cos(angle), sn = std::sin(angle);
  for (Vec2& p : out.j2d) {
    const double du = p.u - intr.c1, dv = p.v - intr.c2;
    p = {intr.c1 + c * du - sn * dv, intr.c2 + sn * du + c * dv};
  }
  const double scale = s.image.width / kCropSize;
  const double cx = intr.c1 * scale, cy = intr.c2 * scale;
  for (int y = 0; y < s.image.height; ++y)
    for (int x = 0; x < s.image.width; ++x) {
      // Inverse map of the output pixel center.
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      bilinear(s.image, cx + c * dx + sn * dy, cy - sn * dx + c * dy, out.image.at(y, x));
    }
  if (s.gt) {
    const Mat3 rz = rot_z(angle);
    GroundTruth& g = *out.gt;
    g.pose.global_orient = log_map(rz * rodrigues(g.pose.global_orient));
    const Vec3 j0 = model.root();
    g.translation = rz * (s.gt->translation + j0) - j0;
    for (Vec3& p : g.j3d) p = rz * (p - j0) + j0;
    for (Vec3& p : g.mesh.vertices) p = rz * (p - j0) + j0;
  }
  return out;
}

Sample flip_sample(const Sample& s, const BodyModel& model, const Intrinsics& intr) {
  Sample out = s;
  const int n = static_cast<int>(s.j2d.size());
  for (int i = 0; i < n; ++i) {
    const int m = model.regressed_mirror[i];
    out.j2d[i] = {2.0 * intr.c1 - s.j2d[m].u, s.j2d[m].v};
    out.conf[i] = s.conf[m];
  }
  const int w = s.image.width;
  for (int y = 0; y < s.image.height; ++y)
    for (int x = 0; x < w; ++x) std::copy_n(s.image.at(y, w - 1 - x), 3, out.image.at(y, x));
  if (s.gt) {
    GroundTruth& g = *out.gt;
    g.pose = mirror_pose(model, s.gt->pose);
    g.translation.x = -s.gt->translation.x;
    for (int i = 0; i < n; ++i) {
      const Vec3 p = s.gt->j3d[model.regressed_mirror[i]];
      g.j3d[i] = {-p.x, p.y, p.z};
    }
    g.mesh = forward(model, g.pose, g.shape);
  }
  return out;
}

void scale_channels(Image& img, const Vec3& f) {
  for (size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<float>(std::clamp(img.data[i] * f[static_cast<int>(i % 3)], 0.0, 1.0));
}

Sample augment(const Sample& s, const BodyModel& model, const Intrinsics& intr, const AugmentConfig& cfg,
               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Fixed draw order keeps the stream aligned regardless of outcomes.
  const double r_flip = u(rng), r_rot = u(rng), angle = (2.0 * u(rng) - 1.0) * cfg.max_rotation;
  Vec3 f;
  for (int c = 0; c < 3; ++c) f[c] = cfg.min_channel + (cfg.max_channel - cfg.min_channel) * u(rng);
  Sample out = r_flip < cfg.flip_prob ? flip_sample(s, model, intr) : s;
  if (r_rot < cfg.rotation_prob) out = rotate_sample(out, model, intr, angle);
  scale_channels(out.image, f);
  return out;
}

}  // namespace mion
