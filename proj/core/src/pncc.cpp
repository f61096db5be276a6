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

#include "mion/pncc.hpp"

#include <algorithm>
#include <cmath>

#include "mion/binary_io.hpp"
#include "mion/errors.hpp"

namespace mion {

NccColors ncc(std::span<const Vec3> verts) {
  if (verts.empty()) fail(ErrorCode::kDegenerateAxis, "empty template");
  Vec3 lo = verts[0], hi = verts[0];
  for (const Vec3& p : verts)
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  for (int d = 0; d < 3; ++d)
    if (!(hi[d] > lo[d])) fail(ErrorCode::kDegenerateAxis, "template has zero extent on an axis");
  NccColors out;
  out.colors.reserve(verts.size());
  for (const Vec3& p : verts) {
    Vec3 c;
    for (int d = 0; d < 3; ++d) c[d] = std::clamp((p[d] - lo[d]) / (hi[d] - lo[d]), 0.0, 1.0);
    out.colors.push_back(c);
  }
  return out;
}

NccColors ncc(const BodyModel& model) {
  std::vector<Vec3> v(model.num_vertices);
  for (int i = 0; i < model.num_vertices; ++i) v[i] = model.vertex(i);
  return ncc(v);
}

PnccMap render_pncc(const Mesh& mesh, std::span<const int> faces, const Intrinsics& intr, const Translation& t,
                    const NccColors& colors, int height, int width) {
  if (mesh.vertices.size() != colors.colors.size())
    fail(ErrorCode::kShapeMismatch, "render_pncc: mesh and color vertex counts differ");
  std::vector<Vec3> cam(mesh.vertices.size());
  for (size_t i = 0; i < cam.size(); ++i) cam[i] = mesh.vertices[i] + t;
  const RasterBuffer rb = rasterize(cam, faces, intr, height, width);
  PnccMap map(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const size_t idx = static_cast<size_t>(y) * width + x;
      const int f = rb.triangle[idx];
      if (f < 0) continue;
      const auto& b = rb.bary[idx];
      const Vec3 c = b[0] * colors.colors[faces[3 * f]] + b[1] * colors.colors[faces[3 * f + 1]] +
                     b[2] * colors.colors[faces[3 * f + 2]];
      float* px = map.at(y, x);
      for (int d = 0; d < 3; ++d) px[d] = static_cast<float>(std::clamp(c[d], 0.0, 1.0));
    }
  return map;
}

PosEncoding pncc_pe(const PnccMap& map, int d_pe, double scale) {
  if (d_pe <= 0 || d_pe % 2 != 0) fail(ErrorCode::kOddDim, "PNCC encoding width must be even and positive");
  PosEncoding pe;
  pe.height = map.height;
  pe.width = map.width;
  pe.channels = 3 * d_pe;
  pe.data.resize(static_cast<size_t>(map.height) * map.width * pe.channels);
  std::vector<double> inv_freq(d_pe / 2);
  for (int i = 0; i < d_pe / 2; ++i) inv_freq[i] = 1.0 / std::pow(10000.0, 2.0 * i / d_pe);
  const size_t npix = static_cast<size_t>(map.height) * map.width;
  for (size_t p = 0; p < npix; ++p) {
    float* out = pe.data.data() + p * pe.channels;
    for (int c = 0; c < 3; ++c) {
      const double v = scale * map.data[p * 3 + c];
      for (int i = 0; i < d_pe / 2; ++i) {
        const double a = v * inv_freq[i];
        out[c * d_pe + 2 * i] = static_cast<float>(std::sin(a));
        out[c * d_pe + 2 * i + 1] = static_cast<float>(std::cos(a));
      }
    }
  }
  return pe;
}

void save_pncc(const PnccMap& map, const std::string& path) {
  io::Writer w;
  w.magic("MIONPNCC");
  w.u32(map.height);
  w.u32(map.width);
  for (float v : map.data) w.f32(v);
  w.save(path);
}

PnccMap load_pncc(const std::string& path) {
  io::Reader r = io::Reader::from_file(path);
  r.expect_magic("MIONPNCC");
  const std::uint32_t h = r.u32(), w = r.u32();
  if (h == 0 || w == 0 || static_cast<std::uint64_t>(h) * w > (1u << 26)) fail(ErrorCode::kFormat, "bad PNCC size");
  PnccMap map(static_cast<int>(h), static_cast<int>(w));
  for (float& v : map.data) v = r.f32();
  r.expect_end();
  return map;
}

}  // namespace mion
