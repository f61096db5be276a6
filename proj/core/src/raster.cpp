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

#include "mion/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "mion/binary_io.hpp"
#include "mion/errors.hpp"

namespace mion {

namespace {
constexpr double kMinDepth = 1e-6;
}

RasterBuffer rasterize(std::span<const Vec3> cv, std::span<const int> faces, const Intrinsics& intr, int height,
                       int width) {
  RasterBuffer rb;
  rb.height = height;
  rb.width = width;
  const size_t npix = static_cast<size_t>(height) * width;
  rb.triangle.assign(npix, -1);
  rb.depth.assign(npix, std::numeric_limits<double>::infinity());
  rb.bary.assign(npix, {0, 0, 0});

  std::vector<double> su(cv.size()), sv(cv.size());
  for (size_t i = 0; i < cv.size(); ++i) {
    const double z = cv[i].z;
    su[i] = z > kMinDepth ? intr.f * cv[i].x / z + intr.c1 : 0.0;
    sv[i] = z > kMinDepth ? intr.f * cv[i].y / z + intr.c2 : 0.0;
  }

  const int nf = static_cast<int>(faces.size() / 3);
  for (int f = 0; f < nf; ++f) {
    const int i0 = faces[3 * f], i1 = faces[3 * f + 1], i2 = faces[3 * f + 2];
    const double z0 = cv[i0].z, z1 = cv[i1].z, z2 = cv[i2].z;
    if (!(z0 > kMinDepth && z1 > kMinDepth && z2 > kMinDepth)) continue;
    const double u0 = su[i0], v0 = sv[i0], u1 = su[i1], v1 = sv[i1], u2 = su[i2], v2 = sv[i2];
    const double area = edge_function(u0, v0, u1, v1, u2, v2);
    if (!(std::abs(area) > 1e-12)) continue;
    const double sign = area > 0 ? 1.0 : -1.0;
    const double inv_area = 1.0 / std::abs(area);

    const double umin = std::min({u0, u1, u2}), umax = std::max({u0, u1, u2});
    const double vmin = std::min({v0, v1, v2}), vmax = std::max({v0, v1, v2});
    const double lim = 1e9;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::clamp(umin - 0.5, -lim, lim))));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::clamp(umax - 0.5, -lim, lim))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::clamp(vmin - 0.5, -lim, lim))));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::clamp(vmax - 0.5, -lim, lim))));
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = sign * edge_function(u1, v1, u2, v2, px, py);
        const double w1 = sign * edge_function(u2, v2, u0, v0, px, py);
        const double w2 = sign * edge_function(u0, v0, u1, v1, px, py);
        if (w0 < 0 || w1 < 0 || w2 < 0) continue;
        const double q0 = w0 * inv_area / z0, q1 = w1 * inv_area / z1, q2 = w2 * inv_area / z2;
        const double q = q0 + q1 + q2;
        const double depth = 1.0 / q;
        const size_t idx = static_cast<size_t>(y) * width + x;
        if (!(depth < rb.depth[idx] - kDepthTieEpsilon)) continue;
        rb.depth[idx] = depth;
        rb.triangle[idx] = f;
        rb.bary[idx] = {q0 / q, q1 / q, q2 / q};
      }
    }
  }
  return rb;
}

void save_ppm(const Image& img, const std::string& path) {
  std::ostringstream os;
  os << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::string body(img.data.size(), '\0');
  for (size_t i = 0; i < img.data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(img.data[i]), 0.0, 1.0);
    body[i] = static_cast<char>(static_cast<unsigned char>(std::floor(v * 255.0 + 0.5)));
  }
  io::write_file(path, os.str() + body);
}

Image load_ppm(const std::string& path) {
  const std::vector<char> bytes = io::read_file(path);
  size_t pos = 0;
  const auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) t += bytes[pos++];
    return t;
  };
  if (token() != "P6") fail(ErrorCode::kFormat, "not a binary PPM: " + path);
  int w = 0, h = 0, maxv = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxv = std::stoi(token());
  } catch (const std::exception&) {
    fail(ErrorCode::kFormat, "bad PPM header: " + path);
  }
  if (w <= 0 || h <= 0 || maxv != 255) fail(ErrorCode::kFormat, "unsupported PPM: " + path);
  ++pos;  // single whitespace after maxval
  const size_t n = static_cast<size_t>(w) * h * 3;
  if (bytes.size() < pos + n) fail(ErrorCode::kFormat, "truncated PPM: " + path);
  Image img(h, w);
  for (size_t i = 0; i < n; ++i) img.data[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0f;
  return img;
}

}  // namespace mion
