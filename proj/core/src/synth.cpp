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

#include "mion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mion/binary_io.hpp"
#include "mion/errors.hpp"
#include "mion/parallel.hpp"
#include "mion/rng.hpp"

namespace mion {

namespace {

using nlohmann::json;

Vec3 hsv(double h, double s, double v) {
  h = h - std::floor(h);
  const double i = std::floor(h * 6.0), f = h * 6.0 - i;
  const double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
  switch (static_cast<int>(i) % 6) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

enum class Region { kSkin, kUpper, kLower };

Region region_of(const std::string& name) {
  if (name == "head" || name == "neck" || name == "l_wrist" || name == "r_wrist" || name.rfind("extra", 0) == 0)
    return Region::kSkin;
  if (name.find("hip") != std::string::npos || name.find("knee") != std::string::npos ||
      name.find("ankle") != std::string::npos || name == "pelvis")
    return Region::kLower;
  return Region::kUpper;
}

// Fixed hue per part so limbs (and sides) stay distinguishable.
double part_hue(const BodyModel& model, int k) {
  const std::string& n = model.joint_names[k];
  const bool left = n.rfind("l_", 0) == 0, right = n.rfind("r_", 0) == 0;
  double h = static_cast<double>(k) / model.num_joints;
  if (left || right) {
    const int m = model.joint_mirror[k];
    h = static_cast<double>(std::min(k, m)) / model.num_joints + (left ? 0.0 : 0.5);
  }
  return h;
}

constexpr double kAmbient = 0.35;
const Vec3 kLight = [] {
  const Vec3 l{0.3, -0.5, -1.0};
  return (1.0 / norm(l)) * l;
}();

}  // namespace

std::vector<Vec3> procedural_vertex_colors(const BodyModel& model, std::uint64_t texture_seed) {
  std::mt19937_64 rng(mix64(texture_seed));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 skin = hsv(0.05 + 0.05 * u(rng), 0.3 + 0.3 * u(rng), 0.45 + 0.5 * u(rng));
  const Vec3 upper = hsv(u(rng), 0.3 + 0.6 * u(rng), 0.3 + 0.6 * u(rng));
  const Vec3 lower = hsv(u(rng), 0.2 + 0.6 * u(rng), 0.2 + 0.6 * u(rng));
  const double stripe_freq = 20.0 + 30.0 * u(rng);
  const double stripe_amp = 0.15 * u(rng);

  const int V = model.num_vertices, K = model.num_joints;
  std::vector<Vec3> out(V);
  for (int v = 0; v < V; ++v) {
    const double* w = &model.skin_weights[static_cast<size_t>(v) * K];
    const int k = static_cast<int>(std::max_element(w, w + K) - w);
    Vec3 garment;
    switch (region_of(model.joint_names[k])) {
      case Region::kSkin: garment = skin; break;
      case Region::kUpper: garment = upper; break;
      case Region::kLower: garment = lower; break;
    }
    const Vec3 part = hsv(part_hue(model, k), 0.8, 0.9);
    const double stripe = 1.0 + stripe_amp * std::sin(stripe_freq * model.vertex(v).y);
    Vec3 c = stripe * (0.45 * garment + 0.55 * part);
    for (int d = 0; d < 3; ++d) c[d] = std::clamp(c[d], 0.0, 1.0);
    out[v] = c;
  }
  return out;
}

Image procedural_background(std::uint64_t bg_seed, int height, int width) {
  std::mt19937_64 rng(mix64(bg_seed ^ 0x5bd1e995ULL));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 c0 = hsv(u(rng), 0.15 * u(rng), 0.3 + 0.5 * u(rng));
  const Vec3 c1 = hsv(u(rng), 0.15 * u(rng), 0.3 + 0.5 * u(rng));
  const double ang = 2.0 * M_PI * u(rng);
  const double gx = std::cos(ang), gy = std::sin(ang);
  struct Wave {
    double fx, fy, phase, amp;
  };
  Wave waves[3];
  for (Wave& w : waves) w = {6.0 * u(rng) - 3.0, 6.0 * u(rng) - 3.0, 2.0 * M_PI * u(rng), 0.04 + 0.04 * u(rng)};
  Image img(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double nx = (x + 0.5) / width - 0.5, ny = (y + 0.5) / height - 0.5;
      const double t = std::clamp(0.5 + gx * nx + gy * ny, 0.0, 1.0);
      double noise = 0;
      for (const Wave& w : waves) noise += w.amp * std::sin(2.0 * M_PI * (w.fx * nx + w.fy * ny) + w.phase);
      float* px = img.at(y, x);
      for (int d = 0; d < 3; ++d) px[d] = static_cast<float>(std::clamp((1 - t) * c0[d] + t * c1[d] + noise, 0.0, 1.0));
    }
  return img;
}

Image render_rgb(const Mesh& mesh, std::span<const int> faces, std::span<const Vec3> colors, const Intrinsics& intr,
                 const Translation& t, std::uint64_t bg_seed, int height, int width, std::vector<char>* mask) {
  if (colors.size() != mesh.vertices.size())
    fail(ErrorCode::kShapeMismatch, "render_rgb: color and vertex counts differ");
  std::vector<Vec3> cam(mesh.vertices.size());
  for (size_t i = 0; i < cam.size(); ++i) cam[i] = mesh.vertices[i] + t;
  const RasterBuffer rb = rasterize(cam, faces, intr, height, width);
  Image img = procedural_background(bg_seed, height, width);
  if (mask) mask->assign(static_cast<size_t>(height) * width, 0);
  const int nf = static_cast<int>(faces.size() / 3);
  std::vector<double> shade(nf, -1.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const size_t idx = static_cast<size_t>(y) * width + x;
      const int f = rb.triangle[idx];
      if (f < 0) continue;
      const int i0 = faces[3 * f], i1 = faces[3 * f + 1], i2 = faces[3 * f + 2];
      if (shade[f] < 0) {
        const Vec3 n = cross(cam[i1] - cam[i0], cam[i2] - cam[i0]);
        const double len = norm(n);
        shade[f] = kAmbient + (1.0 - kAmbient) * (len > 0 ? std::abs(dot(n, kLight)) / len : 0.0);
      }
      const auto& b = rb.bary[idx];
      const Vec3 c = shade[f] * (b[0] * colors[i0] + b[1] * colors[i1] + b[2] * colors[i2]);
      float* px = img.at(y, x);
      for (int d = 0; d < 3; ++d) px[d] = static_cast<float>(std::clamp(c[d], 0.0, 1.0));
      if (mask) (*mask)[idx] = 1;
    }
  return img;
}

Image render_rgb(const BodyModel& model, const Mesh& mesh, const Intrinsics& intr, const Translation& t,
                 std::uint64_t texture_seed, std::uint64_t bg_seed, int height, int width, std::vector<char>* mask) {
  const std::vector<Vec3> colors = procedural_vertex_colors(model, texture_seed);
  return render_rgb(mesh, model.faces, colors, intr, t, bg_seed, height, width, mask);
}

void quantize_8bit(Image& img) {
  for (float& v : img.data) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    v = static_cast<float>(static_cast<unsigned char>(std::floor(c * 255.0 + 0.5))) / 255.0f;
  }
}

Translation default_translation(const BodyModel& model, const SynthConfig& cfg) {
  double lo = 1e300, hi = -1e300;
  for (int v = 0; v < model.num_vertices; ++v) {
    lo = std::min(lo, model.template_vertices[3 * v + 1]);
    hi = std::max(hi, model.template_vertices[3 * v + 1]);
  }
  const double tz = cfg.intr.f * (hi - lo) / (cfg.body_fraction * kCropSize);
  // Shift so the rest body's vertical extent is centered on the principal point.
  return {0.0, -(lo + hi) / 2.0 + tz * (kCropSize / 2.0 - cfg.intr.c2) / cfg.intr.f, tz};
}

Sample make_sample(const BodyModel& model, const PoseParams& pose, const ShapeParams& shape, const Translation& t,
                   std::uint64_t texture_seed, std::uint64_t bg_seed, const SynthConfig& cfg,
                   std::uint64_t noise_seed) {
  Sample s;
  s.texture_seed = texture_seed;
  s.bg_seed = bg_seed;
  GroundTruth gt;
  gt.pose = pose;
  gt.shape = shape;
  gt.translation = t;
  gt.mesh = forward(model, pose, shape);
  gt.j3d = regress_joints(model, gt.mesh);
  const int n = model.num_regressed;
  s.j2d.resize(n);
  s.conf.assign(n, 1.0);
  std::vector<char> behind(n, 0);
  for (int i = 0; i < n; ++i) {
    if (gt.j3d[i].z + t.z <= 1e-6) {
      behind[i] = 1;
      s.conf[i] = 0.0;
      continue;
    }
    s.j2d[i] = project_point(gt.j3d[i], cfg.intr, t);
  }
  std::mt19937_64 rng(mix64(noise_seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    // Draw in a fixed order so noise does not depend on the other setting.
    const double du = gauss(rng), dv = gauss(rng), drop = uni(rng);
    if (behind[i]) continue;
    s.j2d[i].u += cfg.noise.j2d_sigma * du;
    s.j2d[i].v += cfg.noise.j2d_sigma * dv;
    if (drop < cfg.noise.dropout_prob) s.conf[i] = 0.0;
  }
  const Intrinsics ri = cfg.intr.rescaled(kCropSize, cfg.image_size);
  s.image = render_rgb(model, gt.mesh, ri, t, texture_seed, bg_seed, cfg.image_size, cfg.image_size);
  quantize_8bit(s.image);
  s.gt = std::move(gt);
  return s;
}

std::vector<Sample> gen_dataset(const BodyModel& model, const PoseSampler& sampler, int count, std::uint64_t seed,
                                const SynthConfig& cfg, int threads) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "dataset count must be >= 1");
  const Translation base = default_translation(model, cfg);
  std::vector<Sample> out(count);
  parallel_for(count, threads, [&](int i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const PoseParams pose = sampler.sample(rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ShapeParams shape;
    shape.beta.resize(model.num_betas);
    for (double& b : shape.beta) b = std::clamp(cfg.shape_sigma * gauss(rng), -5.0, 5.0);
    Translation t = base;
    t.z *= 1.0 + cfg.depth_jitter * uni(rng);
    t.x += cfg.center_jitter * uni(rng) * t.z / cfg.intr.f;
    t.y += cfg.center_jitter * uni(rng) * t.z / cfg.intr.f;
    const std::uint64_t tex = rng(), bg = rng(), noise = rng();
    out[i] = make_sample(model, pose, shape, t, tex, bg, cfg, noise);
  });
  return out;
}

namespace {

json vec3s(const std::vector<Vec3>& v) {
  json a = json::array();
  for (const Vec3& p : v) a.push_back({p.x, p.y, p.z});
  return a;
}

std::vector<Vec3> vec3s_from(const json& a) {
  std::vector<Vec3> out;
  for (const auto& p : a) out.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return out;
}

}  // namespace

void save_dataset(const std::vector<Sample>& samples, const std::string& dir, const std::string& manifest_json) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "images");
  std::ostringstream labels;
  for (size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.ppm", i);
    save_ppm(s.image, (fs::path(dir) / "images" / name).string());
    json j;
    j["index"] = i;
    j["image"] = std::string("images/") + name;
    json kp = json::array();
    for (const Vec2& p : s.j2d) kp.push_back({p.u, p.v});
    j["j2d"] = kp;
    j["conf"] = s.conf;
    j["texture_seed"] = s.texture_seed;
    j["bg_seed"] = s.bg_seed;
    if (s.gt) {
      json g;
      g["pose"] = s.gt->pose.flat();
      g["beta"] = s.gt->shape.beta;
      g["translation"] = {s.gt->translation.x, s.gt->translation.y, s.gt->translation.z};
      g["j3d"] = vec3s(s.gt->j3d);
      j["gt"] = g;
    }
    labels << j.dump() << '\n';
  }
  io::write_file((fs::path(dir) / "labels.jsonl").string(), labels.str());
  io::write_file((fs::path(dir) / "manifest.json").string(), manifest_json);
}

std::vector<Sample> load_dataset(const std::string& dir, const BodyModel& model) {
  namespace fs = std::filesystem;
  const std::vector<char> raw = io::read_file((fs::path(dir) / "labels.jsonl").string());
  std::istringstream in(std::string(raw.begin(), raw.end()));
  std::vector<Sample> out;
  std::string line;
  const int n = model.num_regressed;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      Sample s;
      s.image = load_ppm((fs::path(dir) / j.at("image").get<std::string>()).string());
      for (const auto& p : j.at("j2d")) s.j2d.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      s.conf = j.at("conf").get<std::vector<double>>();
      s.texture_seed = j.at("texture_seed").get<std::uint64_t>();
      s.bg_seed = j.at("bg_seed").get<std::uint64_t>();
      if (static_cast<int>(s.j2d.size()) != n || static_cast<int>(s.conf.size()) != n)
        fail(ErrorCode::kFormat, "label keypoint count does not match the body model");
      if (j.contains("gt")) {
        const json& g = j.at("gt");
        GroundTruth gt;
        gt.pose = PoseParams::from_flat(g.at("pose").get<std::vector<double>>());
        gt.shape.beta = g.at("beta").get<std::vector<double>>();
        const auto t = g.at("translation").get<std::vector<double>>();
        if (t.size() != 3 || static_cast<int>(gt.pose.joints.size()) != model.num_joints - 1 ||
            static_cast<int>(gt.shape.beta.size()) != model.num_betas)
          fail(ErrorCode::kFormat, "ground truth does not match the body model");
        gt.translation = {t[0], t[1], t[2]};
        gt.j3d = vec3s_from(g.at("j3d"));
        gt.mesh = forward(model, gt.pose, gt.shape);
        s.gt = std::move(gt);
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed dataset labels: ") + e.what());
  }
  if (out.empty()) fail(ErrorCode::kEmptyDataset, "dataset has no samples: " + dir);
  return out;
}

std::string synth_config_to_json(const SynthConfig& c) {
  json j;
  j["image_size"] = c.image_size;
  j["intrinsics"] = {{"f", c.intr.f}, {"c1", c.intr.c1}, {"c2", c.intr.c2}};
  j["shape_sigma"] = c.shape_sigma;
  j["body_fraction"] = c.body_fraction;
  j["depth_jitter"] = c.depth_jitter;
  j["center_jitter"] = c.center_jitter;
  j["j2d_sigma"] = c.noise.j2d_sigma;
  j["dropout_prob"] = c.noise.dropout_prob;
  return j.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
  SynthConfig c;
  try {
    const json j = json::parse(text);
    c.image_size = j.value("image_size", c.image_size);
    if (j.contains("intrinsics")) {
      const json& i = j.at("intrinsics");
      c.intr = {i.value("f", c.intr.f), i.value("c1", c.intr.c1), i.value("c2", c.intr.c2)};
    }
    c.shape_sigma = j.value("shape_sigma", c.shape_sigma);
    c.body_fraction = j.value("body_fraction", c.body_fraction);
    c.depth_jitter = j.value("depth_jitter", c.depth_jitter);
    c.center_jitter = j.value("center_jitter", c.center_jitter);
    c.noise.j2d_sigma = j.value("j2d_sigma", c.noise.j2d_sigma);
    c.noise.dropout_prob = j.value("dropout_prob", c.noise.dropout_prob);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad synth config: ") + e.what());
  }
  if (c.image_size < 8 || !(c.intr.f > 0)) fail(ErrorCode::kInvalidArgument, "bad synth config values");
  return c;
}

}  // namespace mion
