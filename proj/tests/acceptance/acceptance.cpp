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

// Acceptance run: one PASS/FAIL line per criterion. Trains desk-scale
// networks in process, so expect several minutes on one core.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "mion/ablation.hpp"
#include "mion/metrics.hpp"
#include "mion/nn/checkpoint.hpp"
#include "mion/nn/layers.hpp"
#include "mion/pncc.hpp"
#include "mion/pose_sampler.hpp"
#include "mion/rng.hpp"

namespace fs = std::filesystem;
using namespace mion;
using nn::Tensor64;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& name, const std::string& detail) {
  std::printf("criterion %d: %s  %s  [%s]\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- 1: camera fit

Translation gauss_newton(const std::vector<Vec3>& j3d, const std::vector<Vec2>& j2d, const Intrinsics& in,
                         Translation t) {
  for (int it = 0; it < 50; ++it) {
    Mat3 jtj;
    Vec3 jtr;
    for (size_t i = 0; i < j3d.size(); ++i) {
      const Vec3 p = j3d[i] + t;
      const double iz = 1.0 / p.z;
      const double ru = in.f * p.x * iz + in.c1 - j2d[i].u, rv = in.f * p.y * iz + in.c2 - j2d[i].v;
      const Vec3 gu{in.f * iz, 0, -in.f * p.x * iz * iz}, gv{0, in.f * iz, -in.f * p.y * iz * iz};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) jtj(r, c) += gu[r] * gu[c] + gv[r] * gv[c];
        jtr[r] += gu[r] * ru + gv[r] * rv;
      }
    }
    const Vec3 step = solve_3x3(jtj, jtr);
    t -= step;
    if (norm(step) < 1e-12 * norm(t)) break;
  }
  return t;
}

void criterion_camera() {
  const Intrinsics in;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-0.5, 0.5), tz(2, 10), txy(-0.3, 0.3);
  std::normal_distribution<double> noise(0.0, 3.0);
  const auto joints = [&] {
    std::vector<Vec3> j(14);
    for (auto& p : j) p = {u(rng), 2 * u(rng), 0.4 * u(rng)};
    return j;
  };
  int within = 0, exact_ok = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto j = joints();
    const Translation t{txy(rng), txy(rng), tz(rng)};
    auto uv = project(j, in, t);
    const FitResult exact = fit_translation(j, uv, in);
    exact_ok += norm(exact.translation - t) <= 1e-6 * norm(t);
    for (auto& p : uv) {
      p.u += noise(rng);
      p.v += noise(rng);
    }
    const FitResult r = fit_translation(j, uv, in);
    const double gn = reproj_loss(j, uv, in, gauss_newton(j, uv, in, r.translation));
    within += r.loss <= 1.05 * gn + 1e-12;
  }
  const auto j = joints();
  const auto uv = project(j, in, {0.1, 0, 5});
  const int reps = 200000;
  double sink = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) sink += fit_translation(j, uv, in).loss;
  const double rate = reps / seconds_since(t0);
  const bool pass = within >= 0.95 * trials && exact_ok == trials && rate >= 50000 && std::isfinite(sink);
  report(1, pass, "closed-form fit vs Gauss-Newton oracle",
         fmt("%d/%d within 1.05x, %d/%d exact recoveries, %.0f fits/s", within, trials, exact_ok, trials, rate));
}

// ---------------------------------------------------------------- 2: rasterizer

void criterion_raster() {
  const Intrinsics in{60.0, 32.0, 32.0};
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> xy(-2.5, 2.5), z(2.0, 10.0), d(-1.2, 1.2), c(0, 1);
  long id_mismatch = 0, covered = 0;
  double max_color = 0;
  for (int scene = 0; scene < 100; ++scene) {
    std::vector<Vec3> verts;
    std::vector<int> faces;
    NccColors colors;
    for (int t = 0; t < 12; ++t) {
      const Vec3 center{xy(rng), xy(rng), z(rng)};
      for (int k = 0; k < 3; ++k) {
        verts.push_back(center + Vec3{d(rng), d(rng), 0.6 * d(rng)});
        faces.push_back(3 * t + k);
        colors.colors.push_back({c(rng), c(rng), c(rng)});
      }
    }
    const RasterBuffer rb = rasterize(verts, faces, in, 64, 64);
    const PnccMap map = render_pncc(Mesh{verts}, faces, in, {0, 0, 0}, colors, 64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        double best = std::numeric_limits<double>::infinity();
        int win = -1;
        Vec3 col{};
        for (int f = 0; f < 12; ++f) {
          double uu[3], vv[3];
          Vec3 p[3];
          for (int k = 0; k < 3; ++k) {
            p[k] = verts[faces[3 * f + k]];
            uu[k] = in.f * p[k].x / p[k].z + in.c1;
            vv[k] = in.f * p[k].y / p[k].z + in.c2;
          }
          const double a = uu[1] - uu[0], b = uu[2] - uu[0], cc = vv[1] - vv[0], dd = vv[2] - vv[0];
          const double det = a * dd - b * cc;
          if (std::abs(det) <= 1e-12) continue;
          const double l1 = (dd * (px - uu[0]) - b * (py - vv[0])) / det;
          const double l2 = (a * (py - vv[0]) - cc * (px - uu[0])) / det;
          const double l0 = 1 - l1 - l2;
          if (l0 < 0 || l1 < 0 || l2 < 0) continue;
          const double q0 = l0 / p[0].z, q1 = l1 / p[1].z, q2 = l2 / p[2].z, q = q0 + q1 + q2;
          if (!(1 / q < best - kDepthTieEpsilon)) continue;
          best = 1 / q;
          win = f;
          col = (q0 / q) * colors.colors[faces[3 * f]] + (q1 / q) * colors.colors[faces[3 * f + 1]] +
                (q2 / q) * colors.colors[faces[3 * f + 2]];
        }
        id_mismatch += rb.triangle[y * 64 + x] != win;
        covered += win >= 0;
        for (int k = 0; k < 3; ++k) max_color = std::max(max_color, std::abs(map.at(y, x)[k] - col[k]));
      }
  }
  report(2, id_mismatch == 0 && max_color < 1e-6, "rasterizer vs brute-force oracle",
         fmt("%ld winner mismatches over %ld covered pixels, max color error %.2e", id_mismatch, covered, max_color));
}

// ---------------------------------------------------------------- 3: gradients

void criterion_gradients(const BodyModel& model, const Sample& s) {
  using Fn = std::function<Tensor64(const std::vector<Tensor64>&)>;
  std::mt19937_64 rng(303);
  const auto weigh = [](const Tensor64& t) {
    std::mt19937_64 r(99);
    return nn::sum(nn::mul(t, Tensor64::constant(t.shape(), testing::random_values(t.size(), r))));
  };
  const auto check = [&](const Fn& f, std::vector<nn::Shape> shapes, double lo = -1, double hi = 1) {
    std::vector<std::vector<double>> vals;
    for (const auto& sh : shapes) vals.push_back(testing::random_values(nn::numel(sh), rng, lo, hi));
    return testing::gradcheck(f, shapes, vals);
  };
  nn::ParamStore<double> store;
  store.set_seed(7);
  const nn::MultiHeadAttention<double> mha(store, "a", 8, 2);
  const std::vector<std::pair<std::string, double>> ops = {
      {"add", check([&](auto& x) { return weigh(nn::add(x[0], x[1])); }, {{3, 4}, {4}})},
      {"sub", check([&](auto& x) { return weigh(nn::sub(x[0], x[1])); }, {{3, 4}, {3, 4}})},
      {"mul", check([&](auto& x) { return weigh(nn::mul(x[0], x[1])); }, {{3, 4}, {3, 4}})},
      {"div", check([&](auto& x) { return weigh(nn::div(x[0], x[1])); }, {{3, 4}, {3, 4}}, 0.5, 2.0)},
      {"matmul", check([&](auto& x) { return weigh(nn::matmul(x[0], x[1])); }, {{3, 5}, {5, 2}})},
      {"relu", check([&](auto& x) { return weigh(nn::relu(x[0])); }, {{20}})},
      {"gelu", check([&](auto& x) { return weigh(nn::gelu(x[0])); }, {{20}}, -3, 3)},
      {"tanh", check([&](auto& x) { return weigh(nn::tanh(x[0])); }, {{20}}, -2, 2)},
      {"softmax", check([&](auto& x) { return weigh(nn::softmax(x[0], 1)); }, {{3, 5}}, -3, 3)},
      {"layer_norm", check([&](auto& x) { return weigh(nn::layer_norm(x[0], x[1], x[2])); }, {{3, 6}, {6}, {6}})},
      {"conv2d", check([&](auto& x) { return weigh(nn::conv2d(x[0], x[1], x[2], 2, 1)); }, {{2, 5, 5}, {3, 2, 3, 3}, {3}})},
      {"deconv2d",
       check([&](auto& x) { return weigh(nn::deconv2d(x[0], x[1], x[2], 2, 1)); }, {{2, 3, 3}, {2, 3, 4, 4}, {3}})},
      {"reshape", check([&](auto& x) { return weigh(nn::reshape(x[0], {6, 2})); }, {{3, 4}})},
      {"concat", check([&](auto& x) { return weigh(nn::concat<double>({x[0], x[1]}, 1)); }, {{2, 3}, {2, 2}})},
      {"slice", check([&](auto& x) { return weigh(nn::slice(x[0], 1, 1, 3)); }, {{2, 4}})},
      {"mean", check([&](auto& x) { return nn::add(nn::mean(x[0]), weigh(nn::mean(x[0], 0))); }, {{3, 4}})},
      {"mse", check([&](auto& x) { return nn::mse_loss(x[0], x[1]); }, {{7}, {7}})},
      {"l2", check([&](auto& x) { return nn::l2_loss(x[0], x[1]); }, {{7}, {7}})},
      {"l1", check([&](auto& x) { return nn::l1_loss(x[0], x[1]); }, {{7}, {7}})},
      {"attention", check(
                        [&](auto& x) {
                          nn::GraphT<double> g;
                          return weigh(mha(g, x[0], x[1]));
                        },
                        {{3, 8}, {5, 8}})}};
  double worst_op = 0;
  std::string worst_name;
  for (const auto& [name, err] : ops)
    if (err >= worst_op) {
      worst_op = err;
      worst_name = name;
    }

  const BodyJointsLayer<double> joints(model);
  const MrtTarget tgt = target_of(s);
  const int k = model.num_joints, nb = model.num_betas;
  auto pose = s.gt->pose.flat();
  for (double& v : pose) v += testing::random_values(1, rng, -0.2, 0.2)[0];
  const Translation& t = s.gt->translation;
  const double e2e = testing::gradcheck(
      [&](const std::vector<Tensor64>& x) {
        return mrt_loss<double>({x[0], x[1], x[2]}, tgt, model, joints, Intrinsics{}, {});
      },
      {{k, 3}, {nb}, {3}}, {pose, testing::random_values(nb, rng), {t.x + 0.1, t.y - 0.05, t.z * 1.02}});
  report(3, worst_op < 1e-4 && e2e < 1e-3, "finite-difference gradient suite",
         fmt("%zu ops, worst %.2e (%s); end-to-end loss %.2e", ops.size(), worst_op, worst_name.c_str(), e2e));
}

// ---------------------------------------------------------------- 7: metrics

void criterion_metrics() {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> g(0, 0.4), ang(0, 1.5);
  std::uniform_real_distribution<double> sc(0.2, 5), off(-10, 10);
  const auto cloud = [&] {
    std::vector<Vec3> v(14);
    for (auto& p : v) p = {g(rng), g(rng), g(rng)};
    return v;
  };
  double worst_sim = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto gt = cloud();
    const Mat3 r = rodrigues({Vec3{ang(rng), ang(rng), ang(rng)}});
    const double s = sc(rng);
    const Vec3 o{off(rng), off(rng), off(rng)};
    std::vector<Vec3> pred(14);
    for (int n = 0; n < 14; ++n) pred[n] = s * (r * gt[n]) + o;
    worst_sim = std::max(worst_sim, pa_mpjpe(pred, gt));
  }
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = cloud(), b = cloud();
    violations += pa_mpjpe(a, b) > mpjpe(a, b) + 1e-12;
  }
  report(7, worst_sim < 1e-9 && violations == 0, "metric correctness",
         fmt("max pa_mpjpe under similarity %.1e, %d/10000 pairs with pa > mpjpe", worst_sim, violations));
}

// ---------------------------------------------------------------- 8: selection

double pose_dist(const CandidatePool& p, int a, int b) {
  const auto x = member_pose_vector(p, a), y = member_pose_vector(p, b);
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

void criterion_selection(const BodyModel& model) {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-1, 1), l(0, 3000), a(0.01, 50), b(-20, 20);
  int checked = 0, violations = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 63);
    CandidatePool p;
    p.num_poses = m;
    p.num_orients = 1;
    p.num_joints = model.num_joints;
    p.num_regressed = model.num_regressed;
    p.pose_centroids = Matrix(m, 3 * (model.num_joints - 1));
    for (double& v : p.pose_centroids.data) v = u(rng);
    p.orient_centroids = Matrix(1, 3);
    p.joints_cache.assign(static_cast<size_t>(m) * model.num_regressed, Vec3{});
    std::vector<FitResult> fits(m);
    for (auto& f : fits) f.loss = l(rng);
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto chosen = select_candidates(fits, p, 2000, n);
    std::vector<int> adm;
    for (int i = 0; i < m; ++i)
      if (fits[i].loss < 2000) adm.push_back(i);
    if (static_cast<int>(adm.size()) < n) continue;
    ++checked;
    for (int j = 1; j < n; ++j) {
      const auto min_prev = [&](int i) {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < j; ++k) d = std::min(d, pose_dist(p, i, chosen[k].pool_index));
        return d;
      };
      const double picked = min_prev(chosen[j].pool_index);
      for (int i : adm) {
        bool taken = false;
        for (int k = 0; k < j; ++k) taken = taken || chosen[k].pool_index == i;
        violations += !taken && picked < min_prev(i) - 1e-12;
      }
    }
  }
  int affine_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::vector<double>> s(1 + rng() % 6, std::vector<double>(20));
    for (auto& row : s)
      for (double& v : row) v = std::abs(u(rng));
    const double sa = a(rng), sb = b(rng);
    auto t = s;
    for (auto& row : t)
      for (double& v : row) v = sa * v + sb;
    affine_bad += select_branch(s) != select_branch(t);
  }
  report(8, violations == 0 && affine_bad == 0 && checked > 100, "selection properties",
         fmt("%d pools checked, %d max-min violations, %d affine argmin changes", checked, violations, affine_bad));
}

// ---------------------------------------------------------------- 4, 5, 6: trained pipeline

struct Desk {
  BodyModel model = make_toy_model(1);
  PoseSampler sampler{model, 2};
  CandidatePool pool;
  SynthConfig synth;
  std::vector<Sample> train, test;
};

void criteria_trained(Desk& d, Mrt& mrt, Cen& cen) {
  const Stages st{&d.model, &d.pool, &mrt, &cen, d.synth.intr};
  AblationConfig ac;
  ac.max_branches = 5;
  ac.random_seeds = 3;
  ac.seed = 11;
  const auto t0 = std::chrono::steady_clock::now();
  const AblationReport rep = run_ablation(st, d.test, ac);
  std::printf("ablation over %d held-out samples (%.0f s)\n%s", rep.samples, seconds_since(t0),
              ablation_to_table(rep).c_str());

  const AblationRow* one = rep.find(1, "cen");
  const AblationRow* five = rep.find(5, "cen");
  const AblationRow* rnd = rep.find(5, "random");
  const AblationRow* orc = rep.find(5, "oracle");
  report(4, five->mpjpe < one->mpjpe && rep.samples >= 100, "5 branches + CEN beats 1 branch",
         fmt("5+CEN %.4f vs 1 branch %.4f", five->mpjpe, one->mpjpe));
  const bool order = orc->mpjpe <= five->mpjpe && five->mpjpe <= rnd->mpjpe;
  const bool margin = rnd->mpjpe - five->mpjpe > rnd->mpjpe_std;
  report(5, order && margin, "oracle <= CEN <= random with margin",
         fmt("oracle %.4f, CEN %.4f, random %.4f (std %.4f over %d seeds)", orc->mpjpe, five->mpjpe, rnd->mpjpe,
             rnd->mpjpe_std, ac.random_seeds));

  // Residual identity at zero heads, on the same candidates.
  const Mrt fresh(d.model, mrt.config(), 0);
  bool identity = true;
  for (size_t i = 0; i < 20 && i < d.test.size(); ++i)
    for (const Candidate& c : stage1_candidates(d.pool, d.test[i], d.synth.intr, 2000, 5)) {
      const MrtOutput o = fresh.forward(d.test[i].image, c);
      identity = identity && o.pose.flat() == c.pose.flat() && o.translation.x == c.translation.x &&
                 o.translation.y == c.translation.y && o.translation.z == c.translation.z &&
                 std::all_of(o.shape.beta.begin(), o.shape.beta.end(), [](double b) { return b == 0.0; });
    }
  report(6, rep.refined_mpjpe < rep.stage1_mpjpe && identity, "refinement lowers stage-1 MPJPE",
         fmt("stage-1 %.4f -> refined %.4f; zero-head identity %s", rep.stage1_mpjpe, rep.refined_mpjpe,
             identity ? "exact" : "BROKEN"));
}

// ---------------------------------------------------------------- 9: determinism

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string dir_bytes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + '\0' + file_bytes(f);
  return all;
}

void criterion_determinism(Desk& d, const Mrt& mrt, const Cen& cen) {
  const fs::path tmp = fs::temp_directory_path() / "mion_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  std::vector<std::string> broken;
  const auto same3 = [&](const std::string& what, const std::function<std::string(int)>& make) {
    const std::string a = make(1), b = make(1), c = make(3);
    if (a.empty() || a != b || a != c) broken.push_back(what);
  };

  const auto motion = d.sampler.sample_n(1500, 3);
  same3("pool build", [&](int th) {
    const fs::path p = tmp / ("pool" + std::to_string(th) + ".bin");
    save_pool(build_pool(motion, 32, 8, 4, d.model, th), p.string());
    return file_bytes(p);
  });
  int run = 0;
  same3("synth gen", [&](int th) {
    const fs::path p = tmp / ("synth" + std::to_string(run++));
    save_dataset(gen_dataset(d.model, d.sampler, 10, 5, d.synth, th), p.string(), "{}");
    return dir_bytes(p);
  });
  const std::vector<Sample> small(d.train.begin(), d.train.begin() + 24);
  same3("train mrt", [&](int th) {
    Mrt m(d.model, MrtConfig{}, 3);
    MrtTrainConfig tc;
    tc.epochs = 2;
    tc.seed = 4;
    tc.threads = th;
    train_mrt(m, d.pool, small, tc);
    const auto b = nn::checkpoint_bytes(m.params());
    return std::string(b.begin(), b.end());
  });
  same3("train cen", [&](int th) {
    Cen c(d.model, CenConfig{}, 3);
    CenTrainConfig tc;
    tc.epochs = 2;
    tc.seed = 4;
    tc.threads = th;
    train_cen(c, d.pool, small, tc);
    const auto b = nn::checkpoint_bytes(c.params());
    return std::string(b.begin(), b.end());
  });
  const Stages st{&d.model, &d.pool, &mrt, &cen, d.synth.intr};
  same3("infer", [&](int th) {
    std::string all;
    for (size_t i = 0; i < 5; ++i) all += reconstruction_to_json(infer(st, d.test[i], 2000, 5, th));
    return all;
  });
  fs::remove_all(tmp);
  std::string detail = "pool build, synth gen, train mrt, train cen, infer across runs and 1/3 workers";
  if (!broken.empty()) {
    detail = "differs:";
    for (const auto& b : broken) detail += " " + b;
  }
  report(9, broken.empty(), "determinism", detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_camera();
  criterion_raster();

  Desk d;
  d.synth.noise.j2d_sigma = 2.0;
  d.synth.noise.dropout_prob = 0.1;
  criterion_gradients(d.model, gen_dataset(d.model, d.sampler, 1, 77, d.synth)[0]);

  auto t0 = std::chrono::steady_clock::now();
  d.pool = build_pool(d.sampler.sample_n(4000, 3), 64, 8, 4, d.model);
  d.train = gen_dataset(d.model, d.sampler, 1000, 5, d.synth);
  d.test = gen_dataset(d.model, d.sampler, 200, 6, d.synth);
  std::printf("pool %d members, %zu train / %zu held-out samples (%.0f s)\n", d.pool.size(), d.train.size(),
              d.test.size(), seconds_since(t0));

  Mrt mrt(d.model, MrtConfig{}, derive_seed(1, 0, 3));
  MrtTrainConfig mt;
  mt.epochs = 16;
  mt.seed = 21;
  t0 = std::chrono::steady_clock::now();
  train_mrt(mrt, d.pool, d.train, mt, [&](const TrainLogEntry& e) {
    std::printf("  mrt epoch %2d loss %.4f lr %.1e (%.0f s)\n", e.epoch, e.loss, e.lr, seconds_since(t0));
    std::fflush(stdout);
  });

  Cen cen(d.model, CenConfig{}, derive_seed(1, 0, 4));
  CenTrainConfig ct;
  ct.epochs = 12;
  ct.pairs_per_sample = 8;
  ct.seed = 22;
  t0 = std::chrono::steady_clock::now();
  train_cen(cen, d.pool, d.train, ct, [&](const TrainLogEntry& e) {
    std::printf("  cen epoch %2d loss %.4f lr %.1e (%.0f s)\n", e.epoch, e.loss, e.lr, seconds_since(t0));
    std::fflush(stdout);
  });

  criteria_trained(d, mrt, cen);
  criterion_metrics();
  criterion_selection(d.model);
  criterion_determinism(d, mrt, cen);

  std::printf("%d of 9 criteria failed (%.0f s total)\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
