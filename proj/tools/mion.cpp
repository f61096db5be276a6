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

// mion command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mion/ablation.hpp"
#include "mion/binary_io.hpp"
#include "mion/errors.hpp"
#include "mion/metrics.hpp"
#include "mion/nn/checkpoint.hpp"
#include "mion/parallel.hpp"
#include "mion/pose_sampler.hpp"
#include "mion/rng.hpp"

using json = nlohmann::json;
using namespace mion;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitFormat = 3;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  json config = json::object();
};

std::string read_text(const std::string& path) {
  const std::vector<char> b = io::read_file(path);
  return {b.begin(), b.end()};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  io::write_file(path, text);
}

json section(const Globals& g, const char* name) {
  return g.config.contains(name) ? g.config.at(name) : json::object();
}

// Command-line paths win over the config document.
std::string pick(const std::string& flag, const Globals& g, const char* key) {
  if (!flag.empty()) return flag;
  const std::string v = g.config.value(key, std::string());
  if (v.empty()) fail(ErrorCode::kInvalidArgument, std::string("missing path: --") + key);
  return v;
}

PipelineConfig pipeline_config(const Globals& g) { return pipeline_config_from_json(g.config.dump()); }

BodyModel load_model(const std::string& flag, const Globals& g) { return load_body(pick(flag, g, "body")); }

PoseSampler motion_sampler(const BodyModel& model, const Globals& g) {
  const json p = section(g, "motion");
  PoseSamplerConfig c;
  c.archetypes = p.value("archetypes", c.archetypes);
  c.jitter = p.value("jitter", c.jitter);
  c.blend = p.value("blend", c.blend);
  c.yaw_range = p.value("yaw_range", c.yaw_range);
  c.tilt_sigma = p.value("tilt_sigma", c.tilt_sigma);
  return PoseSampler(model, p.value("seed", std::uint64_t{0}), c);
}

nn::OptimConfig optim_from(const json& j, nn::OptimConfig c) {
  if (j.contains("optimizer")) c.kind = nn::optim_kind_from_name(j.at("optimizer").get<std::string>());
  c.lr = j.value("lr", c.lr);
  c.momentum = j.value("momentum", c.momentum);
  c.beta2 = j.value("beta2", c.beta2);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  return c;
}

MrtTrainConfig mrt_train_config(const Globals& g) {
  const json j = section(g, "train_mrt");
  MrtTrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch = j.value("batch", c.batch);
  c.optim = optim_from(j, c.optim);
  c.threshold = g.config.value("threshold", c.threshold);
  c.n_branches = g.config.value("n_branches", c.n_branches);
  c.augment = j.value("augment", c.augment);
  c.weights.w1 = j.value("w1", c.weights.w1);
  c.weights.w2 = j.value("w2", c.weights.w2);
  c.seed = g.seed;
  c.threads = g.threads;
  if (c.epochs < 1 || c.batch < 1) fail(ErrorCode::kInvalidArgument, "train_mrt: epochs and batch must be >= 1");
  return c;
}

CenTrainConfig cen_train_config(const Globals& g) {
  const json j = section(g, "train_cen");
  CenTrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch = j.value("batch", c.batch);
  c.pairs_per_sample = j.value("pairs_per_sample", c.pairs_per_sample);
  c.positive_rate = j.value("positive_rate", c.positive_rate);
  c.optim = optim_from(j, c.optim);
  c.threshold = g.config.value("threshold", c.threshold);
  c.n_branches = g.config.value("n_branches", c.n_branches);
  c.seed = g.seed;
  c.threads = g.threads;
  if (c.epochs < 1 || c.batch < 1 || c.pairs_per_sample < 1)
    fail(ErrorCode::kInvalidArgument, "train_cen: epochs, batch and pairs_per_sample must be >= 1");
  return c;
}

SynthConfig synth_config(const Globals& g) {
  json s = section(g, "synth");
  if (!s.contains("intrinsics") && g.config.contains("intrinsics")) s["intrinsics"] = g.config["intrinsics"];
  return synth_config_from_json(s.dump());
}

json fits_to_json(const std::vector<FitResult>& fits) {
  json arr = json::array();
  for (const auto& f : fits) {
    json j;
    j["translation"] = {f.translation.x, f.translation.y, f.translation.z};
    j["loss"] = std::isfinite(f.loss) ? json(f.loss) : json(nullptr);
    j["behind_camera"] = f.behind_camera;
    j["degenerate"] = f.degenerate;
    arr.push_back(j);
  }
  return arr;
}

std::vector<FitResult> fits_from_json(const std::string& text) {
  std::vector<FitResult> out;
  try {
    for (const json& j : json::parse(text)) {
      FitResult f;
      const auto& t = j.at("translation");
      f.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
      f.loss = j.at("loss").is_null() ? kInfiniteLoss : j.at("loss").get<double>();
      f.behind_camera = j.value("behind_camera", false);
      f.degenerate = j.value("degenerate", false);
      out.push_back(f);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad fits file: ") + e.what());
  }
  return out;
}

// Keypoints from a JSON file {"j2d": [[u, v], ...], "conf": [...]} or a dataset sample.
Sample keypoint_input(const std::string& keypoints, const std::string& dataset, int index, const BodyModel& model) {
  if (!dataset.empty()) {
    std::vector<Sample> data = load_dataset(dataset, model);
    if (index < 0 || index >= static_cast<int>(data.size()))
      fail(ErrorCode::kInvalidArgument, "sample index out of range");
    return std::move(data[index]);
  }
  if (keypoints.empty()) fail(ErrorCode::kInvalidArgument, "need --keypoints or --dataset");
  Sample s;
  try {
    const json j = json::parse(read_text(keypoints));
    for (const auto& p : j.at("j2d")) s.j2d.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    s.conf = j.contains("conf") ? j.at("conf").get<std::vector<double>>() : std::vector<double>(s.j2d.size(), 1.0);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad keypoints file: ") + e.what());
  }
  if (static_cast<int>(s.j2d.size()) != model.num_regressed || s.conf.size() != s.j2d.size())
    fail(ErrorCode::kInvalidArgument, "keypoint count does not match the body model");
  return s;
}

// Trained stages referenced by the pipeline config; each network is optional.
struct LoadedStages {
  PipelineConfig cfg;
  BodyModel model;
  CandidatePool pool;
  std::unique_ptr<Mrt> mrt;
  std::unique_ptr<Cen> cen;

  Stages view() const { return {&model, &pool, mrt.get(), cen.get(), cfg.intr}; }
};

std::unique_ptr<LoadedStages> load_stages(const Globals& g) {
  auto ls = std::make_unique<LoadedStages>();
  ls->cfg = pipeline_config(g);
  ls->model = load_body(pick(ls->cfg.body_path, g, "body"));
  ls->pool = load_pool(pick(ls->cfg.pool_path, g, "pool"));
  if (ls->pool.num_regressed != ls->model.num_regressed || ls->pool.num_joints != ls->model.num_joints)
    fail(ErrorCode::kFormat, "pool does not match the body model");
  if (!ls->cfg.mrt_path.empty()) {
    ls->mrt = std::make_unique<Mrt>(ls->model, ls->cfg.mrt, 0);
    nn::load_checkpoint(ls->mrt->params(), ls->cfg.mrt_path);
  }
  if (!ls->cfg.cen_path.empty()) {
    ls->cen = std::make_unique<Cen>(ls->model, ls->cfg.cen, 0);
    nn::load_checkpoint(ls->cen->params(), ls->cfg.cen_path);
  }
  return ls;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mion: multi-initialization 3D body recovery"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration document")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  std::string body_path, pool_path, out, dataset, keypoints, fits_path, cands_path, table_path, log_path;
  int index = 0, count = 0, poses = 64, orients = 8, motion_count = 4000, n_branches = 0, size = 0;
  double threshold = 0;
  bool all = false;

  auto* body = app.add_subcommand("body", "body model artifacts");
  body->require_subcommand(1);
  auto* body_init = body->add_subcommand("init", "write the procedural toy body model");
  body_init->add_option("--out", out)->required();

  auto* pool = app.add_subcommand("pool", "candidate pool");
  pool->require_subcommand(1);
  auto* pool_build = pool->add_subcommand("build", "cluster a sampled motion set into a pool");
  pool_build->add_option("--body", body_path);
  pool_build->add_option("--poses", poses, "pose clusters P")->check(CLI::PositiveNumber);
  pool_build->add_option("--orients", orients, "orientation clusters O")->check(CLI::PositiveNumber);
  pool_build->add_option("--motion-count", motion_count, "motion set size")->check(CLI::PositiveNumber);
  pool_build->add_option("--out", out)->required();
  auto* pool_fit = pool->add_subcommand("fit", "fit a camera translation for every pool member");
  pool_fit->add_option("--body", body_path);
  pool_fit->add_option("--pool", pool_path);
  pool_fit->add_option("--keypoints", keypoints, "JSON with j2d and conf");
  pool_fit->add_option("--dataset", dataset);
  pool_fit->add_option("--index", index);
  pool_fit->add_option("--out", out);

  auto* select = app.add_subcommand("select", "pick diverse low-loss candidates from fits");
  select->add_option("--pool", pool_path);
  select->add_option("--fits", fits_path)->required();
  select->add_option("--threshold", threshold, "loss threshold (px^2)");
  select->add_option("-n,--branches", n_branches);
  select->add_option("--out", out);

  auto* pncc = app.add_subcommand("pncc", "projected normalized coordinate codes");
  pncc->require_subcommand(1);
  auto* pncc_render = pncc->add_subcommand("render", "render a candidate as a PNCC image");
  pncc_render->add_option("--body", body_path);
  pncc_render->add_option("--candidates", cands_path)->required();
  pncc_render->add_option("--index", index);
  pncc_render->add_option("--size", size, "output side in pixels");
  pncc_render->add_option("--out", out, ".ppm for an 8-bit image, otherwise the float map format")->required();

  auto* synth = app.add_subcommand("synth", "synthetic data");
  synth->require_subcommand(1);
  auto* synth_gen = synth->add_subcommand("gen", "generate a labeled dataset directory");
  synth_gen->add_option("--body", body_path);
  synth_gen->add_option("--count", count)->required()->check(CLI::PositiveNumber);
  synth_gen->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "train a network");
  train->require_subcommand(1);
  auto* train_mrt_cmd = train->add_subcommand("mrt", "train the refinement transformer");
  auto* train_cen_cmd = train->add_subcommand("cen", "train the consistency estimator");
  for (auto* t : {train_mrt_cmd, train_cen_cmd}) {
    t->add_option("--body", body_path);
    t->add_option("--pool", pool_path);
    t->add_option("--data", dataset)->required();
    t->add_option("--out", out)->required();
    t->add_option("--log", log_path, "per-epoch JSON lines");
  }

  auto* infer_cmd = app.add_subcommand("infer", "reconstruct bodies with the full pipeline");
  infer_cmd->add_option("--dataset", dataset)->required();
  infer_cmd->add_option("--index", index);
  infer_cmd->add_flag("--all", all, "every sample, one JSON line each");
  infer_cmd->add_option("--out", out);

  auto* eval = app.add_subcommand("eval", "MPJPE and PA-MPJPE over a labeled dataset");
  eval->add_option("--dataset", dataset)->required();
  eval->add_option("--out", out);

  auto* ablate = app.add_subcommand("ablate", "branch-count and selection ablation");
  ablate->add_option("--dataset", dataset)->required();
  ablate->add_option("--max-branches", n_branches);
  ablate->add_option("--out", out, "JSON report");
  ablate->add_option("--table", table_path, "plain-text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (!g.config_path.empty()) {
      try {
        g.config = json::parse(read_text(g.config_path));
      } catch (const json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("bad config: ") + e.what());
      }
      if (!g.config.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
    }

    if (*body_init) {
      save_body(make_toy_model(g.seed), out);
    } else if (*pool_build) {
      const BodyModel model = load_model(body_path, g);
      const PoseSampler sampler = motion_sampler(model, g);
      const auto motion = sampler.sample_n(motion_count, derive_seed(g.seed, 0, 1));
      save_pool(build_pool(motion, poses, orients, derive_seed(g.seed, 0, 2), model, g.threads), out);
    } else if (*pool_fit) {
      const BodyModel model = load_model(body_path, g);
      const CandidatePool p = load_pool(pick(pool_path, g, "pool"));
      const Sample s = keypoint_input(keypoints, dataset, index, model);
      const PipelineConfig pc = pipeline_config(g);
      write_text(out, fits_to_json(fit_all(p, s.j2d, pc.intr, s.conf, g.threads)).dump() + "\n");
    } else if (*select) {
      const CandidatePool p = load_pool(pick(pool_path, g, "pool"));
      const PipelineConfig pc = pipeline_config(g);
      const auto fits = fits_from_json(read_text(fits_path));
      if (static_cast<int>(fits.size()) != p.size()) fail(ErrorCode::kFormat, "fits do not match the pool size");
      const auto cands = select_candidates(fits, p, threshold > 0 ? threshold : pc.threshold,
                                           n_branches > 0 ? n_branches : pc.n_branches);
      write_text(out, candidates_to_json(cands));
    } else if (*pncc_render) {
      const BodyModel model = load_model(body_path, g);
      const PipelineConfig pc = pipeline_config(g);
      const auto cands = candidates_from_json(read_text(cands_path));
      if (index < 0 || index >= static_cast<int>(cands.size()))
        fail(ErrorCode::kInvalidArgument, "candidate index out of range");
      const int side = size > 0 ? size : static_cast<int>(kCropSize);
      const Mesh mesh = forward(model, cands[index].pose, ShapeParams{std::vector<double>(model.num_betas, 0.0)});
      const PnccMap map = render_pncc(mesh, model.faces, pc.intr.rescaled(kCropSize, side), cands[index].translation,
                                      ncc(model), side, side);
      if (out.size() > 4 && out.compare(out.size() - 4, 4, ".ppm") == 0)
        save_ppm(map, out);
      else
        save_pncc(map, out);
    } else if (*synth_gen) {
      const BodyModel model = load_model(body_path, g);
      const PoseSampler sampler = motion_sampler(model, g);
      const SynthConfig sc = synth_config(g);
      const auto data = gen_dataset(model, sampler, count, g.seed, sc, g.threads);
      json manifest;
      manifest["seed"] = g.seed;
      manifest["count"] = count;
      manifest["synth"] = json::parse(synth_config_to_json(sc));
      manifest["motion"] = section(g, "motion");
      save_dataset(data, out, manifest.dump(2));
    } else if (*train_mrt_cmd || *train_cen_cmd) {
      const BodyModel model = load_model(body_path, g);
      const CandidatePool p = load_pool(pick(pool_path, g, "pool"));
      const auto data = load_dataset(dataset, model);
      const PipelineConfig pc = pipeline_config(g);
      std::ostringstream log;
      auto on_epoch = [&](const TrainLogEntry& e) {
        log << log_entry_json(e) << '\n';
        std::cerr << log_entry_json(e) << '\n';
      };
      if (*train_mrt_cmd) {
        Mrt mrt(model, pc.mrt, derive_seed(g.seed, 0, 3));
        train_mrt(mrt, p, data, mrt_train_config(g), on_epoch);
        nn::save_checkpoint(mrt.params(), out);
      } else {
        Cen cen(model, pc.cen, derive_seed(g.seed, 0, 4));
        train_cen(cen, p, data, cen_train_config(g), on_epoch);
        nn::save_checkpoint(cen.params(), out);
      }
      if (!log_path.empty()) io::write_file(log_path, log.str());
    } else if (*infer_cmd) {
      const auto ls = load_stages(g);
      const auto data = load_dataset(dataset, ls->model);
      std::string text;
      if (all) {
        std::vector<std::string> lines(data.size());
        parallel_for(static_cast<int>(data.size()), g.threads, [&](int i) {
          lines[i] = reconstruction_to_json(infer(ls->view(), data[i], ls->cfg.threshold, ls->cfg.n_branches));
        });
        for (const auto& l : lines) text += json::parse(l).dump() + "\n";
      } else {
        if (index < 0 || index >= static_cast<int>(data.size()))
          fail(ErrorCode::kInvalidArgument, "sample index out of range");
        text = reconstruction_to_json(infer(ls->view(), data[index], ls->cfg.threshold, ls->cfg.n_branches, g.threads));
      }
      write_text(out, text);
    } else if (*eval) {
      const auto ls = load_stages(g);
      const auto data = load_dataset(dataset, ls->model);
      std::vector<double> e(data.size()), pa(data.size());
      parallel_for(static_cast<int>(data.size()), g.threads, [&](int i) {
        if (!data[i].gt) fail(ErrorCode::kInvalidArgument, "eval needs ground truth");
        const Reconstruction r = infer(ls->view(), data[i], ls->cfg.threshold, ls->cfg.n_branches);
        const auto j = regress_joints(ls->model, r.mesh);
        e[i] = mpjpe(j, data[i].gt->j3d, ls->model.pelvis_indices());
        pa[i] = pa_mpjpe(j, data[i].gt->j3d);
      });
      double me = 0, mpa = 0;
      for (size_t i = 0; i < data.size(); ++i) {
        me += e[i] / data.size();
        mpa += pa[i] / data.size();
      }
      json r;
      r["samples"] = data.size();
      r["mpjpe"] = me;
      r["pa_mpjpe"] = mpa;
      r["n_branches"] = ls->cfg.n_branches;
      write_text(out, r.dump(2));
    } else if (*ablate) {
      const auto ls = load_stages(g);
      const auto data = load_dataset(dataset, ls->model);
      AblationConfig ac;
      const json a = section(g, "ablation");
      ac.max_branches = n_branches > 0 ? n_branches : a.value("max_branches", ac.max_branches);
      ac.random_seeds = a.value("random_seeds", ac.random_seeds);
      ac.threshold = ls->cfg.threshold;
      ac.seed = g.seed;
      ac.threads = g.threads;
      const AblationReport rep = run_ablation(ls->view(), data, ac);
      if (!out.empty()) io::write_file(out, ablation_to_json(rep) + "\n");
      if (!table_path.empty()) io::write_file(table_path, ablation_to_table(rep));
      if (out.empty() && table_path.empty()) std::cout << ablation_to_table(rep);
    }
  } catch (const Error& e) {
    std::cerr << "mion: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kFormat ? kExitFormat : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "mion: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
