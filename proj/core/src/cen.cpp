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

#include "mion/cen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mion/errors.hpp"
#include "mion/parallel.hpp"
#include "mion/rng.hpp"

namespace mion {

using nn::Graph;
using nn::Tensor;

void CenConfig::validate() const {
  if (image_size < 16 || channels.empty() || hidden < 1 || !(intr.f > 0))
    fail(ErrorCode::kInvalidArgument, "cen config: invalid sizes");
  int s = image_size;
  for (size_t i = 0; i < channels.size(); ++i) s = (s + 2 - 3) / 2 + 1;
  if (s < 1) fail(ErrorCode::kInvalidArgument, "cen config: too many conv blocks for the image size");
}

std::string cen_config_to_json(const CenConfig& c) {
  nlohmann::json j;
  j["image_size"] = c.image_size;
  j["channels"] = c.channels;
  j["hidden"] = c.hidden;
  j["spatial_head"] = c.spatial_head;
  j["intrinsics"] = {{"f", c.intr.f}, {"c1", c.intr.c1}, {"c2", c.intr.c2}};
  return j.dump(2);
}

CenConfig cen_config_from_json(const std::string& text) {
  CenConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.image_size = j.value("image_size", c.image_size);
    c.channels = j.value("channels", c.channels);
    c.hidden = j.value("hidden", c.hidden);
    c.spatial_head = j.value("spatial_head", c.spatial_head);
    if (j.contains("intrinsics")) {
      const auto& i = j.at("intrinsics");
      c.intr = {i.value("f", c.intr.f), i.value("c1", c.intr.c1), i.value("c2", c.intr.c2)};
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad cen config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<double> cen_target(const BodyModel& model, const Mesh& gt, const Mesh& cand) {
  if (gt.vertices.size() != cand.vertices.size() || static_cast<int>(gt.vertices.size()) != model.num_vertices)
    fail(ErrorCode::kShapeMismatch, "cen_target: vertex counts differ");
  const std::vector<int> roots = model.pelvis_indices();
  const auto root_of = [&](const Mesh& m) {
    const std::vector<Vec3> j = regress_joints(model, m);
    Vec3 r;
    for (int i : roots) r += j[i];
    return (1.0 / roots.size()) * r;
  };
  const Vec3 rg = root_of(gt), rc = root_of(cand);
  const double inv_h = 1.0 / model.rest_height();
  std::vector<double> out(gt.vertices.size());
  for (size_t v = 0; v < out.size(); ++v) out[v] = inv_h * norm((gt.vertices[v] - rg) - (cand.vertices[v] - rc));
  return out;
}

Cen::Cen(const BodyModel& model, CenConfig cfg, std::uint64_t seed)
    : model_(&model), cfg_(std::move(cfg)), colors_(ncc(model)) {
  cfg_.validate();
  store_.set_seed(seed);
  int in = 6, side = cfg_.image_size;
  for (size_t i = 0; i < cfg_.channels.size(); ++i) {
    convs_.emplace_back(store_, "cen.conv" + std::to_string(i), in, cfg_.channels[i], 3, 2, 1);
    in = cfg_.channels[i];
    side = (side + 1) / 2;
  }
  if (cfg_.spatial_head) in *= side * side;
  fc_ = nn::Linear<float>(store_, "cen.fc", in, cfg_.hidden, false, nn::kReluGain);
  out_ = nn::Linear<float>(store_, "cen.out", cfg_.hidden, model.num_vertices);
}

Tensor Cen::forward_graph(Graph& g, const Image& image, const PnccMap& pncc) const {
  const int s = cfg_.image_size;
  if (image.height != s || image.width != s || pncc.height != s || pncc.width != s)
    fail(ErrorCode::kShapeMismatch, "cen: inputs must be " + std::to_string(s) + "x" + std::to_string(s));
  const int hw = s * s;
  std::vector<float> x(static_cast<size_t>(hw) * 6);
  for (int p = 0; p < hw; ++p)
    for (int c = 0; c < 3; ++c) {
      x[static_cast<size_t>(c) * hw + p] = image.data[static_cast<size_t>(p) * 3 + c] - 0.5f;
      x[static_cast<size_t>(c + 3) * hw + p] = pncc.data[static_cast<size_t>(p) * 3 + c] - 0.5f;
    }
  Tensor h = Tensor::constant({6, s, s}, std::move(x));
  for (const auto& c : convs_) h = nn::relu(c(g, h));
  const int ch = h.dim(0), l = h.dim(1) * h.dim(2);
  const Tensor pooled = cfg_.spatial_head ? nn::reshape(h, {1, ch * l})
                                          : nn::reshape(nn::mean(nn::reshape(h, {ch, l}), 1), {1, ch});
  return nn::reshape(out_(g, nn::relu(fc_(g, pooled))), {model_->num_vertices});
}

std::vector<double> Cen::forward(const Image& image, const PnccMap& pncc) const {
  Graph g(false);
  const Tensor t = forward_graph(g, image, pncc);
  std::vector<double> out(t.data().begin(), t.data().end());
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

PnccMap Cen::render_input_pncc(const PoseParams& pose, const ShapeParams& shape, const Translation& t) const {
  const Mesh mesh = mion::forward(*model_, pose, shape);
  const Intrinsics ri = cfg_.intr.rescaled(kCropSize, cfg_.image_size);
  return render_pncc(mesh, model_->faces, ri, t, colors_, cfg_.image_size, cfg_.image_size);
}

double Cen::accumulate_gradients(const Image& image, const PnccMap& pncc, const std::vector<double>& target,
                                 nn::GradBuffer<float>& grads) const {
  if (static_cast<int>(target.size()) != model_->num_vertices) fail(ErrorCode::kShapeMismatch, "cen target size");
  Graph g;
  const Tensor pred = forward_graph(g, image, pncc);
  Tensor loss = nn::l1_loss(pred, Tensor::constant({model_->num_vertices}, std::vector<float>(target.begin(), target.end())));
  loss.backward();
  g.accumulate(store_, grads);
  return loss.item();
}

CenPair make_training_pair(const Cen& cen, const std::vector<Candidate>& cands, std::mt19937_64& rng, double positive_rate) {
  if (cands.size() < 2) fail(ErrorCode::kTooFewCandidates, "training pairs need at least two candidates");
  const BodyModel& model = cen.model();
  std::uniform_int_distribution<int> pick(0, static_cast<int>(cands.size()) - 1);
  std::uniform_int_distribution<int> other(0, static_cast<int>(cands.size()) - 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CenPair p;
  p.a = pick(rng);
  const bool positive = u(rng) < positive_rate;
  const int o = other(rng);
  p.b = positive ? p.a : (o >= p.a ? o + 1 : o);
  const std::uint64_t tex = rng(), bg = rng();

  ShapeParams zero;
  zero.beta.assign(model.num_betas, 0.0);
  const Candidate& ca = cands[p.a];
  const Candidate& cb = cands[p.b];
  const Mesh ma = forward(model, ca.pose, zero);
  const Mesh mb = p.b == p.a ? ma : forward(model, cb.pose, zero);
  const int s = cen.config().image_size;
  const Intrinsics ri = cen.config().intr.rescaled(kCropSize, s);
  p.image = render_rgb(model, ma, ri, ca.translation, tex, bg, s, s);
  quantize_8bit(p.image);
  p.pncc = cen.render_input_pncc(cb.pose, zero, cb.translation);
  p.target = cen_target(model, ma, mb);
  return p;
}

int select_branch(const std::vector<std::vector<double>>& scores) {
  if (scores.empty()) fail(ErrorCode::kEmptyList, "select_branch: no branches");
  int best = 0;
  double best_mean = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].empty()) fail(ErrorCode::kEmptyList, "select_branch: empty score vector");
    const double m = std::accumulate(scores[i].begin(), scores[i].end(), 0.0) / scores[i].size();
    if (i == 0 || m < best_mean) {
      best = static_cast<int>(i);
      best_mean = m;
    }
  }
  return best;
}

std::vector<TrainLogEntry> train_cen(Cen& cen, const CandidatePool& pool, const std::vector<Sample>& data,
                                     const CenTrainConfig& cfg,
                                     const std::function<void(const TrainLogEntry&)>& on_epoch) {
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "train_cen: empty dataset");
  if (cfg.epochs < 1 || cfg.batch < 1 || cfg.pairs_per_sample < 1)
    fail(ErrorCode::kInvalidArgument, "train_cen: epochs, batch and pairs_per_sample must be >= 1");
  const Intrinsics& intr = cen.config().intr;
  // Candidate sets are fixed per sample; pairs are redrawn every epoch.
  std::vector<std::vector<Candidate>> cand_sets(data.size());
  parallel_for(static_cast<int>(data.size()), cfg.threads, [&](int i) {
    cand_sets[i] = stage1_candidates(pool, data[i], intr, cfg.threshold, std::max(2, cfg.n_branches));
  });
  std::vector<int> usable;
  for (size_t i = 0; i < cand_sets.size(); ++i)
    if (cand_sets[i].size() >= 2) usable.push_back(static_cast<int>(i));
  if (usable.empty()) fail(ErrorCode::kTooFewCandidates, "train_cen: no sample yields two candidates");

  nn::ParamStore<float>& store = cen.params();
  nn::Optimizer<float> opt(store, cfg.optim);
  const int n = static_cast<int>(usable.size()) * cfg.pairs_per_sample;
  std::vector<nn::GradBuffer<float>> per(std::min(cfg.batch, n), nn::GradBuffer<float>(store));
  nn::GradBuffer<float> total(store);
  std::vector<double> losses(per.size());
  std::vector<TrainLogEntry> log;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(nn::step_lr(cfg.optim.lr, epoch, cfg.epochs));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch), 3));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double sum = 0;
    for (int start = 0; start < n; start += cfg.batch) {
      const int b = std::min(cfg.batch, n - start);
      parallel_for(b, cfg.threads, [&](int i) {
        const int item = order[start + i];
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) * n + item, 4));
        const CenPair pair = make_training_pair(cen, cand_sets[usable[item / cfg.pairs_per_sample]], rng,
                                                cfg.positive_rate);
        per[i].zero();
        losses[i] = cen.accumulate_gradients(pair.image, pair.pncc, pair.target, per[i]);
      });
      total.zero();
      for (int i = 0; i < b; ++i) {
        total.add(per[i]);
        sum += losses[i];
      }
      total.scale(1.0f / static_cast<float>(b));
      opt.step(store, total);
    }
    TrainLogEntry e{epoch, sum / n, opt.lr()};
    log.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  return log;
}

}  // namespace mion
