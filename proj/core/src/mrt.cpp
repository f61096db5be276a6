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

#include "mion/mrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "mion/errors.hpp"
#include "mion/parallel.hpp"
#include "mion/rng.hpp"

namespace mion {

using nn::Graph;
using nn::Tensor;
using nn::TensorT;

void MrtConfig::validate() const {
  const auto bad = [](const std::string& m) { fail(ErrorCode::kInvalidArgument, "mrt config: " + m); };
  if (d_pe <= 0 || 3 * d_pe != d_model) bad("d_model must equal 3 * d_pe");
  if (heads <= 0 || d_model % heads != 0) bad("d_model must be divisible by heads");
  if (backbone_channels.size() != 4) bad("backbone needs 4 conv blocks");
  if (image_size < 16 || image_size % 16 != 0) bad("image_size must be a positive multiple of 16");
  const int base = image_size / 16;
  int m = 0;
  while (m <= 3 && base * (1 << m) != feat_hw) ++m;
  if (m > 3) bad("feat_hw must be image_size / 16 times 1, 2, 4 or 8");
  if (encoder_layers < 0 || decoder_layers < 1 || ffn_hidden < 1) bad("layer counts");
  if (!(intr.f > 0)) bad("focal length must be positive");
}

std::string mrt_config_to_json(const MrtConfig& c) {
  nlohmann::json j;
  j["image_size"] = c.image_size;
  j["feat_hw"] = c.feat_hw;
  j["d_model"] = c.d_model;
  j["d_pe"] = c.d_pe;
  j["heads"] = c.heads;
  j["encoder_layers"] = c.encoder_layers;
  j["decoder_layers"] = c.decoder_layers;
  j["ffn_hidden"] = c.ffn_hidden;
  j["backbone_channels"] = c.backbone_channels;
  j["pe_scale"] = c.pe_scale;
  j["intrinsics"] = {{"f", c.intr.f}, {"c1", c.intr.c1}, {"c2", c.intr.c2}};
  return j.dump(2);
}

MrtConfig mrt_config_from_json(const std::string& text) {
  MrtConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.image_size = j.value("image_size", c.image_size);
    c.feat_hw = j.value("feat_hw", c.feat_hw);
    c.d_model = j.value("d_model", c.d_model);
    c.d_pe = j.value("d_pe", c.d_pe);
    c.heads = j.value("heads", c.heads);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.ffn_hidden = j.value("ffn_hidden", c.ffn_hidden);
    c.backbone_channels = j.value("backbone_channels", c.backbone_channels);
    c.pe_scale = j.value("pe_scale", c.pe_scale);
    if (j.contains("intrinsics")) {
      const auto& i = j.at("intrinsics");
      c.intr = {i.value("f", c.intr.f), i.value("c1", c.intr.c1), i.value("c2", c.intr.c2)};
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad mrt config: ") + e.what());
  }
  c.validate();
  return c;
}

template <class T>
TensorT<T> mrt_loss(const MrtTensors<T>& out, const MrtTarget& target, const BodyModel& model,
                    const BodyJointsLayer<T>& joints, const Intrinsics& intr, const LossWeights& w, int* behind) {
  const int K = model.num_joints, N = model.num_regressed;
  if (static_cast<int>(target.j2d.size()) != N || static_cast<int>(target.conf.size()) != N)
    fail(ErrorCode::kShapeMismatch, "mrt_loss: keypoint count mismatch");
  std::vector<TensorT<T>> terms;

  if (target.pose) {
    const std::vector<double> gp = target.pose->flat();
    std::vector<TensorT<T>> parts{nn::reshape(out.pose, {3 * K})};
    std::vector<T> gt(gp.begin(), gp.end());
    if (target.shape) {
      parts.push_back(out.beta);
      gt.insert(gt.end(), target.shape->beta.begin(), target.shape->beta.end());
    }
    const int len = static_cast<int>(gt.size());
    const TensorT<T> pred = parts.size() == 1 ? parts[0] : nn::concat(parts, 0);
    terms.push_back(nn::scale(nn::l2_loss(pred, TensorT<T>::constant({len}, std::move(gt))), static_cast<T>(w.w1)));
  }

  const TensorT<T> j = joints(out.pose, out.beta);
  const std::vector<int> roots = model.pelvis_indices();

  if (target.j3d) {
    if (static_cast<int>(target.j3d->size()) != N) fail(ErrorCode::kShapeMismatch, "mrt_loss: j3d size");
    TensorT<T> root;
    Vec3 groot;
    for (int r : roots) {
      const TensorT<T> row = nn::reshape(nn::slice(j, 0, r, r + 1), {3});
      root = root.defined() ? nn::add(root, row) : row;
      groot += (*target.j3d)[r];
    }
    root = nn::scale(root, static_cast<T>(1.0 / roots.size()));
    groot = (1.0 / roots.size()) * groot;
    std::vector<T> gc(static_cast<size_t>(N) * 3);
    for (int n = 0; n < N; ++n)
      for (int d = 0; d < 3; ++d) gc[3 * n + d] = static_cast<T>((*target.j3d)[n][d] - groot[d]);
    terms.push_back(nn::scale(nn::l2_loss(nn::sub(j, root), TensorT<T>::constant({N, 3}, std::move(gc))),
                              static_cast<T>(w.w2)));
  }

  std::vector<char> mask_behind;
  const TensorT<T> p = project_joints(j, out.translation, intr, &mask_behind);
  std::vector<T> m(static_cast<size_t>(N) * 2), g2(static_cast<size_t>(N) * 2);
  int nb = 0;
  for (int n = 0; n < N; ++n) {
    nb += mask_behind[n] ? 1 : 0;
    const double c = mask_behind[n] ? 0.0 : target.conf[n];
    m[2 * n] = m[2 * n + 1] = static_cast<T>(c);
    g2[2 * n] = static_cast<T>(c * target.j2d[n].u);
    g2[2 * n + 1] = static_cast<T>(c * target.j2d[n].v);
  }
  if (behind) *behind = nb;
  const TensorT<T> pm = nn::mul(p, TensorT<T>::constant({N, 2}, std::move(m)));
  terms.push_back(nn::scale(nn::l2_loss(pm, TensorT<T>::constant({N, 2}, std::move(g2))),
                            static_cast<T>(w.w2 / kCropSize)));

  TensorT<T> total = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) total = nn::add(total, terms[i]);
  return total;
}

template TensorT<float> mrt_loss(const MrtTensors<float>&, const MrtTarget&, const BodyModel&,
                                 const BodyJointsLayer<float>&, const Intrinsics&, const LossWeights&, int*);
template TensorT<double> mrt_loss(const MrtTensors<double>&, const MrtTarget&, const BodyModel&,
                                  const BodyJointsLayer<double>&, const Intrinsics&, const LossWeights&, int*);

double mrt_loss_value(const MrtOutput& out, const MrtTarget& target, const BodyModel& model, const Intrinsics& intr,
                      const LossWeights& w) {
  const BodyJointsLayer<double> layer(model);
  MrtTensors<double> t;
  t.pose = nn::Tensor64::constant({model.num_joints, 3}, out.pose.flat());
  t.beta = nn::Tensor64::constant({model.num_betas}, out.shape.beta);
  t.translation = nn::Tensor64::constant({3}, {out.translation.x, out.translation.y, out.translation.z});
  return mrt_loss(t, target, model, layer, intr, w).item();
}

std::vector<float> image_chw(const Image& img) {
  const int hw = img.height * img.width;
  std::vector<float> out(static_cast<size_t>(hw) * 3);
  for (int p = 0; p < hw; ++p)
    for (int c = 0; c < 3; ++c) out[static_cast<size_t>(c) * hw + p] = img.data[static_cast<size_t>(p) * 3 + c] - 0.5f;
  return out;
}

Mrt::Mrt(const BodyModel& model, MrtConfig cfg, std::uint64_t seed)
    : model_(&model), cfg_(std::move(cfg)), colors_(ncc(model)), joints_(model) {
  cfg_.validate();
  store_.set_seed(seed);
  const int d = cfg_.d_model, K = model.num_joints;
  int in = 3;
  for (int i = 0; i < 4; ++i) {
    convs_.emplace_back(store_, "backbone.conv" + std::to_string(i), in, cfg_.backbone_channels[i], 3, 2, 1);
    in = cfg_.backbone_channels[i];
  }
  int up = 0;
  while ((cfg_.image_size / 16) * (1 << up) != cfg_.feat_hw) ++up;
  for (int i = 0; i < 3; ++i) {
    const bool stride2 = i < up;
    deconvs_.emplace_back(store_, "backbone.deconv" + std::to_string(i), i == 0 ? in : d, d, stride2 ? 4 : 3,
                          stride2 ? 2 : 1, 1);
  }
  for (int i = 0; i < cfg_.encoder_layers; ++i)
    encoder_.emplace_back(store_, "encoder." + std::to_string(i), d, cfg_.heads, cfg_.ffn_hidden);
  enc_norm_ = nn::LayerNorm<float>(store_, "encoder.norm", d);
  query_embed_ = store_.add("decoder.query", {K, d}, d);
  rot_embed_ = nn::Linear<float>(store_, "decoder.rot_embed", 3, d);
  for (int i = 0; i < cfg_.decoder_layers; ++i)
    decoder_.emplace_back(store_, "decoder." + std::to_string(i), d, cfg_.heads, cfg_.ffn_hidden);
  dec_norm_ = nn::LayerNorm<float>(store_, "decoder.norm", d);
  pose_head_ = nn::Linear<float>(store_, "head.pose", d, 3, true);
  shape_fc_ = nn::Linear<float>(store_, "head.shape_fc", d, d);
  shape_head_ = nn::Linear<float>(store_, "head.shape", d, model.num_betas, true);
  cam_fc_ = nn::Linear<float>(store_, "head.cam_fc", d, d);
  cam_head_ = nn::Linear<float>(store_, "head.cam", d, 3, true);
}

std::vector<float> Mrt::candidate_encoding(const Candidate& cand) const {
  ShapeParams zero;
  zero.beta.assign(model_->num_betas, 0.0);
  const Mesh mesh = mion::forward(*model_, cand.pose, zero);
  const Intrinsics fi = cfg_.intr.rescaled(kCropSize, cfg_.feat_hw);
  const PnccMap map = render_pncc(mesh, model_->faces, fi, cand.translation, colors_, cfg_.feat_hw, cfg_.feat_hw);
  return pncc_pe(map, cfg_.d_pe, cfg_.pe_scale).data;
}

Tensor Mrt::decode(Graph& g, const Image& image, const Candidate& cand) const {
  const int K = model_->num_joints, d = cfg_.d_model, L = cfg_.feat_hw * cfg_.feat_hw;
  if (image.height != cfg_.image_size || image.width != cfg_.image_size)
    fail(ErrorCode::kShapeMismatch, "mrt: image is " + std::to_string(image.height) + "x" +
                                        std::to_string(image.width) + ", expected " + std::to_string(cfg_.image_size));
  if (static_cast<int>(cand.pose.joints.size()) != K - 1) fail(ErrorCode::kShapeMismatch, "mrt: candidate pose size");

  Tensor x = Tensor::constant({3, image.height, image.width}, image_chw(image));
  for (const auto& c : convs_) x = nn::relu(c(g, x));
  for (size_t i = 0; i < deconvs_.size(); ++i) {
    x = deconvs_[i](g, x);
    if (i + 1 < deconvs_.size()) x = nn::relu(x);
  }
  Tensor tokens = nn::transpose(nn::reshape(x, {d, L}));
  tokens = nn::add(tokens, Tensor::constant({L, d}, candidate_encoding(cand)));
  for (const auto& layer : encoder_) tokens = layer(g, tokens);
  const Tensor memory = enc_norm_(g, tokens);

  const std::vector<double> flat = cand.pose.flat();
  const std::vector<float> rot(flat.begin(), flat.end());
  Tensor q = nn::add(g.param(query_embed_), rot_embed_(g, Tensor::constant({K, 3}, rot)));
  for (const auto& layer : decoder_) q = layer(g, q, memory);
  return dec_norm_(g, q);
}

MrtTensors<float> Mrt::forward_graph(Graph& g, const Image& image, const Candidate& cand) const {
  const int K = model_->num_joints, d = cfg_.d_model;
  const Tensor q = decode(g, image, cand);
  const std::vector<double> flat = cand.pose.flat();
  MrtTensors<float> out;
  out.pose = nn::add(Tensor::constant({K, 3}, std::vector<float>(flat.begin(), flat.end())), pose_head_(g, q));
  const Tensor pooled = nn::reshape(nn::mean(q, 0), {1, d});
  out.beta = nn::reshape(shape_head_(g, nn::gelu(shape_fc_(g, pooled))), {model_->num_betas});
  const Tensor dt = nn::tanh(nn::reshape(cam_head_(g, nn::gelu(cam_fc_(g, pooled))), {3}));
  const Translation& t = cand.translation;
  out.translation = nn::add(
      Tensor::constant({3}, {static_cast<float>(t.x), static_cast<float>(t.y), static_cast<float>(t.z)}),
      nn::scale(dt, static_cast<float>(0.5 * t.z)));
  return out;
}

MrtOutput Mrt::forward(const Image& image, const Candidate& cand) const {
  // Offsets are added in double so that zero offsets reproduce the candidate exactly.
  Graph g(false);
  const int K = model_->num_joints, d = cfg_.d_model;
  const Tensor q = decode(g, image, cand);
  const Tensor delta_t = pose_head_(g, q);
  const auto delta = delta_t.data();
  const Tensor pooled = nn::reshape(nn::mean(q, 0), {1, d});
  const Tensor beta = shape_head_(g, nn::gelu(shape_fc_(g, pooled)));
  const Tensor dt = nn::tanh(cam_head_(g, nn::gelu(cam_fc_(g, pooled))));

  MrtOutput out;
  std::vector<double> pose = cand.pose.flat();
  for (int i = 0; i < 3 * K; ++i) pose[i] += static_cast<double>(delta[i]);
  out.pose = PoseParams::from_flat(pose);
  out.shape.beta.assign(beta.data().begin(), beta.data().end());
  const double bound = 0.5 * cand.translation.z;
  const auto dv = dt.data();
  out.translation = cand.translation + Vec3{bound * dv[0], bound * dv[1], bound * dv[2]};
  return out;
}

double Mrt::accumulate_gradients(const Image& image, const Candidate& cand, const MrtTarget& target,
                                 const LossWeights& w, nn::GradBuffer<float>& grads) const {
  Graph g;
  const MrtTensors<float> out = forward_graph(g, image, cand);
  Tensor loss = mrt_loss(out, target, *model_, joints_, cfg_.intr, w);
  loss.backward();
  g.accumulate(store_, grads);
  return loss.item();
}

MrtTarget target_of(const Sample& s) {
  MrtTarget t;
  if (s.gt) {
    t.pose = &s.gt->pose;
    t.shape = &s.gt->shape;
    t.j3d = &s.gt->j3d;
  }
  t.j2d = s.j2d;
  t.conf = s.conf;
  return t;
}

std::string log_entry_json(const TrainLogEntry& e) {
  nlohmann::json j;
  j["epoch"] = e.epoch;
  j["loss"] = e.loss;
  j["lr"] = e.lr;
  return j.dump();
}

std::vector<Candidate> stage1_candidates(const CandidatePool& pool, const Sample& s, const Intrinsics& intr,
                                         double threshold, int n_branches, int threads) {
  const std::vector<FitResult> fits = fit_all(pool, s.j2d, intr, s.conf, threads);
  return select_candidates(fits, pool, threshold, n_branches);
}

std::vector<TrainLogEntry> train_mrt(Mrt& mrt, const CandidatePool& pool, const std::vector<Sample>& data,
                                     const MrtTrainConfig& cfg,
                                     const std::function<void(const TrainLogEntry&)>& on_epoch) {
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "train_mrt: empty dataset");
  if (cfg.epochs < 1 || cfg.batch < 1) fail(ErrorCode::kInvalidArgument, "train_mrt: epochs and batch must be >= 1");
  const BodyModel& model = mrt.model();
  const Intrinsics& intr = mrt.config().intr;
  nn::ParamStore<float>& store = mrt.params();
  nn::Optimizer<float> opt(store, cfg.optim);
  const int n = static_cast<int>(data.size());
  std::vector<TrainLogEntry> log;
  std::vector<nn::GradBuffer<float>> per(std::min(cfg.batch, n), nn::GradBuffer<float>(store));
  nn::GradBuffer<float> total(store);
  std::vector<double> losses(per.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(nn::step_lr(cfg.optim.lr, epoch, cfg.epochs));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch), 1));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double sum = 0;
    for (int start = 0; start < n; start += cfg.batch) {
      const int b = std::min(cfg.batch, n - start);
      parallel_for(b, cfg.threads, [&](int i) {
        const int idx = order[start + i];
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) * n + idx, 2));
        const Sample s = cfg.augment ? augment(data[idx], model, intr, cfg.augment_cfg, rng) : data[idx];
        const std::vector<Candidate> cands = stage1_candidates(pool, s, intr, cfg.threshold, cfg.n_branches);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(cands.size()) - 1);
        const Candidate& c = cands[pick(rng)];
        per[i].zero();
        losses[i] = mrt.accumulate_gradients(s.image, c, target_of(s), cfg.weights, per[i]);
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
