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

// Stage 2: Mesh Refinement Transformer. A strided conv backbone followed by
// three transposed convs gives a feat_hw x feat_hw token grid; the PNCC
// encoding of the candidate is added to the tokens; joint queries carrying
// the candidate's rotations cross-attend the encoded grid and emit residual
// rotation offsets, while pooled heads emit shape and a bounded translation
// update.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mion/augment.hpp"
#include "mion/body.hpp"
#include "mion/body_layer.hpp"
#include "mion/nn/layers.hpp"
#include "mion/nn/optim.hpp"
#include "mion/pncc.hpp"
#include "mion/pool.hpp"
#include "mion/synth.hpp"

namespace mion {

struct MrtConfig {
  int image_size = 64;
  int feat_hw = 8;
  int d_model = 48;
  int d_pe = 16;  // 3 * d_pe == d_model
  int heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int ffn_hidden = 96;
  std::vector<int> backbone_channels = {16, 32, 48, 64};
  double pe_scale = 1.0;
  Intrinsics intr;  // crop frame

  /// Throws InvalidArgument when the configuration is inconsistent.
  void validate() const;
};

std::string mrt_config_to_json(const MrtConfig& cfg);
MrtConfig mrt_config_from_json(const std::string& text);

struct MrtOutput {
  PoseParams pose;
  ShapeParams shape;
  Translation translation;
};

struct LossWeights {
  double w1 = 1.0;  // parameter term
  double w2 = 5.0;  // keypoint terms
};

/// Supervision for one sample; absent terms are masked out.
struct MrtTarget {
  const PoseParams* pose = nullptr;
  const ShapeParams* shape = nullptr;
  const std::vector<Vec3>* j3d = nullptr;
  std::vector<Vec2> j2d;
  std::vector<double> conf;
};

/// Differentiable prediction: pose [K, 3], beta [S], translation [3].
template <class T>
struct MrtTensors {
  nn::TensorT<T> pose, beta, translation;
};

/// L = w1 ||[theta, beta] - gt|| + w2 (||J3d_gt - J3d|| + ||J2d_gt - J2d|| / crop),
/// 3D joints root-centered on the pelvis joints, 2D masked by confidence and
/// by joints behind the camera (counted in `behind`).
template <class T>
nn::TensorT<T> mrt_loss(const MrtTensors<T>& out, const MrtTarget& target, const BodyModel& model,
                        const BodyJointsLayer<T>& joints, const Intrinsics& intr, const LossWeights& w,
                        int* behind = nullptr);

/// Value-only loss of a finished prediction (double precision).
double mrt_loss_value(const MrtOutput& out, const MrtTarget& target, const BodyModel& model, const Intrinsics& intr,
                      const LossWeights& w);

class Mrt {
 public:
  Mrt(const BodyModel& model, MrtConfig cfg, std::uint64_t seed);
  Mrt(const Mrt&) = delete;
  Mrt& operator=(const Mrt&) = delete;

  const MrtConfig& config() const { return cfg_; }
  nn::ParamStore<float>& params() { return store_; }
  const nn::ParamStore<float>& params() const { return store_; }
  const BodyModel& model() const { return *model_; }

  /// Records the forward pass into `g`.
  MrtTensors<float> forward_graph(nn::Graph& g, const Image& image, const Candidate& cand) const;

  MrtOutput forward(const Image& image, const Candidate& cand) const;

  /// One sample's loss; gradients are added to `grads`.
  double accumulate_gradients(const Image& image, const Candidate& cand, const MrtTarget& target,
                              const LossWeights& w, nn::GradBuffer<float>& grads) const;

  /// Candidate PNCC encoding at feat_hw, laid out [L, d_model].
  std::vector<float> candidate_encoding(const Candidate& cand) const;

 private:
  /// Backbone, encoder and decoder; returns the normalized query sequence [K, d].
  nn::Tensor decode(nn::Graph& g, const Image& image, const Candidate& cand) const;

  const BodyModel* model_;
  MrtConfig cfg_;
  NccColors colors_;
  BodyJointsLayer<float> joints_;
  nn::ParamStore<float> store_;
  std::vector<nn::Conv2d<float>> convs_;
  std::vector<nn::Deconv2d<float>> deconvs_;
  nn::Parameter<float>* query_embed_ = nullptr;
  nn::Linear<float> rot_embed_;
  std::vector<nn::EncoderLayer<float>> encoder_;
  std::vector<nn::DecoderLayer<float>> decoder_;
  nn::LayerNorm<float> enc_norm_, dec_norm_;
  nn::Linear<float> pose_head_, shape_fc_, shape_head_, cam_fc_, cam_head_;
};

/// Crop-frame image to [3, H, W], centered at 0.
std::vector<float> image_chw(const Image& img);

MrtTarget target_of(const Sample& s);

struct MrtTrainConfig {
  int epochs = 30;
  int batch = 8;
  nn::OptimConfig optim{nn::OptimConfig::Kind::kAdamW, 1e-3, 0.9, 0.999, 1e-4, 5.0};
  double threshold = 2000.0;
  int n_branches = 5;
  bool augment = true;
  AugmentConfig augment_cfg;
  LossWeights weights;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TrainLogEntry {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
};

std::string log_entry_json(const TrainLogEntry& e);

/// Stage-1 candidates for a sample (fit_all + select_candidates).
std::vector<Candidate> stage1_candidates(const CandidatePool& pool, const Sample& s, const Intrinsics& intr,
                                         double threshold, int n_branches, int threads = 1);

/// Trains in place. Each step draws one stage-1 branch per sample; the
/// per-sample gradients are reduced in sample order so the result does not
/// depend on `threads`. Throws EmptyDataset.
std::vector<TrainLogEntry> train_mrt(Mrt& mrt, const CandidatePool& pool, const std::vector<Sample>& data,
                                     const MrtTrainConfig& cfg,
                                     const std::function<void(const TrainLogEntry&)>& on_epoch = {});

}  // namespace mion
