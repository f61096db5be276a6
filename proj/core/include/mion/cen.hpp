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

// Stage 3: Consistency Estimation Network. Regresses, from an RGB image
// stacked with a candidate PNCC, the per-vertex distance between the body in
// the image and the body encoded by the PNCC.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mion/body.hpp"
#include "mion/mrt.hpp"
#include "mion/nn/layers.hpp"
#include "mion/nn/optim.hpp"
#include "mion/pncc.hpp"
#include "mion/pool.hpp"
#include "mion/synth.hpp"

namespace mion {

struct CenConfig {
  int image_size = 64;
  std::vector<int> channels = {16, 32, 64, 64};
  int hidden = 128;
  bool spatial_head = false;  // flatten final map instead of global mean
  Intrinsics intr;  // crop frame

  void validate() const;
};

std::string cen_config_to_json(const CenConfig& cfg);
CenConfig cen_config_from_json(const std::string& text);

/// Root-centered (pelvis joints), rest-height-scaled per-vertex distance.
std::vector<double> cen_target(const BodyModel& model, const Mesh& gt, const Mesh& cand);

class Cen {
 public:
  Cen(const BodyModel& model, CenConfig cfg, std::uint64_t seed);
  Cen(const Cen&) = delete;
  Cen& operator=(const Cen&) = delete;

  const CenConfig& config() const { return cfg_; }
  nn::ParamStore<float>& params() { return store_; }
  const nn::ParamStore<float>& params() const { return store_; }
  const BodyModel& model() const { return *model_; }

  /// Raw (unclamped) scores [V].
  nn::Tensor forward_graph(nn::Graph& g, const Image& image, const PnccMap& pncc) const;

  /// Scores clamped at zero.
  std::vector<double> forward(const Image& image, const PnccMap& pncc) const;

  /// PNCC of a body state at this network's input resolution.
  PnccMap render_input_pncc(const PoseParams& pose, const ShapeParams& shape, const Translation& t) const;

  /// Mean absolute error against `target`; gradients are added to `grads`.
  double accumulate_gradients(const Image& image, const PnccMap& pncc, const std::vector<double>& target,
                              nn::GradBuffer<float>& grads) const;

 private:
  const BodyModel* model_;
  CenConfig cfg_;
  NccColors colors_;
  nn::ParamStore<float> store_;
  std::vector<nn::Conv2d<float>> convs_;
  nn::Linear<float> fc_, out_;
};

struct CenPair {
  Image image;
  PnccMap pncc;
  std::vector<double> target;
  int a = -1, b = -1;  // candidate indices
};

/// Renders candidate A as the RGB ground truth and candidate B as the PNCC;
/// with probability `positive_rate` B = A. Throws TooFewCandidates.
CenPair make_training_pair(const Cen& cen, const std::vector<Candidate>& cands, std::mt19937_64& rng, double positive_rate = 0.25);

/// argmin of mean score; ties keep the lowest index. Throws EmptyList.
int select_branch(const std::vector<std::vector<double>>& branch_scores);

struct CenTrainConfig {
  int epochs = 20;
  int pairs_per_sample = 1;
  int batch = 16;
  nn::OptimConfig optim{nn::OptimConfig::Kind::kAdamW, 1e-3, 0.9, 0.999, 1e-4, 5.0};
  double threshold = 2000.0;
  int n_branches = 5;
  double positive_rate = 0.25;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Pairs come from the stage-1 candidates of each sample (its keypoints
/// only); the sample images are not used. Throws EmptyDataset.
std::vector<TrainLogEntry> train_cen(Cen& cen, const CandidatePool& pool, const std::vector<Sample>& data,
                                     const CenTrainConfig& cfg,
                                     const std::function<void(const TrainLogEntry&)>& on_epoch = {});

}  // namespace mion
