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

#include <gtest/gtest.h>

#include <random>

#include "gradcheck.hpp"
#include "mion/errors.hpp"
#include "mion/mrt.hpp"
#include "mion/nn/checkpoint.hpp"
#include "mion/pipeline.hpp"
#include "mion/pose_sampler.hpp"

namespace mion {
namespace {

using nn::Tensor64;

const BodyModel& model() {
  static const BodyModel m = make_toy_model(3);
  return m;
}

const CandidatePool& pool() {
  static const CandidatePool p = [] {
    const PoseSampler sampler(model(), 1);
    return build_pool(sampler.sample_n(1500, 2), 32, 8, 3, model());
  }();
  return p;
}

std::vector<Sample> data(int n, std::uint64_t seed, double sigma = 0.0) {
  const PoseSampler sampler(model(), 2);
  SynthConfig c;
  c.noise.j2d_sigma = sigma;
  return gen_dataset(model(), sampler, n, seed, c);
}

void randomize_heads(Mrt& mrt) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> u(-0.05f, 0.05f);
  for (const auto& p : mrt.params().params())
    if (p->name.rfind("head.", 0) == 0)
      for (float& v : p->value) v = u(rng);
}

TEST(Mrt, ZeroHeadsReproduceCandidateExactly) {
  const Mrt mrt(model(), MrtConfig{}, 1);
  const auto d = data(3, 4, 2.0);
  for (const Sample& s : d)
    for (const Candidate& c : stage1_candidates(pool(), s, MrtConfig{}.intr, 2000, 3)) {
      const MrtOutput out = mrt.forward(s.image, c);
      EXPECT_EQ(out.pose.flat(), c.pose.flat());
      EXPECT_EQ(out.translation.x, c.translation.x);
      EXPECT_EQ(out.translation.y, c.translation.y);
      EXPECT_EQ(out.translation.z, c.translation.z);
      for (double b : out.shape.beta) EXPECT_EQ(b, 0.0);
    }
}

TEST(Mrt, OutputDependsOnImageAndCandidate) {
  Mrt mrt(model(), MrtConfig{}, 2);
  randomize_heads(mrt);
  const auto d = data(2, 5, 2.0);
  const auto c = stage1_candidates(pool(), d[0], MrtConfig{}.intr, 2000, 2);
  ASSERT_EQ(c.size(), 2u);
  const auto a = mrt.forward(d[0].image, c[0]).shape.beta;
  const auto b = mrt.forward(d[1].image, c[0]).shape.beta;
  const auto e = mrt.forward(d[0].image, c[1]).shape.beta;
  EXPECT_NE(a, b);
  EXPECT_NE(a, e);
}

TEST(Mrt, LossIsZeroAtGroundTruth) {
  for (const Sample& s : data(3, 6)) {
    const MrtOutput out{s.gt->pose, s.gt->shape, s.gt->translation};
    EXPECT_NEAR(mrt_loss_value(out, target_of(s), model(), MrtConfig{}.intr, {}), 0.0, 1e-9);
  }
}

TEST(Mrt, LossGradientThroughKinematics) {
  const BodyJointsLayer<double> joints(model());
  const Intrinsics intr;
  const Sample s = data(1, 7, 2.0)[0];
  const MrtTarget tgt = target_of(s);
  const int k = model().num_joints, nb = model().num_betas;
  const auto f = [&](const std::vector<Tensor64>& x) {
    return mrt_loss<double>({x[0], x[1], x[2]}, tgt, model(), joints, intr, {});
  };
  std::mt19937_64 rng(8);
  auto pose = s.gt->pose.flat();
  for (double& v : pose) v += testing::random_values(1, rng, -0.2, 0.2)[0];
  auto beta = testing::random_values(nb, rng);
  const Translation& t = s.gt->translation;
  const double err = testing::gradcheck(f, {{k, 3}, {nb}, {3}}, {pose, beta, {t.x + 0.1, t.y - 0.05, t.z * 1.02}});
  EXPECT_LT(err, 1e-3);
}

TEST(Mrt, MaskedTermsDropOut) {
  const Sample s = data(1, 9)[0];
  MrtTarget tgt;
  tgt.j2d = s.j2d;
  tgt.conf.assign(s.j2d.size(), 0.0);
  const MrtOutput out{PoseParams::zero(model().num_joints), ShapeParams{std::vector<double>(model().num_betas, 0.0)},
                      {0, 0, 50}};
  EXPECT_EQ(mrt_loss_value(out, tgt, model(), MrtConfig{}.intr, {}), 0.0);
}

TEST(Mrt, ConfigValidationAndJson) {
  MrtConfig c;
  c.d_pe = 7;
  EXPECT_THROW(c.validate(), Error);
  const MrtConfig back = mrt_config_from_json(mrt_config_to_json(MrtConfig{}));
  EXPECT_EQ(back.d_model, MrtConfig{}.d_model);
  EXPECT_EQ(back.backbone_channels, MrtConfig{}.backbone_channels);
}

TEST(MrtTraining, CheckpointBytesIndependentOfThreads) {
  const auto d = data(6, 10, 2.0);
  MrtTrainConfig tc;
  tc.epochs = 2;
  tc.batch = 3;
  tc.seed = 4;
  std::vector<char> bytes[2];
  for (int i = 0; i < 2; ++i) {
    Mrt mrt(model(), MrtConfig{}, 3);
    tc.threads = 1 + 2 * i;
    train_mrt(mrt, pool(), d, tc);
    bytes[i] = nn::checkpoint_bytes(mrt.params());
  }
  EXPECT_EQ(bytes[0], bytes[1]);
}

TEST(MrtTraining, FitsSmallSet) {
  const auto d = data(12, 11, 1.0);
  Mrt mrt(model(), MrtConfig{}, 5);
  MrtTrainConfig tc;
  tc.epochs = 150;
  tc.batch = 2;
  tc.augment = false;
  tc.n_branches = 1;
  const auto log = train_mrt(mrt, pool(), d, tc);
  double initial = 0;
  for (const Sample& s : d) {
    const Candidate c = stage1_candidates(pool(), s, MrtConfig{}.intr, 2000, 1)[0];
    initial += mrt_loss_value(identity_refinement(model(), c), target_of(s), model(), MrtConfig{}.intr, {});
  }
  initial /= d.size();
  EXPECT_LT(log.back().loss, 0.5 * initial);
}

TEST(MrtTraining, EmptyDatasetFails) {
  Mrt mrt(model(), MrtConfig{}, 1);
  try {
    train_mrt(mrt, pool(), {}, MrtTrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
}

}  // namespace
}  // namespace mion
