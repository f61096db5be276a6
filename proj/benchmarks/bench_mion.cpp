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

#include <benchmark/benchmark.h>

#include <random>

#include "mion/kmeans.hpp"
#include "mion/mrt.hpp"
#include "mion/pncc.hpp"
#include "mion/pool.hpp"
#include "mion/pose_sampler.hpp"

namespace {

using namespace mion;

const BodyModel& model() {
  static const BodyModel m = make_toy_model(1);
  return m;
}

const CandidatePool& pool() {
  static const CandidatePool p = [] {
    const PoseSampler sampler(model(), 2);
    return build_pool(sampler.sample_n(4000, 3), 64, 8, 4, model());
  }();
  return p;
}

void BM_FitTranslation(benchmark::State& state) {
  const Intrinsics intr;
  const auto j = pool().member_joints(10);
  const auto uv = project(j, intr, {0.1, 0, 40});
  for (auto _ : state) benchmark::DoNotOptimize(fit_translation(j, uv, intr));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FitTranslation);

void BM_FitAll(benchmark::State& state) {
  const Intrinsics intr;
  const auto uv = project(pool().member_joints(77), intr, {0, 0, 50});
  for (auto _ : state) benchmark::DoNotOptimize(fit_all(pool(), uv, intr, {}, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * pool().size());
}
BENCHMARK(BM_FitAll)->Arg(1)->Arg(2);

void BM_RenderPncc(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Mesh mesh = forward(model(), pool().member_pose(5), ShapeParams{std::vector<double>(model().num_betas)});
  const NccColors colors = ncc(model());
  const Intrinsics intr = Intrinsics{}.rescaled(224, size);
  for (auto _ : state) benchmark::DoNotOptimize(render_pncc(mesh, model().faces, intr, {0, 0, 55}, colors, size, size));
}
BENCHMARK(BM_RenderPncc)->Arg(64)->Arg(224);

void BM_KMeans(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  Matrix data(static_cast<int>(state.range(0)), 45);
  for (double& v : data.data) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(data, 64, 7));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_MrtForward(benchmark::State& state) {
  const Mrt mrt(model(), MrtConfig{}, 1);
  SynthConfig c;
  const PoseSampler sampler(model(), 2);
  const Sample s = gen_dataset(model(), sampler, 1, 3, c)[0];
  const Candidate cand = stage1_candidates(pool(), s, c.intr, 2000, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(mrt.forward(s.image, cand));
}
BENCHMARK(BM_MrtForward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
