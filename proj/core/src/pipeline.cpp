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

#include "mion/pipeline.hpp"

#include <cmath>

#include <json.hpp>

#include "mion/errors.hpp"
#include "mion/parallel.hpp"

namespace mion {

using nlohmann::json;

std::string pipeline_config_to_json(const PipelineConfig& c) {
  json j;
  j["body"] = c.body_path;
  j["pool"] = c.pool_path;
  j["mrt"] = c.mrt_path;
  j["cen"] = c.cen_path;
  j["intrinsics"] = {{"f", c.intr.f}, {"c1", c.intr.c1}, {"c2", c.intr.c2}};
  j["threshold"] = c.threshold;
  j["n_branches"] = c.n_branches;
  j["mrt_config"] = json::parse(mrt_config_to_json(c.mrt));
  j["cen_config"] = json::parse(cen_config_to_json(c.cen));
  return j.dump(2);
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  PipelineConfig c;
  try {
    const json j = json::parse(text);
    c.body_path = j.value("body", c.body_path);
    c.pool_path = j.value("pool", c.pool_path);
    c.mrt_path = j.value("mrt", c.mrt_path);
    c.cen_path = j.value("cen", c.cen_path);
    if (j.contains("intrinsics")) {
      const json& i = j.at("intrinsics");
      c.intr = {i.value("f", c.intr.f), i.value("c1", c.intr.c1), i.value("c2", c.intr.c2)};
    }
    c.threshold = j.value("threshold", c.threshold);
    c.n_branches = j.value("n_branches", c.n_branches);
    c.mrt.intr = c.intr;
    c.cen.intr = c.intr;
    if (j.contains("mrt_config")) c.mrt = mrt_config_from_json(j.at("mrt_config").dump());
    if (j.contains("cen_config")) c.cen = cen_config_from_json(j.at("cen_config").dump());
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad pipeline config: ") + e.what());
  }
  if (c.n_branches < 1) fail(ErrorCode::kInvalidArgument, "n_branches must be >= 1");
  if (!(c.threshold > 0)) fail(ErrorCode::kInvalidArgument, "threshold must be positive");
  return c;
}

MrtOutput identity_refinement(const BodyModel& model, const Candidate& cand) {
  MrtOutput o;
  o.pose = cand.pose;
  o.shape.beta.assign(model.num_betas, 0.0);
  o.translation = cand.translation;
  return o;
}

std::vector<BranchResult> refine_branches(const Stages& st, const Sample& s, const std::vector<Candidate>& cands,
                                          int threads) {
  std::vector<BranchResult> out(cands.size());
  const bool score = st.cen && cands.size() >= 2;
  parallel_for(static_cast<int>(cands.size()), threads, [&](int i) {
    BranchResult& b = out[i];
    b.candidate = cands[i];
    b.refined = st.mrt ? st.mrt->forward(s.image, cands[i]) : identity_refinement(*st.model, cands[i]);
    if (score) {
      const PnccMap p = st.cen->render_input_pncc(b.refined.pose, b.refined.shape, b.refined.translation);
      const std::vector<double> sc = st.cen->forward(s.image, p);
      double m = 0;
      for (double v : sc) m += v;
      b.cen_score = m / sc.size();
    }
  });
  return out;
}

Reconstruction infer(const Stages& st, const Sample& s, double threshold, int n_branches, int threads) {
  if (!st.model || !st.pool) fail(ErrorCode::kInvalidArgument, "infer: body model and pool are required");
  if (st.pool->size() == 0) fail(ErrorCode::kNoAdmissibleCandidate, "infer: empty candidate pool");
  const std::vector<FitResult> fits = fit_all(*st.pool, s.j2d, st.intr, s.conf, threads);
  const std::vector<Candidate> cands = select_candidates(fits, *st.pool, threshold, n_branches);
  Reconstruction r;
  r.branches = refine_branches(st, s, cands, threads);
  if (st.cen && r.branches.size() >= 2) {
    std::vector<std::vector<double>> means;
    for (const auto& b : r.branches) means.push_back({b.cen_score});
    r.branch_index = select_branch(means);
  }
  const MrtOutput& best = r.branches[r.branch_index].refined;
  r.pose = best.pose;
  r.shape = best.shape;
  r.translation = best.translation;
  r.mesh = forward(*st.model, r.pose, r.shape);
  return r;
}

std::string reconstruction_to_json(const Reconstruction& r) {
  json j;
  j["branch_index"] = r.branch_index;
  j["pose"] = r.pose.flat();
  j["beta"] = r.shape.beta;
  j["translation"] = {r.translation.x, r.translation.y, r.translation.z};
  json br = json::array();
  for (const auto& b : r.branches) {
    json e;
    e["pool_index"] = b.candidate.pool_index;
    e["fit_loss"] = std::isfinite(b.candidate.fit_loss) ? json(b.candidate.fit_loss) : json(nullptr);
    e["cen_score"] = std::isfinite(b.cen_score) ? json(b.cen_score) : json(nullptr);
    e["pose"] = b.refined.pose.flat();
    e["beta"] = b.refined.shape.beta;
    e["translation"] = {b.refined.translation.x, b.refined.translation.y, b.refined.translation.z};
    br.push_back(e);
  }
  j["branches"] = br;
  return j.dump(2);
}

}  // namespace mion
