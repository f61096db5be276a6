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

#include "mion/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mion/errors.hpp"
#include "mion/metrics.hpp"
#include "mion/parallel.hpp"
#include "mion/rng.hpp"

namespace mion {

const AblationRow* AblationReport::find(int branches, const std::string& selection) const {
  for (const auto& r : rows)
    if (r.branches == branches && r.selection == selection) return &r;
  return nullptr;
}

double branch_mpjpe(const BodyModel& model, const MrtOutput& out, const std::vector<Vec3>& gt_j3d, double* pa) {
  const std::vector<Vec3> j = regress_joints(model, forward(model, out.pose, out.shape));
  const std::vector<int> roots = model.pelvis_indices();
  if (pa) *pa = pa_mpjpe(j, gt_j3d);
  return mpjpe(j, gt_j3d, roots);
}

namespace {

struct Scored {
  double mpjpe = 0, pa = 0, stage1 = 0, cen = 0;
};

struct PerSample {
  // [n - 1][seed] for random; [n - 1] otherwise
  std::vector<double> cen_m, cen_pa, oracle_m, oracle_pa;
  std::vector<std::vector<double>> rnd_m, rnd_pa;
  double stage1_sum = 0, refined_sum = 0;
  int branch_count = 0;
};

}  // namespace

AblationReport run_ablation(const Stages& st, const std::vector<Sample>& testset, const AblationConfig& cfg) {
  if (testset.empty()) fail(ErrorCode::kEmptyDataset, "ablation: empty test set");
  if (cfg.max_branches < 1 || cfg.random_seeds < 1) fail(ErrorCode::kInvalidArgument, "ablation: bad config");
  const BodyModel& model = *st.model;
  const int n_max = cfg.max_branches, seeds = cfg.random_seeds;
  std::vector<PerSample> res(testset.size());

  parallel_for(static_cast<int>(testset.size()), cfg.threads, [&](int si) {
    const Sample& s = testset[si];
    if (!s.gt) fail(ErrorCode::kInvalidArgument, "ablation: sample without ground truth");
    const std::vector<FitResult> fits = fit_all(*st.pool, s.j2d, st.intr, s.conf);
    std::map<int, Scored> cache;
    PerSample& ps = res[si];
    ps.rnd_m.assign(n_max, std::vector<double>(seeds));
    ps.rnd_pa.assign(n_max, std::vector<double>(seeds));
    for (int n = 1; n <= n_max; ++n) {
      const std::vector<Candidate> cands = select_candidates(fits, *st.pool, cfg.threshold, n);
      std::vector<Candidate> fresh;
      for (const auto& c : cands)
        if (!cache.count(c.pool_index)) fresh.push_back(c);
      if (!fresh.empty()) {
        const std::vector<BranchResult> br = refine_branches(st, s, fresh);
        for (size_t i = 0; i < br.size(); ++i) {
          Scored sc;
          sc.mpjpe = branch_mpjpe(model, br[i].refined, s.gt->j3d, &sc.pa);
          sc.stage1 = branch_mpjpe(model, identity_refinement(model, fresh[i]), s.gt->j3d);
          if (st.cen) {
            if (std::isfinite(br[i].cen_score)) {
              sc.cen = br[i].cen_score;
            } else {
              const PnccMap p = st.cen->render_input_pncc(br[i].refined.pose, br[i].refined.shape,
                                                          br[i].refined.translation);
              const std::vector<double> v = st.cen->forward(s.image, p);
              double m = 0;
              for (double x : v) m += x;
              sc.cen = m / v.size();
            }
          }
          cache[fresh[i].pool_index] = sc;
        }
      }
      std::vector<std::vector<double>> means;
      int oracle = 0;
      for (size_t i = 0; i < cands.size(); ++i) {
        const Scored& sc = cache.at(cands[i].pool_index);
        means.push_back({sc.cen});
        if (sc.mpjpe < cache.at(cands[oracle].pool_index).mpjpe) oracle = static_cast<int>(i);
      }
      const int pick = st.cen ? select_branch(means) : 0;
      ps.cen_m.push_back(cache.at(cands[pick].pool_index).mpjpe);
      ps.cen_pa.push_back(cache.at(cands[pick].pool_index).pa);
      ps.oracle_m.push_back(cache.at(cands[oracle].pool_index).mpjpe);
      ps.oracle_pa.push_back(cache.at(cands[oracle].pool_index).pa);
      for (int r = 0; r < seeds; ++r) {
        std::mt19937_64 rng(derive_seed(cfg.seed + static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(si), n));
        std::uniform_int_distribution<int> u(0, static_cast<int>(cands.size()) - 1);
        const Scored& sc = cache.at(cands[u(rng)].pool_index);
        ps.rnd_m[n - 1][r] = sc.mpjpe;
        ps.rnd_pa[n - 1][r] = sc.pa;
      }
      if (n == n_max) {
        for (const auto& c : cands) {
          ps.stage1_sum += cache.at(c.pool_index).stage1;
          ps.refined_sum += cache.at(c.pool_index).mpjpe;
        }
        ps.branch_count = static_cast<int>(cands.size());
      }
    }
  });

  AblationReport rep;
  rep.samples = static_cast<int>(testset.size());
  const double inv = 1.0 / testset.size();
  int total_branches = 0;
  for (const auto& ps : res) {
    rep.stage1_mpjpe += ps.stage1_sum;
    rep.refined_mpjpe += ps.refined_sum;
    total_branches += ps.branch_count;
  }
  rep.stage1_mpjpe /= total_branches;
  rep.refined_mpjpe /= total_branches;
  for (int n = 1; n <= n_max; ++n) {
    AblationRow cen{n, "cen"}, oracle{n, "oracle"}, rnd{n, "random"};
    std::vector<double> seed_m(seeds, 0.0), seed_pa(seeds, 0.0);
    for (const auto& ps : res) {
      cen.mpjpe += ps.cen_m[n - 1] * inv;
      cen.pa_mpjpe += ps.cen_pa[n - 1] * inv;
      oracle.mpjpe += ps.oracle_m[n - 1] * inv;
      oracle.pa_mpjpe += ps.oracle_pa[n - 1] * inv;
      for (int r = 0; r < seeds; ++r) {
        seed_m[r] += ps.rnd_m[n - 1][r] * inv;
        seed_pa[r] += ps.rnd_pa[n - 1][r] * inv;
      }
    }
    for (int r = 0; r < seeds; ++r) {
      rnd.mpjpe += seed_m[r] / seeds;
      rnd.pa_mpjpe += seed_pa[r] / seeds;
    }
    if (seeds > 1) {
      double var = 0;
      for (int r = 0; r < seeds; ++r) var += (seed_m[r] - rnd.mpjpe) * (seed_m[r] - rnd.mpjpe);
      rnd.mpjpe_std = std::sqrt(var / (seeds - 1));
    }
    rep.rows.push_back(cen);
    rep.rows.push_back(rnd);
    rep.rows.push_back(oracle);
  }
  return rep;
}

std::string ablation_to_json(const AblationReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["stage1_mpjpe"] = r.stage1_mpjpe;
  j["refined_mpjpe"] = r.refined_mpjpe;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"branches", row.branches},
                    {"selection", row.selection},
                    {"mpjpe", row.mpjpe},
                    {"pa_mpjpe", row.pa_mpjpe},
                    {"mpjpe_std", row.mpjpe_std}});
  j["rows"] = rows;
  return j.dump(2);
}

std::string ablation_to_table(const AblationReport& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-9s %-10s %12s %12s %10s\n", "branches", "selection", "MPJPE", "PA-MPJPE", "std");
  os << line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-9d %-10s %12.5f %12.5f %10.5f\n", row.branches, row.selection.c_str(),
                  row.mpjpe, row.pa_mpjpe, row.mpjpe_std);
    os << line;
  }
  std::snprintf(line, sizeof line, "stage-1 branches %.5f, refined %.5f (%d samples)\n", r.stage1_mpjpe,
                r.refined_mpjpe, r.samples);
  os << line;
  return os.str();
}

}  // namespace mion
