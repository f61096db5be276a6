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

#include "mion/pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "mion/binary_io.hpp"
#include "mion/errors.hpp"
#include "mion/parallel.hpp"

namespace mion {

PoseParams CandidatePool::member_pose(int member) const {
  const int p = pose_of(member), o = orient_of(member);
  PoseParams pose;
  const double* oc = orient_centroids.row(o);
  pose.global_orient.v = {oc[0], oc[1], oc[2]};
  const double* pc = pose_centroids.row(p);
  for (int j = 0; j + 1 < num_joints; ++j) pose.joints.push_back(AxisAngle{{pc[3 * j], pc[3 * j + 1], pc[3 * j + 2]}});
  return pose;
}

std::vector<double> member_pose_vector(const CandidatePool& pool, int member) {
  std::vector<double> v;
  v.reserve(3 * pool.num_joints);
  const double* oc = pool.orient_centroids.row(pool.orient_of(member));
  v.insert(v.end(), oc, oc + 3);
  const double* pc = pool.pose_centroids.row(pool.pose_of(member));
  v.insert(v.end(), pc, pc + pool.pose_centroids.cols);
  return v;
}

std::vector<Vec3> oriented_joints(const BodyModel& model, const std::vector<double>& joints_flat, Vec3 orient) {
  std::vector<double> flat(3, 0.0);
  flat.insert(flat.end(), joints_flat.begin(), joints_flat.end());
  const PoseParams pose = PoseParams::from_flat(flat);
  const ShapeParams shape{std::vector<double>(model.num_betas, 0.0)};
  std::vector<Vec3> j = regress_joints(model, forward(model, pose, shape));
  const Mat3 r = rodrigues(AxisAngle{orient});
  const Vec3 root = model.root();
  for (Vec3& p : j) p = r * (p - root) + root;
  return j;
}

CandidatePool build_pool(const std::vector<PoseParams>& motion_set, int num_poses, int num_orients,
                         std::uint64_t seed, const BodyModel& model, int threads) {
  const int m = static_cast<int>(motion_set.size());
  const int K = model.num_joints;
  if (num_poses < 1 || num_orients < 1 || m < std::max(num_poses, num_orients))
    fail(ErrorCode::kInvalidK, "motion set must hold at least max(P, O) samples");
  Matrix poses(m, 3 * (K - 1)), orients(m, 3);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(motion_set[i].joints.size()) != K - 1)
      fail(ErrorCode::kInvalidDims, "motion sample joint count mismatch");
    const std::vector<double> jf = motion_set[i].joints_flat();
    std::copy(jf.begin(), jf.end(), poses.row(i));
    for (int d = 0; d < 3; ++d) orients.row(i)[d] = motion_set[i].global_orient.v[d];
  }
  CandidatePool pool;
  pool.num_poses = num_poses;
  pool.num_orients = num_orients;
  pool.num_regressed = model.num_regressed;
  pool.num_joints = K;
  pool.pose_centroids = kmeans(poses, num_poses, seed, 100).centroids;
  pool.orient_centroids = kmeans(orients, num_orients, seed ^ 0x9e3779b97f4a7c15ULL, 100).centroids;

  const int N = model.num_regressed;
  pool.joints_cache.assign(static_cast<size_t>(pool.size()) * N, Vec3{});
  parallel_for(num_poses, threads, [&](int p) {
    const double* pc = pool.pose_centroids.row(p);
    const std::vector<double> jf(pc, pc + pool.pose_centroids.cols);
    const std::vector<Vec3> rest = oriented_joints(model, jf, Vec3{});
    const Vec3 root = model.root();
    for (int o = 0; o < num_orients; ++o) {
      const double* oc = pool.orient_centroids.row(o);
      const Mat3 r = rodrigues(AxisAngle{{oc[0], oc[1], oc[2]}});
      Vec3* dst = pool.joints_cache.data() + static_cast<size_t>(p * num_orients + o) * N;
      for (int n = 0; n < N; ++n) dst[n] = r * (rest[n] - root) + root;
    }
  });
  return pool;
}

std::vector<FitResult> fit_all(const CandidatePool& pool, std::span<const Vec2> j2d, const Intrinsics& intr,
                               std::span<const double> conf, int threads) {
  if (static_cast<int>(j2d.size()) != pool.num_regressed)
    fail(ErrorCode::kShapeMismatch, "fit_all: keypoint count differs from pool joints");
  double wsum = 0;
  if (conf.empty()) {
    wsum = static_cast<double>(j2d.size());
  } else {
    for (double c : conf) wsum += c;
  }
  std::vector<FitResult> out(pool.size());
  if (wsum == 0.0) {
    for (auto& r : out) r.degenerate = true;
    return out;
  }
  parallel_for(pool.size(), threads, [&](int i) {
    try {
      out[i] = fit_translation(pool.member_joints(i), j2d, intr, conf);
    } catch (const Error&) {
      out[i].loss = kInfiniteLoss;
      out[i].behind_camera = false;
    }
  });
  return out;
}

std::vector<Candidate> select_candidates(const std::vector<FitResult>& fits, const CandidatePool& pool,
                                         double threshold, int n_branches) {
  if (n_branches < 1) fail(ErrorCode::kInvalidArgument, "n_branches must be >= 1");
  const int m = static_cast<int>(fits.size());
  if (m == 0 || m != pool.size()) fail(ErrorCode::kEmptyPool, "no pool members to select from");

  std::vector<int> admissible;
  for (int i = 0; i < m; ++i)
    if (fits[i].loss < threshold) admissible.push_back(i);
  if (static_cast<int>(admissible.size()) < n_branches) {
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fits[a].loss < fits[b].loss; });
    admissible.assign(order.begin(), order.begin() + std::min(m, n_branches));
    std::sort(admissible.begin(), admissible.end());
  }

  int first = admissible[0];
  for (int i : admissible)
    if (fits[i].loss < fits[first].loss) first = i;

  std::vector<std::vector<double>> vecs;
  vecs.reserve(admissible.size());
  for (int i : admissible) vecs.push_back(member_pose_vector(pool, i));
  const auto dist = [&](size_t a, size_t b) {
    double s = 0;
    for (size_t d = 0; d < vecs[a].size(); ++d) {
      const double t = vecs[a][d] - vecs[b][d];
      s += t * t;
    }
    return std::sqrt(s);
  };

  std::vector<int> chosen_local;
  const size_t first_local = std::find(admissible.begin(), admissible.end(), first) - admissible.begin();
  chosen_local.push_back(static_cast<int>(first_local));
  std::vector<double> mind(admissible.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(admissible.size(), false);
  taken[first_local] = true;
  while (static_cast<int>(chosen_local.size()) < n_branches) {
    const size_t last = chosen_local.back();
    int best = -1;
    for (size_t c = 0; c < admissible.size(); ++c) {
      if (taken[c]) continue;
      mind[c] = std::min(mind[c], dist(c, last));
      if (best < 0 || mind[c] > mind[best]) best = static_cast<int>(c);
    }
    if (best < 0) break;
    taken[best] = true;
    chosen_local.push_back(best);
  }

  std::vector<Candidate> out;
  for (int c : chosen_local) {
    const int idx = admissible[c];
    Candidate cand;
    cand.pool_index = idx;
    cand.pose = pool.member_pose(idx);
    cand.translation = fits[idx].translation;
    cand.fit_loss = fits[idx].loss;
    out.push_back(std::move(cand));
  }
  return out;
}

void save_pool(const CandidatePool& pool, const std::string& path) {
  io::Writer w;
  w.magic("MIONPOOL");
  w.u32(1);
  w.u32(pool.num_poses);
  w.u32(pool.num_orients);
  w.u32(pool.num_regressed);
  w.u32(pool.num_joints);
  for (double x : pool.pose_centroids.data) w.f32(static_cast<float>(x));
  for (double x : pool.orient_centroids.data) w.f32(static_cast<float>(x));
  for (const Vec3& p : pool.joints_cache)
    for (int d = 0; d < 3; ++d) w.f32(static_cast<float>(p[d]));
  w.save(path);
}

CandidatePool load_pool(const std::string& path) {
  io::Reader r = io::Reader::from_file(path);
  r.expect_magic("MIONPOOL");
  if (r.u32() != 1) fail(ErrorCode::kFormat, "unsupported pool version");
  CandidatePool pool;
  pool.num_poses = static_cast<int>(r.u32());
  pool.num_orients = static_cast<int>(r.u32());
  pool.num_regressed = static_cast<int>(r.u32());
  pool.num_joints = static_cast<int>(r.u32());
  if (pool.num_poses < 1 || pool.num_orients < 1 || pool.num_regressed < 1 || pool.num_joints < 2 ||
      static_cast<long long>(pool.num_poses) * pool.num_orients > 100000000LL)
    fail(ErrorCode::kFormat, "pool header has invalid dimensions");
  pool.pose_centroids = Matrix(pool.num_poses, 3 * (pool.num_joints - 1));
  for (double& x : pool.pose_centroids.data) x = r.f32();
  pool.orient_centroids = Matrix(pool.num_orients, 3);
  for (double& x : pool.orient_centroids.data) x = r.f32();
  pool.joints_cache.resize(static_cast<size_t>(pool.size()) * pool.num_regressed);
  for (Vec3& p : pool.joints_cache)
    for (int d = 0; d < 3; ++d) p[d] = r.f32();
  r.expect_end();
  return pool;
}

std::string candidates_to_json(const std::vector<Candidate>& cands) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Candidate& c : cands) {
    nlohmann::json j;
    j["pool_index"] = c.pool_index;
    j["pose"] = c.pose.joints_flat();
    j["orient"] = {c.pose.global_orient.v.x, c.pose.global_orient.v.y, c.pose.global_orient.v.z};
    j["translation"] = {c.translation.x, c.translation.y, c.translation.z};
    if (std::isfinite(c.fit_loss)) {
      j["fit_loss"] = c.fit_loss;
    } else {
      j["fit_loss"] = nullptr;  // +inf sentinel
    }
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::vector<Candidate> candidates_from_json(const std::string& text) {
  std::vector<Candidate> out;
  try {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) fail(ErrorCode::kFormat, "candidate list must be a JSON array");
    for (const auto& j : arr) {
      Candidate c;
      c.pool_index = j.value("pool_index", -1);
      std::vector<double> flat = j.at("orient").get<std::vector<double>>();
      if (flat.size() != 3) fail(ErrorCode::kFormat, "orient must have 3 entries");
      const std::vector<double> joints = j.at("pose").get<std::vector<double>>();
      flat.insert(flat.end(), joints.begin(), joints.end());
      c.pose = PoseParams::from_flat(flat);
      const std::vector<double> t = j.at("translation").get<std::vector<double>>();
      if (t.size() != 3) fail(ErrorCode::kFormat, "translation must have 3 entries");
      c.translation = {t[0], t[1], t[2]};
      c.fit_loss = j.at("fit_loss").is_null() ? kInfiniteLoss : j.at("fit_loss").get<double>();
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("candidate JSON: ") + e.what());
  }
  return out;
}

}  // namespace mion
