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

#include "mion/body.hpp"
#include "mion/errors.hpp"

namespace mion {
namespace {

const BodyModel& model() {
  static const BodyModel m = make_toy_model(7);
  return m;
}

ShapeParams zero_shape() { return {std::vector<double>(model().num_betas, 0.0)}; }

PoseParams random_pose(std::mt19937_64& rng, double scale = 0.4) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PoseParams p = PoseParams::zero(model().num_joints);
  p.global_orient.v = {u(rng), u(rng), u(rng)};
  for (auto& j : p.joints) j.v = {u(rng), u(rng), u(rng)};
  return p;
}

double max_vertex_diff(const Mesh& a, const Mesh& b) {
  double d = 0;
  for (size_t i = 0; i < a.vertices.size(); ++i) d = std::max(d, norm(a.vertices[i] - b.vertices[i]));
  return d;
}

TEST(ToyModel, PassesInvariantsWithDefaultSizes) {
  const BodyModel& m = model();
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.num_vertices, 432);
  EXPECT_EQ(m.num_joints, 16);
  EXPECT_EQ(m.num_betas, 8);
  EXPECT_EQ(m.num_regressed, 14);
  for (int k = 1; k < m.num_joints; ++k) EXPECT_LT(m.parents[k], k);
  for (int v = 0; v < m.num_vertices; ++v) {
    double s = 0;
    for (int k = 0; k < m.num_joints; ++k) s += m.skin_weights[v * m.num_joints + k];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(ToyModel, SameSeedSameBytes) { EXPECT_EQ(body_to_json(make_toy_model(7)), body_to_json(make_toy_model(7))); }

TEST(ToyModel, JsonRoundTrip) {
  const BodyModel back = body_from_json(body_to_json(model()));
  EXPECT_EQ(body_to_json(back), body_to_json(model()));
}

TEST(ToyModel, MalformedJsonIsFormatError) {
  try {
    body_from_json("{\"num_vertices\": 3}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST(Forward, RestPoseIsTemplate) {
  const Mesh m = forward(model(), PoseParams::zero(model().num_joints), zero_shape());
  for (int v = 0; v < model().num_vertices; ++v) EXPECT_EQ(m.vertices[v], model().vertex(v));
}

TEST(Forward, UnitBetaAddsBasisColumn) {
  for (int s = 0; s < model().num_betas; ++s) {
    ShapeParams beta = zero_shape();
    beta.beta[s] = 1.0;
    const Mesh m = forward(model(), PoseParams::zero(model().num_joints), beta);
    for (int v = 0; v < model().num_vertices; ++v) {
      Vec3 expect = model().vertex(v);
      for (int d = 0; d < 3; ++d) expect[d] += model().shape_basis[(v * 3 + d) * model().num_betas + s];
      EXPECT_LT(norm(m.vertices[v] - expect), 1e-12);
    }
  }
}

TEST(Forward, GlobalOrientRotatesAboutRoot) {
  std::mt19937_64 rng(1);
  PoseParams p = PoseParams::zero(model().num_joints);
  p.global_orient.v = {0.3, -1.1, 0.6};
  const Mat3 r = rodrigues(p.global_orient);
  const Mesh m = forward(model(), p, zero_shape());
  const Vec3 root = model().root();
  for (int v = 0; v < model().num_vertices; ++v)
    EXPECT_LT(norm(m.vertices[v] - (r * (model().vertex(v) - root) + root)), 1e-9);
}

TEST(Forward, RigidEquivariance) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const PoseParams p = random_pose(rng);
    const Mat3 q = rodrigues({{0.4, 0.9 - 0.1 * trial, -0.2}});
    PoseParams rotated = p;
    rotated.global_orient = log_map(q * rodrigues(p.global_orient));
    const Mesh a = forward(model(), p, zero_shape());
    const Mesh b = forward(model(), rotated, zero_shape());
    const Vec3 root = model().root();
    for (int v = 0; v < model().num_vertices; ++v)
      EXPECT_LT(norm(b.vertices[v] - (q * (a.vertices[v] - root) + root)), 1e-9);
  }
}

TEST(Forward, LinearInShapeAtRest) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  ShapeParams b1 = zero_shape(), b2 = zero_shape(), b12 = zero_shape();
  for (int s = 0; s < model().num_betas; ++s) {
    b1.beta[s] = g(rng);
    b2.beta[s] = g(rng);
    b12.beta[s] = b1.beta[s] + b2.beta[s];
  }
  const PoseParams rest = PoseParams::zero(model().num_joints);
  const Mesh m12 = forward(model(), rest, b12), m1 = forward(model(), rest, b1), m2 = forward(model(), rest, b2),
             m0 = forward(model(), rest, zero_shape());
  for (int v = 0; v < model().num_vertices; ++v)
    EXPECT_LT(norm(m12.vertices[v] - m1.vertices[v] - m2.vertices[v] + m0.vertices[v]), 1e-9);
}

TEST(RegressJoints, OneHotAndUniformRows) {
  BodyModel m = model();
  std::fill(m.joint_regressor.begin(), m.joint_regressor.end(), 0.0);
  m.joint_regressor[0 * m.num_vertices + 17] = 1.0;
  for (int v = 0; v < m.num_vertices; ++v) m.joint_regressor[1 * m.num_vertices + v] = 1.0 / m.num_vertices;
  std::mt19937_64 rng(4);
  const Mesh mesh = forward(m, random_pose(rng), zero_shape());
  const auto j = regress_joints(m, mesh);
  EXPECT_LT(norm(j[0] - mesh.vertices[17]), 1e-12);
  Vec3 c;
  for (const auto& v : mesh.vertices) c += v;
  EXPECT_LT(norm(j[1] - (1.0 / m.num_vertices) * c), 1e-12);
}

TEST(RegressJoints, RestMeshNearRestJoints) {
  const auto j = regress_joints(model(), forward(model(), PoseParams::zero(model().num_joints), zero_shape()));
  for (int n = 0; n < model().num_regressed; ++n)
    EXPECT_LT(norm(j[n] - model().rest_joint(model().regressed_source[n])), 1e-3) << "joint " << n;
}

TEST(RegressJoints, CommutesWithAffineMaps) {
  std::mt19937_64 rng(5);
  const Mesh mesh = forward(model(), random_pose(rng), zero_shape());
  const Mat3 a{{1.2, 0.1, -0.3, 0.0, 0.8, 0.2, 0.4, -0.1, 1.1}};
  const Vec3 t{0.5, -2, 3};
  Mesh mapped = mesh;
  for (auto& v : mapped.vertices) v = a * v + t;
  const auto j = regress_joints(model(), mesh), jm = regress_joints(model(), mapped);
  for (int n = 0; n < model().num_regressed; ++n) EXPECT_LT(norm(jm[n] - (a * j[n] + t)), 1e-9);
}

TEST(MirrorPose, IsInvolution) {
  std::mt19937_64 rng(6);
  const PoseParams p = random_pose(rng);
  const PoseParams back = mirror_pose(model(), mirror_pose(model(), p));
  const auto a = p.flat(), b = back.flat();
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(MirrorPose, MirrorsRegressedJoints) {
  std::mt19937_64 rng(7);
  const PoseParams p = random_pose(rng);
  const auto j = regress_joints(model(), forward(model(), p, zero_shape()));
  const auto jm = regress_joints(model(), forward(model(), mirror_pose(model(), p), zero_shape()));
  for (int n = 0; n < model().num_regressed; ++n) {
    const Vec3 src = j[model().regressed_mirror[n]];
    EXPECT_LT(norm(jm[n] - Vec3{-src.x, src.y, src.z}), 1e-6) << "joint " << n;
  }
}

}  // namespace
}  // namespace mion
