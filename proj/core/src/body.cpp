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

#include "mion/body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "mion/errors.hpp"

namespace mion {

namespace {

struct JointSpec {
  const char* name;
  int parent;
  Vec3 offset;        // from parent, rest pose
  double bone_radius; // radius of the bone ending at this joint
  int mirror;
};

// Humanoid layout; parents always precede children.
constexpr int kHumanoidJoints = 16;
const JointSpec kHumanoid[kHumanoidJoints] = {
    {"pelvis", -1, {0, 0, 0}, 0.0, 0},
    {"chest", 0, {0, -0.30, 0}, 0.13, 1},
    {"neck", 1, {0, -0.22, 0}, 0.055, 2},
    {"head", 2, {0, -0.16, 0}, 0.05, 3},
    {"l_shoulder", 1, {0.18, -0.18, 0}, 0.065, 7},
    {"l_elbow", 4, {0.12, 0.24, 0.02}, 0.05, 8},
    {"l_wrist", 5, {0.10, 0.22, -0.03}, 0.04, 9},
    {"r_shoulder", 1, {-0.18, -0.18, 0}, 0.065, 4},
    {"r_elbow", 7, {-0.12, 0.24, 0.02}, 0.05, 5},
    {"r_wrist", 8, {-0.10, 0.22, -0.03}, 0.04, 6},
    {"l_hip", 0, {0.10, 0.05, 0}, 0.09, 13},
    {"l_knee", 10, {0.01, 0.43, -0.01}, 0.07, 14},
    {"l_ankle", 11, {0.01, 0.42, 0.02}, 0.05, 15},
    {"r_hip", 0, {-0.10, 0.05, 0}, 0.09, 10},
    {"r_knee", 13, {-0.01, 0.43, -0.01}, 0.07, 11},
    {"r_ankle", 14, {-0.01, 0.42, 0.02}, 0.05, 12},
};

// Regression priority; the first 14 entries follow the LSP joint order.
const int kRegressPriority[kHumanoidJoints] = {15, 14, 13, 10, 11, 12, 9, 8, 7, 4, 5, 6, 2, 3, 0, 1};

Vec3 mirror_x(Vec3 v) { return {-v.x, v.y, v.z}; }

struct Segment {
  int owner = 0;      // joint that rigidly carries this segment
  int end_joint = -1; // joint located at point b, or -1 for a tip
  int mirror_of = -1; // index of the segment this one mirrors
  Vec3 a, b;
  double radius = 0.05;
  bool central = false;
  int count = 3;      // vertices allocated
  // filled during meshing
  int first_vertex = 0;
  std::vector<int> start_ring, end_ring;  // global indices, rings at t = 0 / t = 1
};

Vec3 normalized(Vec3 v) { return (1.0 / norm(v)) * v; }

void frame_for(const Segment& s, Vec3& e1, Vec3& e2) {
  const Vec3 d = normalized(s.b - s.a);
  if (s.central) {
    e1 = {1, 0, 0};
  } else {
    Vec3 ref = std::abs(d.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    e1 = normalized(cross(d, ref));
  }
  e2 = cross(d, e1);
}

double point_segment_distance2(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  double t = dot(p - a, ab) / dot(ab, ab);
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 q = a + t * ab;
  return dot(p - q, p - q);
}

void add_face(std::vector<int>& faces, int a, int b, int c) {
  faces.push_back(a);
  faces.push_back(b);
  faces.push_back(c);
}

// Builds vertices/faces for one segment at global vertex offset `base`.
void mesh_segment(Segment& s, int base, std::vector<Vec3>& verts, std::vector<int>& faces) {
  s.first_vertex = base;
  Vec3 e1, e2;
  frame_for(s, e1, e2);
  const Vec3 d = normalized(s.b - s.a);
  const Vec3 mid = 0.5 * (s.a + s.b);
  const double r = s.radius;
  if (s.count == 3) {
    verts.push_back(s.a);
    verts.push_back(s.b);
    verts.push_back(mid + r * e1);
    add_face(faces, base, base + 1, base + 2);
    add_face(faces, base, base + 2, base + 1);
    return;
  }
  if (s.count == 4) {
    verts.push_back(s.a);
    verts.push_back(s.b);
    verts.push_back(mid + r * e1);
    verts.push_back(mid + r * e2);
    add_face(faces, base, base + 1, base + 2);
    add_face(faces, base, base + 3, base + 1);
    add_face(faces, base, base + 2, base + 3);
    add_face(faces, base + 1, base + 3, base + 2);
    return;
  }
  const int m = s.count - 2;
  int rings = std::max(1, static_cast<int>(std::lround(m / 6.0)));
  while (rings > 1 && m < 3 * rings) --rings;
  std::vector<int> sizes(rings, m / rings);
  for (int i = 0; i < m % rings; ++i) ++sizes[i];

  verts.push_back(s.a - 0.5 * r * d);  // start apex
  std::vector<std::vector<int>> ring_ids(rings);
  int next = base + 1;
  for (int k = 0; k < rings; ++k) {
    const double t = rings == 1 ? 1.0 : static_cast<double>(k) / (rings - 1);
    const Vec3 c = s.a + t * (s.b - s.a);
    for (int q = 0; q < sizes[k]; ++q) {
      const double phi = 0.5 * std::numbers::pi + 2.0 * std::numbers::pi * q / sizes[k];
      verts.push_back(c + r * (std::cos(phi) * e1 + std::sin(phi) * e2));
      ring_ids[k].push_back(next++);
    }
  }
  const int apex1 = next;
  verts.push_back(s.b + 0.5 * r * d);

  const auto& first = ring_ids.front();
  for (size_t q = 0; q < first.size(); ++q)
    add_face(faces, base, first[(q + 1) % first.size()], first[q]);
  for (int k = 0; k + 1 < rings; ++k) {
    const auto& ra = ring_ids[k];
    const auto& rb = ring_ids[k + 1];
    const int na = static_cast<int>(ra.size()), nb = static_cast<int>(rb.size());
    int i = 0, j = 0;
    while (i < na || j < nb) {
      const bool advance_a = j == nb || (i < na && static_cast<long>(i + 1) * nb <= static_cast<long>(j + 1) * na);
      if (advance_a) {
        add_face(faces, ra[i % na], ra[(i + 1) % na], rb[j % nb]);
        ++i;
      } else {
        add_face(faces, ra[i % na], rb[(j + 1) % nb], rb[j % nb]);
        ++j;
      }
    }
  }
  const auto& last = ring_ids.back();
  for (size_t q = 0; q < last.size(); ++q)
    add_face(faces, apex1, last[q], last[(q + 1) % last.size()]);

  if (rings >= 2) s.start_ring = ring_ids.front();
  s.end_ring = ring_ids.back();
}

}  // namespace

double BodyModel::rest_height() const {
  double lo = 1e300, hi = -1e300;
  for (int v = 0; v < num_vertices; ++v) {
    lo = std::min(lo, template_vertices[3 * v + 1]);
    hi = std::max(hi, template_vertices[3 * v + 1]);
  }
  return hi - lo;
}

std::vector<int> BodyModel::pelvis_indices() const {
  int l = -1, r = -1, pelvis = -1;
  for (int n = 0; n < num_regressed; ++n) {
    const std::string& name = joint_names[regressed_source[n]];
    if (name == "l_hip") l = n;
    if (name == "r_hip") r = n;
    if (name == "pelvis") pelvis = n;
  }
  if (l >= 0 && r >= 0) return {l, r};
  if (pelvis >= 0) return {pelvis};
  return {0};
}

void BodyModel::validate() const {
  const auto bad = [](const std::string& msg) { fail(ErrorCode::kInvalidDims, msg); };
  const size_t V = num_vertices, K = num_joints, S = num_betas, N = num_regressed;
  if (template_vertices.size() != V * 3) bad("template size");
  if (shape_basis.size() != V * 3 * S) bad("shape basis size");
  if (parents.size() != K || joint_rest.size() != K * 3) bad("kinematic tree size");
  if (skin_weights.size() != V * K) bad("skin weights size");
  if (joint_regressor.size() != N * V) bad("joint regressor size");
  if (faces.size() % 3 != 0) bad("faces size");
  if (K == 0 || parents[0] != -1) bad("joint 0 must be the root");
  for (size_t k = 1; k < K; ++k)
    if (parents[k] < 0 || parents[k] >= static_cast<int>(k)) bad("parents must precede children");
  for (size_t v = 0; v < V; ++v) {
    double sum = 0;
    for (size_t k = 0; k < K; ++k) {
      const double w = skin_weights[v * K + k];
      if (w < 0) bad("negative skin weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) bad("skin weights must sum to 1");
  }
  for (int f : faces)
    if (f < 0 || static_cast<size_t>(f) >= V) bad("face index out of range");
  for (size_t n = 0; n < N; ++n) {
    double sum = 0;
    for (size_t v = 0; v < V; ++v) sum += joint_regressor[n * V + v];
    if (std::abs(sum - 1.0) > 1e-6) bad("regressor rows must sum to 1");
  }
  if (joint_names.size() != K || joint_mirror.size() != K) bad("joint metadata size");
  if (regressed_source.size() != N || regressed_mirror.size() != N) bad("regressed metadata size");
}

PoseParams PoseParams::zero(int num_joints) {
  PoseParams p;
  p.joints.assign(std::max(0, num_joints - 1), AxisAngle{});
  return p;
}

std::vector<double> PoseParams::flat() const {
  std::vector<double> out;
  out.reserve(3 * (joints.size() + 1));
  for (int d = 0; d < 3; ++d) out.push_back(global_orient.v[d]);
  for (const auto& j : joints)
    for (int d = 0; d < 3; ++d) out.push_back(j.v[d]);
  return out;
}

PoseParams PoseParams::from_flat(const std::vector<double>& v) {
  if (v.size() % 3 != 0 || v.size() < 3) fail(ErrorCode::kInvalidDims, "pose vector length must be 3K");
  PoseParams p;
  p.global_orient.v = {v[0], v[1], v[2]};
  for (size_t i = 3; i < v.size(); i += 3) p.joints.push_back(AxisAngle{{v[i], v[i + 1], v[i + 2]}});
  return p;
}

std::vector<double> PoseParams::joints_flat() const {
  std::vector<double> out;
  out.reserve(3 * joints.size());
  for (const auto& j : joints)
    for (int d = 0; d < 3; ++d) out.push_back(j.v[d]);
  return out;
}

BodyModel make_toy_model(std::uint64_t seed, int V, int K, int S, int N) {
  if (K < 4 || V < 3 * K || N < 1 || N > K || S < 0)
    fail(ErrorCode::kInvalidDims, "toy model requires V >= 3K, K >= 4, 1 <= N <= K, S >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BodyModel m;
  m.num_vertices = V;
  m.num_joints = K;
  m.num_betas = S;
  m.num_regressed = N;

  // Skeleton.
  std::vector<Vec3> offset(K);
  std::vector<double> radius(K, 0.04);
  m.parents.resize(K);
  m.joint_names.resize(K);
  m.joint_mirror.resize(K);
  std::vector<double> scale(K, 1.0), rscale(K, 1.0);
  for (int k = 0; k < std::min(K, kHumanoidJoints); ++k) {
    const JointSpec& js = kHumanoid[k];
    m.parents[k] = js.parent;
    m.joint_names[k] = js.name;
    offset[k] = js.offset;
    radius[k] = js.bone_radius;
    m.joint_mirror[k] = js.mirror < K ? js.mirror : k;
    if (m.joint_mirror[k] < k) {
      scale[k] = scale[m.joint_mirror[k]];
      rscale[k] = rscale[m.joint_mirror[k]];
    } else {
      scale[k] = 0.95 + 0.1 * unit(rng);
      rscale[k] = 0.9 + 0.2 * unit(rng);
    }
  }
  for (int k = kHumanoidJoints; k < K; ++k) {
    // Extend a current leaf.
    std::vector<int> leaves;
    for (int j = 0; j < k; ++j)
      if (std::find(m.parents.begin(), m.parents.begin() + k, j) == m.parents.begin() + k) leaves.push_back(j);
    const int p = leaves[static_cast<size_t>(unit(rng) * leaves.size()) % leaves.size()];
    const Vec3 dir = p == 0 ? Vec3{0, 1, 0} : normalized(offset[p]);
    m.parents[k] = p;
    m.joint_names[k] = "extra_" + std::to_string(k);
    offset[k] = (0.06 + 0.04 * unit(rng)) * dir;
    radius[k] = 0.03;
    m.joint_mirror[k] = k;
  }
  std::vector<Vec3> pos(K);
  for (int k = 0; k < K; ++k) {
    radius[k] *= rscale[k];
    pos[k] = m.parents[k] < 0 ? offset[k] : pos[m.parents[k]] + scale[k] * offset[k];
  }
  // Exact mirror symmetry regardless of rounding in the chains above.
  for (int k = 0; k < K; ++k)
    if (m.joint_mirror[k] < k) pos[k] = mirror_x(pos[m.joint_mirror[k]]);
  m.joint_rest.resize(3 * K);
  for (int k = 0; k < K; ++k)
    for (int d = 0; d < 3; ++d) m.joint_rest[3 * k + d] = pos[k][d];

  // Segments: one per bone plus a tip per leaf.
  std::vector<Segment> segs;
  std::vector<int> seg_of_joint(K, -1);  // bone segment ending at joint k
  for (int k = 1; k < K; ++k) {
    Segment s;
    s.owner = m.parents[k];
    s.end_joint = k;
    s.a = pos[m.parents[k]];
    s.b = pos[k];
    s.radius = radius[k];
    s.central = std::abs(s.a.x) < 1e-12 && std::abs(s.b.x) < 1e-12;
    seg_of_joint[k] = static_cast<int>(segs.size());
    if (m.joint_mirror[k] < k) s.mirror_of = seg_of_joint[m.joint_mirror[k]];
    segs.push_back(s);
  }
  std::vector<int> tip_of_joint(K, -1);
  std::vector<Segment> tips;
  for (int k = 1; k < K; ++k) {
    if (std::find(m.parents.begin(), m.parents.end(), k) != m.parents.end()) continue;
    Segment s;
    s.owner = k;
    s.a = pos[k];
    const std::string& name = m.joint_names[k];
    Vec3 dir = normalized(pos[k] - pos[m.parents[k]]);
    double len = 0.08, r = 0.035;
    if (name == "head") { len = 0.16; r = 0.095; }
    else if (name == "l_ankle" || name == "r_ankle") {
      dir = normalized(Vec3{name[0] == 'l' ? 0.05 : -0.05, 0.35, -1.0});
      len = 0.13; r = 0.04;
    } else if (name == "l_wrist" || name == "r_wrist") { len = 0.09; r = 0.035; }
    s.b = pos[k] + len * dir;
    s.radius = r * rscale[k];
    s.central = std::abs(s.a.x) < 1e-12 && std::abs(s.b.x) < 1e-12;
    tip_of_joint[k] = static_cast<int>(tips.size());
    if (m.joint_mirror[k] < k && tip_of_joint[m.joint_mirror[k]] >= 0)
      s.mirror_of = static_cast<int>(segs.size()) + tip_of_joint[m.joint_mirror[k]];
    tips.push_back(s);
  }
  if (V >= 3 * static_cast<int>(segs.size() + tips.size()))
    segs.insert(segs.end(), tips.begin(), tips.end());
  for (auto& s : segs)
    if (s.mirror_of >= 0) {
      const Segment& o = segs[s.mirror_of];
      s.a = mirror_x(o.a);
      s.b = mirror_x(o.b);
      s.radius = o.radius;
    }

  // Vertex budget: 3 each, remainder proportional to length * radius with
  // mirrored pairs kept equal.
  const int nseg = static_cast<int>(segs.size());
  int remaining = V - 3 * nseg;
  std::vector<double> weight(nseg);
  double wsum = 0;
  for (int i = 0; i < nseg; ++i) {
    weight[i] = norm(segs[i].b - segs[i].a) * segs[i].radius + 1e-6;
    wsum += weight[i];
  }
  std::vector<double> frac(nseg);
  int assigned = 0;
  for (int i = 0; i < nseg; ++i) {
    const int src = segs[i].mirror_of >= 0 ? segs[i].mirror_of : i;
    const double ideal = remaining * weight[src] / wsum;
    const int fl = static_cast<int>(std::floor(ideal));
    segs[i].count = 3 + fl;
    frac[i] = ideal - fl;
    assigned += fl;
  }
  int left = remaining - assigned;
  std::vector<int> order(nseg);
  for (int i = 0; i < nseg; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  std::vector<int> mirror_partner(nseg, -1);
  for (int i = 0; i < nseg; ++i)
    if (segs[i].mirror_of >= 0) {
      mirror_partner[i] = segs[i].mirror_of;
      mirror_partner[segs[i].mirror_of] = i;
    }
  std::vector<bool> bumped(nseg, false);
  for (int i : order) {
    if (left <= 0) break;
    if (bumped[i]) continue;
    const int partner = mirror_partner[i];
    if (partner >= 0) {
      if (left < 2) continue;
      ++segs[i].count;
      ++segs[partner].count;
      bumped[i] = bumped[partner] = true;
      left -= 2;
    } else {
      ++segs[i].count;
      bumped[i] = true;
      --left;
    }
  }
  for (int i = 0; left > 0; i = (i + 1) % nseg, --left) ++segs[i].count;
  // A pair may have diverged in the final top-up; fall back to an unmirrored build.
  for (auto& s : segs)
    if (s.mirror_of >= 0 && segs[s.mirror_of].count != s.count) s.mirror_of = -1;

  std::vector<Vec3> verts;
  verts.reserve(V);
  for (int i = 0; i < nseg; ++i) {
    Segment& s = segs[i];
    const int base = static_cast<int>(verts.size());
    if (s.mirror_of >= 0) {
      const Segment& o = segs[s.mirror_of];
      std::vector<int> local_faces;
      std::vector<Vec3> tmp;
      Segment copy = o;
      mesh_segment(copy, 0, tmp, local_faces);
      for (const Vec3& p : tmp) verts.push_back(mirror_x(p));
      for (size_t f = 0; f < local_faces.size(); f += 3)
        add_face(m.faces, base + local_faces[f], base + local_faces[f + 2], base + local_faces[f + 1]);
      s.first_vertex = base;
      for (int id : copy.start_ring) s.start_ring.push_back(base + id);
      for (int id : copy.end_ring) s.end_ring.push_back(base + id);
    } else {
      mesh_segment(s, base, verts, m.faces);
    }
  }

  m.template_vertices.resize(3 * V);
  for (int v = 0; v < V; ++v)
    for (int d = 0; d < 3; ++d) m.template_vertices[3 * v + d] = verts[v][d];

  // Skinning weights from distances to owner segments.
  std::vector<int> seg_of_vertex(V);
  for (int i = 0; i < nseg; ++i)
    for (int v = segs[i].first_vertex; v < segs[i].first_vertex + segs[i].count; ++v) seg_of_vertex[v] = i;
  m.skin_weights.assign(static_cast<size_t>(V) * K, 0.0);
  for (int v = 0; v < V; ++v) {
    const Segment& own = segs[seg_of_vertex[v]];
    const double sigma2 = (1.5 * own.radius) * (1.5 * own.radius);
    std::vector<double> d2(K, 1e300);
    for (const Segment& s : segs) d2[s.owner] = std::min(d2[s.owner], point_segment_distance2(verts[v], s.a, s.b));
    const double dmin = *std::min_element(d2.begin(), d2.end());
    std::vector<double> w(K, 0.0);
    double wmax = 0;
    for (int k = 0; k < K; ++k) {
      if (d2[k] >= 1e299) continue;
      w[k] = std::exp(-(d2[k] - dmin) / sigma2);
      wmax = std::max(wmax, w[k]);
    }
    double sum = 0;
    for (int k = 0; k < K; ++k) {
      if (w[k] < 1e-3 * wmax) w[k] = 0;
      sum += w[k];
    }
    for (int k = 0; k < K; ++k) m.skin_weights[static_cast<size_t>(v) * K + k] = w[k] / sum;
  }

  // Regressed joints.
  std::vector<int> priority;
  for (int k : kRegressPriority)
    if (k < K) priority.push_back(k);
  for (int k = kHumanoidJoints; k < K; ++k) priority.push_back(k);
  m.regressed_source.assign(priority.begin(), priority.begin() + N);
  m.regressed_mirror.resize(N);
  for (int n = 0; n < N; ++n) {
    const int mk = m.joint_mirror[m.regressed_source[n]];
    auto it = std::find(m.regressed_source.begin(), m.regressed_source.end(), mk);
    m.regressed_mirror[n] = it == m.regressed_source.end() ? n : static_cast<int>(it - m.regressed_source.begin());
  }
  m.joint_regressor.assign(static_cast<size_t>(N) * V, 0.0);
  for (int n = 0; n < N; ++n) {
    const int k = m.regressed_source[n];
    std::vector<int> ring;
    if (k > 0 && seg_of_joint[k] >= 0) ring = segs[seg_of_joint[k]].end_ring;
    if (k == 0)
      for (const Segment& s : segs)
        if (s.owner == 0 && !s.start_ring.empty()) {
          ring = s.start_ring;
          break;
        }
    if (ring.empty()) {
      std::vector<int> idx(V);
      for (int v = 0; v < V; ++v) idx[v] = v;
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return dot(verts[a] - pos[k], verts[a] - pos[k]) < dot(verts[b] - pos[k], verts[b] - pos[k]);
      });
      ring.assign(idx.begin(), idx.begin() + std::min(4, V));
    }
    for (int v : ring) m.joint_regressor[static_cast<size_t>(n) * V + v] = 1.0 / ring.size();
  }

  // Shape basis: global scale, girth, leg length, arm length, torso width,
  // then random mirror-symmetric smooth fields.
  m.shape_basis.assign(static_cast<size_t>(V) * 3 * S, 0.0);
  const auto axis_point = [&](int v) {
    const Segment& s = segs[seg_of_vertex[v]];
    const Vec3 ab = s.b - s.a;
    const double t = std::clamp(dot(verts[v] - s.a, ab) / dot(ab, ab), 0.0, 1.0);
    return s.a + t * ab;
  };
  const auto limb_root = [&](int v, const char* l, const char* r) -> int {
    int k = segs[seg_of_vertex[v]].owner;
    while (k >= 0) {
      if (m.joint_names[k] == l || m.joint_names[k] == r) return k;
      k = m.parents[k];
    }
    return -1;
  };
  for (int s = 0; s < S; ++s) {
    std::vector<double> amp(12), freq(36), phase(12);
    for (auto& a : amp) a = 0.012 * (2.0 * unit(rng) - 1.0);
    for (auto& f : freq) f = 6.0 * (2.0 * unit(rng) - 1.0);
    for (auto& p : phase) p = 2.0 * std::numbers::pi * unit(rng);
    const auto field = [&](Vec3 p) {
      Vec3 out;
      for (int q = 0; q < 12; ++q) {
        const double arg = freq[3 * q] * p.x + freq[3 * q + 1] * p.y + freq[3 * q + 2] * p.z + phase[q];
        out[q % 3] += amp[q] * std::sin(arg);
      }
      return out;
    };
    for (int v = 0; v < V; ++v) {
      const Vec3 p = verts[v];
      Vec3 disp;
      switch (s) {
        case 0: disp = 0.05 * (p - pos[0]); break;
        case 1: disp = 0.15 * (p - axis_point(v)); break;
        case 2: {
          const int hip = limb_root(v, "l_hip", "r_hip");
          if (hip >= 0) disp = {0, 0.06 * std::max(0.0, p.y - pos[hip].y), 0};
          break;
        }
        case 3: {
          const int sh = limb_root(v, "l_shoulder", "r_shoulder");
          if (sh >= 0) disp = 0.08 * (p - pos[sh]);
          break;
        }
        case 4: disp = {0.08 * p.x, 0, 0}; break;
        default: {
          // Symmetrized random field: (f(p) + M f(M p)) / 2.
          const Vec3 f1 = field(p);
          const Vec3 f2 = mirror_x(field(mirror_x(p)));
          disp = 0.5 * (f1 + f2);
        }
      }
      for (int d = 0; d < 3; ++d) m.shape_basis[(static_cast<size_t>(v) * 3 + d) * S + s] = disp[d];
    }
  }

  m.validate();
  return m;
}

std::vector<Vec3> shaped_vertices(const BodyModel& model, const ShapeParams& shape) {
  const int V = model.num_vertices, S = model.num_betas;
  if (static_cast<int>(shape.beta.size()) != S) fail(ErrorCode::kInvalidDims, "beta length mismatch");
  std::vector<Vec3> out(V);
  for (int v = 0; v < V; ++v) {
    for (int d = 0; d < 3; ++d) {
      double x = model.template_vertices[3 * v + d];
      const double* row = &model.shape_basis[(static_cast<size_t>(v) * 3 + d) * S];
      for (int s = 0; s < S; ++s) x += row[s] * shape.beta[s];
      out[v][d] = x;
    }
  }
  return out;
}

JointTransforms joint_transforms(const BodyModel& model, const PoseParams& pose) {
  const int K = model.num_joints;
  if (static_cast<int>(pose.joints.size()) != K - 1) fail(ErrorCode::kInvalidDims, "pose joint count mismatch");
  JointTransforms g;
  g.r.resize(K);
  g.t.resize(K);
  for (int k = 0; k < K; ++k) {
    const Mat3 rk = rodrigues(k == 0 ? pose.global_orient : pose.joints[k - 1]);
    const Vec3 jk = model.rest_joint(k);
    const int p = model.parents[k];
    if (p < 0) {
      g.r[k] = rk;
      g.t[k] = jk - rk * jk;
    } else {
      g.r[k] = g.r[p] * rk;
      g.t[k] = g.r[p] * (jk - rk * jk) + g.t[p];
    }
  }
  return g;
}

Mesh forward(const BodyModel& model, const PoseParams& pose, const ShapeParams& shape) {
  const std::vector<Vec3> rest = shaped_vertices(model, shape);
  const JointTransforms g = joint_transforms(model, pose);
  const int V = model.num_vertices, K = model.num_joints;
  // Skinning as an offset from the rest vertex so identity transforms are exact.
  std::vector<Mat3> dr(K);
  for (int k = 0; k < K; ++k) dr[k] = g.r[k] + (-1.0) * Mat3::identity();
  Mesh mesh;
  mesh.vertices.resize(V);
  for (int v = 0; v < V; ++v) {
    Vec3 acc;
    const double* w = &model.skin_weights[static_cast<size_t>(v) * K];
    for (int k = 0; k < K; ++k) {
      if (w[k] == 0.0) continue;
      acc += w[k] * (dr[k] * rest[v] + g.t[k]);
    }
    mesh.vertices[v] = rest[v] + acc;
  }
  return mesh;
}

std::vector<Vec3> regress_joints(const BodyModel& model, const Mesh& mesh) {
  const int N = model.num_regressed, V = model.num_vertices;
  if (static_cast<int>(mesh.vertices.size()) != V) fail(ErrorCode::kInvalidDims, "mesh vertex count mismatch");
  std::vector<Vec3> out(N);
  for (int n = 0; n < N; ++n) {
    const double* row = &model.joint_regressor[static_cast<size_t>(n) * V];
    Vec3 acc;
    for (int v = 0; v < V; ++v)
      if (row[v] != 0.0) acc += row[v] * mesh.vertices[v];
    out[n] = acc;
  }
  return out;
}

PoseParams mirror_pose(const BodyModel& model, const PoseParams& pose) {
  const auto mv = [](AxisAngle a) { return AxisAngle{{a.v.x, -a.v.y, -a.v.z}}; };
  PoseParams out;
  out.global_orient = mv(pose.global_orient);
  out.joints.resize(pose.joints.size());
  for (size_t j = 0; j < pose.joints.size(); ++j) {
    const int k = static_cast<int>(j) + 1;
    out.joints[j] = mv(pose.joints[model.joint_mirror[k] - 1]);
  }
  return out;
}

std::string body_to_json(const BodyModel& m) {
  nlohmann::json j;
  j["format"] = "mion-body/1";
  j["num_vertices"] = m.num_vertices;
  j["num_joints"] = m.num_joints;
  j["num_betas"] = m.num_betas;
  j["num_regressed"] = m.num_regressed;
  j["template"] = m.template_vertices;
  j["shape_basis"] = m.shape_basis;
  j["parents"] = m.parents;
  j["joint_rest"] = m.joint_rest;
  j["skin_weights"] = m.skin_weights;
  j["faces"] = m.faces;
  j["joint_regressor"] = m.joint_regressor;
  j["joint_names"] = m.joint_names;
  j["joint_mirror"] = m.joint_mirror;
  j["regressed_source"] = m.regressed_source;
  j["regressed_mirror"] = m.regressed_mirror;
  return j.dump();
}

BodyModel body_from_json(const std::string& text) {
  BodyModel m;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "mion-body/1") fail(ErrorCode::kFormat, "body model format tag must be mion-body/1");
    m.num_vertices = j.at("num_vertices").get<int>();
    m.num_joints = j.at("num_joints").get<int>();
    m.num_betas = j.at("num_betas").get<int>();
    m.num_regressed = j.at("num_regressed").get<int>();
    m.template_vertices = j.at("template").get<std::vector<double>>();
    m.shape_basis = j.at("shape_basis").get<std::vector<double>>();
    m.parents = j.at("parents").get<std::vector<int>>();
    m.joint_rest = j.at("joint_rest").get<std::vector<double>>();
    m.skin_weights = j.at("skin_weights").get<std::vector<double>>();
    m.faces = j.at("faces").get<std::vector<int>>();
    m.joint_regressor = j.at("joint_regressor").get<std::vector<double>>();
    m.joint_names = j.at("joint_names").get<std::vector<std::string>>();
    m.joint_mirror = j.at("joint_mirror").get<std::vector<int>>();
    m.regressed_source = j.at("regressed_source").get<std::vector<int>>();
    m.regressed_mirror = j.at("regressed_mirror").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("body model JSON: ") + e.what());
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, e.what());
  }
  return m;
}

void save_body(const BodyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << body_to_json(model);
}

BodyModel load_body(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return body_from_json(ss.str());
}

}  // namespace mion
