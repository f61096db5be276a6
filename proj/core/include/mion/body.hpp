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

// A small SMPL-like articulated linear body model: template mesh, linear
// shape blendshapes, a kinematic tree with linear blend skinning, and a
// linear joint regressor. Coordinates are meters with +y pointing down and
// the rest body facing -z (towards a camera at the origin).

#include <cstdint>
#include <string>
#include <vector>

#include "mion/geometry.hpp"

namespace mion {

struct BodyModel {
  int num_vertices = 0;   // V
  int num_joints = 0;     // K
  int num_betas = 0;      // S
  int num_regressed = 0;  // N

  std::vector<double> template_vertices;  // V x 3
  std::vector<double> shape_basis;        // (V*3) x S, index (v*3 + d)*S + s
  std::vector<int> parents;               // K, root = -1
  std::vector<double> joint_rest;         // K x 3
  std::vector<double> skin_weights;       // V x K
  std::vector<int> faces;                 // F x 3
  std::vector<double> joint_regressor;    // N x V

  std::vector<std::string> joint_names;   // K
  std::vector<int> joint_mirror;          // K, left/right counterpart (self when central)
  std::vector<int> regressed_source;      // N, kinematic joint each regressed joint tracks
  std::vector<int> regressed_mirror;      // N

  int num_faces() const { return static_cast<int>(faces.size() / 3); }
  Vec3 vertex(int v) const { return {template_vertices[3 * v], template_vertices[3 * v + 1], template_vertices[3 * v + 2]}; }
  Vec3 rest_joint(int k) const { return {joint_rest[3 * k], joint_rest[3 * k + 1], joint_rest[3 * k + 2]}; }
  Vec3 root() const { return rest_joint(0); }

  /// Extent of the rest template along y (head top to sole).
  double rest_height() const;

  /// Indices of the regressed joints used as the alignment root (hip pair
  /// for the 14-joint layout, otherwise the first regressed joint).
  std::vector<int> pelvis_indices() const;

  /// Throws InvalidDims if any structural invariant is violated.
  void validate() const;
};

struct PoseParams {
  AxisAngle global_orient;
  std::vector<AxisAngle> joints;  // K - 1

  static PoseParams zero(int num_joints);

  /// Flattened [global_orient, joints...] of length 3K.
  std::vector<double> flat() const;
  static PoseParams from_flat(const std::vector<double>& v);

  /// Flattened joints only, length 3(K-1).
  std::vector<double> joints_flat() const;
};

struct ShapeParams {
  std::vector<double> beta;  // S
};

struct Mesh {
  std::vector<Vec3> vertices;
};

/// Deterministic toy model. Preconditions: V >= 3K, K >= 4, N <= K, S >= 0.
BodyModel make_toy_model(std::uint64_t seed, int num_vertices = 432, int num_joints = 16,
                         int num_betas = 8, int num_regressed = 14);

/// Shaped template (template + basis * beta), no pose applied.
std::vector<Vec3> shaped_vertices(const BodyModel& model, const ShapeParams& shape);

/// Per-joint world transforms x -> r[k] x + t[k] for a pose.
struct JointTransforms {
  std::vector<Mat3> r;
  std::vector<Vec3> t;
};
JointTransforms joint_transforms(const BodyModel& model, const PoseParams& pose);

/// Linear blend skinning of the shaped template.
Mesh forward(const BodyModel& model, const PoseParams& pose, const ShapeParams& shape);

/// J = joint_regressor * vertices.
std::vector<Vec3> regress_joints(const BodyModel& model, const Mesh& mesh);

/// Mirror across the x = 0 plane with left/right joints swapped.
PoseParams mirror_pose(const BodyModel& model, const PoseParams& pose);

/// JSON document tagged "format": "mion-body/1".
std::string body_to_json(const BodyModel& model);
BodyModel body_from_json(const std::string& text);
void save_body(const BodyModel& model, const std::string& path);
BodyModel load_body(const std::string& path);

}  // namespace mion
