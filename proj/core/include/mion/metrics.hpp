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

#include <span>
#include <vector>

#include "mion/geometry.hpp"

namespace mion {

/// Mean joint distance after translating both clouds so that the mean of
/// `root` joints is at the origin. An empty root list means joint 0.
double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt, std::span<const int> root = {});

/// mpjpe after the Procrustes similarity alignment of pred onto gt.
double pa_mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt);

}  // namespace mion
