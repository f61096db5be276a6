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

// Checkpoint: "MIONCKPT", u32 version, u32 count, then per tensor
// u16 name length, name, u8 rank, u32 dims[rank], f32 data.

#include <string>
#include <vector>

#include "mion/nn/tensor.hpp"

namespace mion::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<char> checkpoint_bytes(const ParamStore<float>& store);
void save_checkpoint(const ParamStore<float>& store, const std::string& path);

/// Loads values into an already-constructed store. Names, order and shapes
/// must match exactly; anything else is a Format error.
void load_checkpoint(ParamStore<float>& store, const std::string& path);
void load_checkpoint_bytes(ParamStore<float>& store, std::vector<char> bytes);

}  // namespace mion::nn
