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

#include "mion/nn/checkpoint.hpp"

#include "mion/binary_io.hpp"
#include "mion/errors.hpp"

namespace mion::nn {

namespace {

io::Writer write(const ParamStore<float>& store) {
  io::Writer w;
  w.magic("MIONCKPT");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(store.params().size()));
  for (auto& p : store.params()) {
    w.u16(static_cast<std::uint16_t>(p->name.size()));
    w.raw(p->name);
    w.u8(static_cast<std::uint8_t>(p->shape.size()));
    for (int d : p->shape) w.u32(static_cast<std::uint32_t>(d));
    for (float v : p->value) w.f32(v);
  }
  return w;
}

}  // namespace

std::vector<char> checkpoint_bytes(const ParamStore<float>& store) { return write(store).bytes(); }

void save_checkpoint(const ParamStore<float>& store, const std::string& path) { write(store).save(path); }

void load_checkpoint_bytes(ParamStore<float>& store, std::vector<char> bytes) {
  io::Reader r(std::move(bytes));
  r.expect_magic("MIONCKPT");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) fail(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  if (count != store.params().size())
    fail(ErrorCode::kFormat, "checkpoint holds " + std::to_string(count) + " tensors, model expects " +
                                 std::to_string(store.params().size()));
  for (auto& p : store.params()) {
    const std::string name = r.raw(r.u16());
    if (name != p->name) fail(ErrorCode::kFormat, "checkpoint tensor '" + name + "' where '" + p->name + "' expected");
    const int rank = r.u8();
    Shape shape(rank);
    for (int& d : shape) d = static_cast<int>(r.u32());
    if (shape != p->shape)
      fail(ErrorCode::kFormat, "shape mismatch for " + name + ": " + shape_str(shape) + " vs " + shape_str(p->shape));
    for (float& v : p->value) v = r.f32();
  }
  r.expect_end();
}

void load_checkpoint(ParamStore<float>& store, const std::string& path) {
  load_checkpoint_bytes(store, io::read_file(path));
}

}  // namespace mion::nn
