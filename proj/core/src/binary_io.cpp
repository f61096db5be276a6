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

#include "mion/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mion/errors.hpp"

namespace mion::io {

void Writer::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v & 0xff));
  u8(static_cast<std::uint8_t>(v >> 8));
}

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void Writer::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void Writer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path);
}

Reader Reader::from_file(const std::string& path) { return Reader(read_file(path)); }

void Reader::need(size_t n) const {
  if (bytes_.size() - pos_ < n) fail(ErrorCode::kFormat, "unexpected end of file");
}

void Reader::expect_magic(std::string_view m) {
  need(m.size());
  if (std::memcmp(bytes_.data() + pos_, m.data(), m.size()) != 0)
    fail(ErrorCode::kFormat, "bad magic, expected " + std::string(m));
  pos_ += m.size();
}

std::uint8_t Reader::u8() {
  need(1);
  return static_cast<std::uint8_t>(bytes_[pos_++]);
}

std::uint16_t Reader::u16() {
  const std::uint16_t lo = u8();
  const std::uint16_t hi = u8();
  return static_cast<std::uint16_t>(lo | (hi << 8));
}

std::uint32_t Reader::u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
  return v;
}

float Reader::f32() { return std::bit_cast<float>(u32()); }

std::string Reader::raw(size_t n) {
  need(n);
  std::string s(bytes_.data() + pos_, n);
  pos_ += n;
  return s;
}

void Reader::expect_end() const {
  if (!at_end()) fail(ErrorCode::kFormat, "trailing bytes after payload");
}

std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path);
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << contents;
}

}  // namespace mion::io
