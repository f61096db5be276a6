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

// Little-endian binary helpers shared by the artifact formats.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mion::io {

class Writer {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void f32(float v);
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  const std::vector<char>& bytes() const { return bytes_; }
  void save(const std::string& path) const;

 private:
  std::vector<char> bytes_;
};

/// Bounds-checked reader; any overrun or bad magic throws a Format error.
class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
  static Reader from_file(const std::string& path);

  void expect_magic(std::string_view m);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  float f32();
  std::string raw(size_t n);

  bool at_end() const { return pos_ == bytes_.size(); }
  void expect_end() const;

 private:
  void need(size_t n) const;
  std::vector<char> bytes_;
  size_t pos_ = 0;
};

std::vector<char> read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace mion::io
