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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mion {

enum class ErrorCode {
  kSingularSystem,
  kDegenerateCloud,
  kInvalidDims,
  kBehindCamera,
  kInvalidK,
  kEmptyPool,
  kDegenerateAxis,
  kOddDim,
  kShapeMismatch,
  kEmptyDataset,
  kTooFewCandidates,
  kEmptyList,
  kNoAdmissibleCandidate,
  kFormat,  // malformed or incompatible artifact file
  kIo,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes failure kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace mion
