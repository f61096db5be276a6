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

#include "mion/errors.hpp"

namespace mion {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kDegenerateCloud: return "DegenerateCloud";
    case ErrorCode::kInvalidDims: return "InvalidDims";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kDegenerateAxis: return "DegenerateAxis";
    case ErrorCode::kOddDim: return "OddDim";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kTooFewCandidates: return "TooFewCandidates";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kNoAdmissibleCandidate: return "NoAdmissibleCandidate";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mion
