// Copyright 2026 The mcckf Authors.
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

#include "mcckf/error.hpp"

namespace mcckf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidWeight: return "invalid weight";
    case ErrorCode::kDecompositionFailure: return "decomposition failure";
    case ErrorCode::kSingularFactor: return "singular factor";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kWeighting: return "weighting error";
    case ErrorCode::kConfiguration: return "configuration error";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kEmptyResult: return "empty result";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace mcckf
