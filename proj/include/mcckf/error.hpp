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

#ifndef MCCKF_ERROR_HPP
#define MCCKF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mcckf {

/// Failure categories. The numeric values are part of the C API (see mcckf.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kInvalidWeight = 2,
  kDecompositionFailure = 3,
  kSingularFactor = 4,
  kDomain = 5,
  kWeighting = 6,
  kConfiguration = 7,
  kInsufficientData = 8,
  kEmptyResult = 9,
  kIo = 10,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

  /// True for failures that signal loss of definiteness or singularity inside
  /// a filter recursion. Filters turn these into a divergence flag.
  bool numerical() const noexcept {
    return code_ == ErrorCode::kInvalidWeight || code_ == ErrorCode::kDecompositionFailure ||
           code_ == ErrorCode::kSingularFactor || code_ == ErrorCode::kDomain ||
           code_ == ErrorCode::kWeighting;
  }

 private:
  ErrorCode code_;
};

/// Thrown by ud_decompose / cholesky_upper; carries the failing pivot.
class DecompositionError : public Error {
 public:
  DecompositionError(const std::string& what, long pivot)
      : Error(ErrorCode::kDecompositionFailure, what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

}  // namespace mcckf

#endif  // MCCKF_ERROR_HPP
