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

// Shared pieces of the filter implementations. Not installed.

#ifndef MCCKF_SRC_FILTER_DETAIL_HPP
#define MCCKF_SRC_FILTER_DETAIL_HPP

#include <string>
#include <variant>

#include "mcckf/error.hpp"
#include "mcckf/filters.hpp"

namespace mcckf::detail {

struct Predicted {
  Vector x_pred;      // F x_{k-1|k-1}
  Vector innovation;  // y_k - H x_{k|k-1}
  Vector residual;    // x_{k|k-1} - F x_{k-1|k-1}
  double innovation_sq = 0.0;  // ||innovation||^2_{R^{-1}}
};

/// State prediction and the R-weighted innovation norm. The latter is the
/// same computation for every variant (through the Cholesky factor of R).
Predicted predict_state(const FilterState& state, const StepModel& model, const Vector& y);

template <class Rep>
const Rep& rep(const FilterState& state, const char* who) {
  const Rep* r = std::get_if<Rep>(&state.cov);
  if (r == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(who) + ": covariance representation does not match the filter");
  }
  return *r;
}

using StepImpl = StepResult (*)(const FilterState&, const StepModel&, const Vector&,
                                const KernelPolicy&);

/// Validates dimensions, runs impl, and converts numerical failures into a
/// diverged result.
StepResult guarded(const char* who, StepImpl impl, const FilterState& state,
                   const StepModel& model, const Vector& y, const KernelPolicy& policy);

/// a^{-1} rhs through a Cholesky factorization; throws kDecompositionFailure
/// when a is not numerically positive definite.
Matrix spd_solve(const Matrix& a, const Matrix& rhs, const char* what);

/// Elementwise 1/d, throwing kSingularFactor when an entry is below
/// kInverseGuard.
Vector guarded_reciprocal(const Vector& d, const char* what);

inline Matrix eye(Eigen::Index n) { return Matrix::Identity(n, n); }

}  // namespace mcckf::detail

#endif  // MCCKF_SRC_FILTER_DETAIL_HPP
