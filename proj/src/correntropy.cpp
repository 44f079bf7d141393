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

#include "mcckf/correntropy.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include "mcckf/error.hpp"

namespace mcckf {

void KernelPolicy::validate() const {
  if (mode == Mode::kFixed && !(sigma_fixed > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel: sigma must be positive");
  }
  if (!(sigma_floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kernel: sigma_floor must be positive");
  if (!(lambda_min >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "kernel: lambda_min must be >= 0");
}

double KernelPolicy::resolve_sigma(double innovation_sq) const {
  if (mode == Mode::kFixed) return sigma_fixed;
  return std::max(sigma_floor, std::sqrt(innovation_sq));
}

double gaussian_kernel(double arg_sq, double sigma) {
  if (arg_sq < 0.0) throw Error(ErrorCode::kDomain, "gaussian_kernel: negative squared norm");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kDomain, "gaussian_kernel: sigma must be positive");
  return std::exp(-arg_sq / (2.0 * sigma * sigma));
}

double weighted_norm_sq(const Vector& x, const Matrix& a) {
  if (a.rows() != x.size() || a.cols() != x.size()) {
    throw Error(ErrorCode::kInvalidArgument, "weighted_norm_sq: dimension mismatch");
  }
  if (x.isZero(0.0)) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kWeighting, "weighted norm: weight matrix is not positive definite");
  }
  return llt.matrixL().solve(x).squaredNorm();
}

LambdaValue lambda_from_norms(double innovation_sq, double residual_sq, const KernelPolicy& policy) {
  if (!(innovation_sq >= 0.0) || !(residual_sq >= 0.0)) {
    throw Error(ErrorCode::kDomain, "lambda: weighted norms must be finite and nonnegative");
  }
  const double sigma = policy.resolve_sigma(innovation_sq);
  // The ratio of the two kernels in one exponent: the denominator kernel can
  // underflow on its own.
  const double two_sigma_sq = 2.0 * sigma * sigma;
  const double value = std::exp(-(innovation_sq - residual_sq) / two_sigma_sq);
  return LambdaValue{std::max(value, policy.lambda_min), sigma};
}

LambdaValue lambda(const LambdaInputs& inputs, const KernelPolicy& policy) {
  policy.validate();
  const double innov = weighted_norm_sq(inputs.innovation, inputs.r_weight);
  const double resid = weighted_norm_sq(inputs.predicted_residual, inputs.p_pred_weight);
  return lambda_from_norms(innov, resid, policy);
}

}  // namespace mcckf
