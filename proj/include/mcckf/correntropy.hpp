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

// Gaussian-kernel correntropy: the scalar lambda_k that scales the gain and
// covariance update of the maximum-correntropy filters, and the kernel-size
// policies feeding it.

#ifndef MCCKF_CORRENTROPY_HPP
#define MCCKF_CORRENTROPY_HPP

#include "mcckf/matfact.hpp"

namespace mcckf {

/// Lower clamp on lambda. The Gaussian kernel underflows to exactly zero for
/// large outliers; a strictly positive lambda keeps lambda^{1/2} pre-array
/// rows finite.
inline constexpr double kDefaultLambdaMin = 1e-12;

struct KernelPolicy {
  enum class Mode { kFixed, kAdaptive };

  Mode mode = Mode::kFixed;
  double sigma_fixed = 10.0;
  /// Adaptive mode: sigma_k = max(sigma_floor, ||innovation||_{R^{-1}}).
  double sigma_floor = 1e-6;
  double lambda_min = kDefaultLambdaMin;

  static KernelPolicy fixed(double sigma) {
    KernelPolicy p;
    p.sigma_fixed = sigma;
    return p;
  }
  static KernelPolicy adaptive(double floor = 1e-6) {
    KernelPolicy p;
    p.mode = Mode::kAdaptive;
    p.sigma_floor = floor;
    return p;
  }

  /// Throws kInvalidArgument unless sigma_fixed > 0, sigma_floor > 0 and
  /// lambda_min >= 0.
  void validate() const;

  /// Kernel size for a step whose innovation has the given weighted squared
  /// norm.
  double resolve_sigma(double innovation_sq) const;
};

/// exp(-arg_sq / (2 sigma^2)). Throws kDomain on negative arg_sq.
double gaussian_kernel(double arg_sq, double sigma);

struct LambdaInputs {
  Vector innovation;          // y_k - H x_{k|k-1}
  Matrix r_weight;            // R_k, the norm uses R_k^{-1}
  Vector predicted_residual;  // x_{k|k-1} - F x_{k-1|k-1}
  Matrix p_pred_weight;       // P_{k|k-1}, the norm uses P_{k|k-1}^{-1}
};

struct LambdaValue {
  double lambda = 1.0;
  double sigma = 0.0;
};

/// Ratio of the kernel of the innovation to the kernel of the prediction
/// residual, floored at policy.lambda_min. Both weighted norms go through a
/// Cholesky solve of the weight; a weight that is not positive definite
/// throws kWeighting.
LambdaValue lambda(const LambdaInputs& inputs, const KernelPolicy& policy);

/// Same ratio from precomputed weighted squared norms. Filters call this with
/// norms evaluated through their own covariance factors.
LambdaValue lambda_from_norms(double innovation_sq, double residual_sq, const KernelPolicy& policy);

/// ||x||^2_{A^{-1}} through a Cholesky solve of A. Throws kWeighting.
double weighted_norm_sq(const Vector& x, const Matrix& a);

}  // namespace mcckf

#endif  // MCCKF_CORRENTROPY_HPP
