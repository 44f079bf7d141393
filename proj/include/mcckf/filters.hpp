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

// Maximum-correntropy Kalman filters (MCC-KF and the improved IMCC-KF) in
// conventional and factored (Cholesky, UD, SVD) array forms.
//
// Every variant shares one step signature: a time update followed by a
// measurement update for a single instant. Each variant owns one covariance
// representation, fixed at initialization; the recursion never converts
// between representations.

#ifndef MCCKF_FILTERS_HPP
#define MCCKF_FILTERS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "mcckf/correntropy.hpp"
#include "mcckf/matfact.hpp"

namespace mcckf {

enum class FilterKind {
  kMccKf,       // conventional MCC-KF, Joseph-form covariance
  kImccKf,      // conventional IMCC-KF
  kSrMccKf,     // Cholesky MCC-KF
  kCholImccKf,  // Cholesky IMCC-KF, one combined array
  kUdMccKf,     // UD MCC-KF
  kUdImccKf,    // UD IMCC-KF
  kSvdMccKf,    // SVD MCC-KF
  kRsvdMccKf,   // SVD MCC-KF that only inverts the innovation factor
  kSvdImccKf,   // SVD IMCC-KF
  kClassicalKf, // plain Kalman filter, lambda == 1
};

enum class Family { kMcc, kImcc, kClassical };

std::string_view filter_id(FilterKind kind) noexcept;
std::optional<FilterKind> parse_filter_id(std::string_view id) noexcept;
Family family_of(FilterKind kind) noexcept;

/// The nine correntropy filters, MCC-KF family first.
std::span<const FilterKind> correntropy_filters() noexcept;
/// The nine plus the classical reference.
std::span<const FilterKind> all_filters() noexcept;

struct FullCovariance {
  Matrix p;
};

using CovarianceRep = std::variant<FullCovariance, CholeskyFactor, UDFactor, SVDFactor>;

enum class Phase { kPosterior, kPrior };

struct FilterState {
  Vector x_hat;
  CovarianceRep cov;
  Phase phase = Phase::kPosterior;

  /// Full covariance rebuilt from whatever representation is carried.
  Matrix covariance() const;
  bool all_finite() const;
};

/// Model matrices for one instant plus the factors of Q and R every variant
/// needs. F, G and Q belong to instant k-1; H and R to instant k.
struct StepModel {
  Matrix f, g, q, h, r;
  Matrix q_sqrt;  // Q = q_sqrt^T q_sqrt
  UDFactor q_ud;
  SVDFactor q_svd;
  CholeskyFactor r_chol;
  UDFactor r_ud;
  SVDFactor r_svd;

  /// Factorizes Q (positive semi-definite) and R (positive definite). Throws
  /// kConfiguration on dimension mismatch or an R that cannot be factored.
  static StepModel make(Matrix f, Matrix g, Matrix q, Matrix h, Matrix r);
};

struct StepDiagnostics {
  double lambda = 1.0;
  double sigma = 0.0;
  Matrix gain;        // K_k
  Vector innovation;  // y_k - H x_{k|k-1}
  bool re_factor_present = false;  // a factor of R_{e,k} was read off a post-array
  bool diverged = false;
  std::string failure;  // set when a numerical failure interrupted the step
};

struct StepResult {
  FilterState state;
  StepDiagnostics diag;
};

/// Factorizes pi0 with the variant's own decomposition.
FilterState initialize(FilterKind kind, const Vector& x0, const Matrix& pi0);

/// Dispatches to the variant's step. Numerical breakdown (lost definiteness,
/// zero pivots, guarded underflow, non-finite values) never throws; it comes
/// back as diag.diverged. Dimension or representation mismatches throw
/// kInvalidArgument.
StepResult step(FilterKind kind, const FilterState& state, const StepModel& model, const Vector& y,
                const KernelPolicy& policy);

StepResult mcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult imcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult sr_mcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult chol_imcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult ud_mcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult ud_imcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult svd_mcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult rsvd_mcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
StepResult svd_imcckf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);
/// Reference Kalman filter; ignores the kernel policy and reports lambda = 1.
StepResult classical_kf_step(const FilterState&, const StepModel&, const Vector& y, const KernelPolicy&);

/// Diagonal entries that the SVD variants must invert are rejected below this
/// threshold; the step is flagged as diverged instead of producing Inf.
inline constexpr double kInverseGuard = 1e-150;

}  // namespace mcckf

#endif  // MCCKF_FILTERS_HPP
