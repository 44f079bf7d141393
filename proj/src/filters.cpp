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

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <limits>
#include <type_traits>

#include "filter_detail.hpp"
#include "mcckf/matfact.hpp"

namespace mcckf {

namespace {

constexpr std::array<FilterKind, 10> kAll = {
    FilterKind::kMccKf,     FilterKind::kSrMccKf,    FilterKind::kUdMccKf,
    FilterKind::kSvdMccKf,  FilterKind::kRsvdMccKf,  FilterKind::kImccKf,
    FilterKind::kCholImccKf, FilterKind::kUdImccKf,  FilterKind::kSvdImccKf,
    FilterKind::kClassicalKf,
};

void check_dims(const FilterState& state, const StepModel& model, const Vector& y, const char* who) {
  const Eigen::Index n = model.f.rows();
  const Eigen::Index m = model.h.rows();
  const bool ok = model.f.cols() == n && model.g.rows() == n && model.h.cols() == n &&
                  state.x_hat.size() == n && y.size() == m;
  if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": dimension mismatch");
  const Eigen::Index cov_dim = std::visit(
      [](const auto& c) -> Eigen::Index {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) return c.p.rows();
        if constexpr (std::is_same_v<T, CholeskyFactor>) return c.s.rows();
        if constexpr (std::is_same_v<T, UDFactor>) return c.u.rows();
        if constexpr (std::is_same_v<T, SVDFactor>) return c.v.rows();
      },
      state.cov);
  if (cov_dim != n) {
    throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": covariance dimension mismatch");
  }
  if (state.phase != Phase::kPosterior) {
    throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": state must be a posterior");
  }
}

}  // namespace

std::string_view filter_id(FilterKind kind) noexcept {
  switch (kind) {
    case FilterKind::kMccKf: return "mcckf";
    case FilterKind::kImccKf: return "imcckf";
    case FilterKind::kSrMccKf: return "sr-mcckf";
    case FilterKind::kCholImccKf: return "chol-imcckf";
    case FilterKind::kUdMccKf: return "ud-mcckf";
    case FilterKind::kUdImccKf: return "ud-imcckf";
    case FilterKind::kSvdMccKf: return "svd-mcckf";
    case FilterKind::kRsvdMccKf: return "rsvd-mcckf";
    case FilterKind::kSvdImccKf: return "svd-imcckf";
    case FilterKind::kClassicalKf: return "kf";
  }
  return "?";
}

std::optional<FilterKind> parse_filter_id(std::string_view id) noexcept {
  for (FilterKind k : kAll) {
    if (filter_id(k) == id) return k;
  }
  return std::nullopt;
}

Family family_of(FilterKind kind) noexcept {
  switch (kind) {
    case FilterKind::kMccKf:
    case FilterKind::kSrMccKf:
    case FilterKind::kUdMccKf:
    case FilterKind::kSvdMccKf:
    case FilterKind::kRsvdMccKf:
      return Family::kMcc;
    case FilterKind::kImccKf:
    case FilterKind::kCholImccKf:
    case FilterKind::kUdImccKf:
    case FilterKind::kSvdImccKf:
      return Family::kImcc;
    case FilterKind::kClassicalKf:
      return Family::kClassical;
  }
  return Family::kClassical;
}

std::span<const FilterKind> correntropy_filters() noexcept { return {kAll.data(), 9}; }
std::span<const FilterKind> all_filters() noexcept { return {kAll.data(), kAll.size()}; }

Matrix FilterState::covariance() const {
  return std::visit(
      [](const auto& c) -> Matrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, FullCovariance>) {
          return c.p;
        } else {
          return c.reconstruct();
        }
      },
      cov);
}

bool FilterState::all_finite() const {
  if (!x_hat.allFinite()) return false;
  return std::visit(
      [](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FullCovariance>) return c.p.allFinite();
        if constexpr (std::is_same_v<T, CholeskyFactor>) return c.s.allFinite();
        if constexpr (std::is_same_v<T, UDFactor>) return c.u.allFinite() && c.d.allFinite();
        if constexpr (std::is_same_v<T, SVDFactor>) return c.v.allFinite() && c.dsqrt.allFinite();
      },
      cov);
}

StepModel StepModel::make(Matrix f, Matrix g, Matrix q, Matrix h, Matrix r) {
  const Eigen::Index n = f.rows();
  if (f.cols() != n || g.rows() != n || q.rows() != g.cols() || q.cols() != g.cols() ||
      h.cols() != n || r.rows() != h.rows() || r.cols() != h.rows()) {
    throw Error(ErrorCode::kConfiguration, "step model: inconsistent matrix dimensions");
  }
  StepModel m;
  try {
    m.q_sqrt = psd_sqrt_upper(q);
    m.q_ud = ud_decompose_psd(q);
    m.q_svd = svd_decompose(q);
    m.r_chol = cholesky_upper(r);
    m.r_ud = ud_decompose(r);
    m.r_svd = svd_decompose(r);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfiguration, std::string("step model: ") + e.what());
  }
  m.f = std::move(f);
  m.g = std::move(g);
  m.q = std::move(q);
  m.h = std::move(h);
  m.r = std::move(r);
  return m;
}

FilterState initialize(FilterKind kind, const Vector& x0, const Matrix& pi0) {
  if (pi0.rows() != x0.size() || pi0.cols() != x0.size()) {
    throw Error(ErrorCode::kInvalidArgument, "initialize: Pi0 does not match the state dimension");
  }
  FilterState s;
  s.x_hat = x0;
  switch (kind) {
    case FilterKind::kMccKf:
    case FilterKind::kImccKf:
    case FilterKind::kClassicalKf:
      s.cov = FullCovariance{pi0};
      break;
    case FilterKind::kSrMccKf:
    case FilterKind::kCholImccKf:
      s.cov = cholesky_upper(pi0);
      break;
    case FilterKind::kUdMccKf:
    case FilterKind::kUdImccKf:
      s.cov = ud_decompose(pi0);
      break;
    case FilterKind::kSvdMccKf:
    case FilterKind::kRsvdMccKf:
    case FilterKind::kSvdImccKf:
      s.cov = svd_decompose(pi0);
      break;
  }
  return s;
}

StepResult step(FilterKind kind, const FilterState& state, const StepModel& model, const Vector& y,
                const KernelPolicy& policy) {
  switch (kind) {
    case FilterKind::kMccKf: return mcckf_step(state, model, y, policy);
    case FilterKind::kImccKf: return imcckf_step(state, model, y, policy);
    case FilterKind::kSrMccKf: return sr_mcckf_step(state, model, y, policy);
    case FilterKind::kCholImccKf: return chol_imcckf_step(state, model, y, policy);
    case FilterKind::kUdMccKf: return ud_mcckf_step(state, model, y, policy);
    case FilterKind::kUdImccKf: return ud_imcckf_step(state, model, y, policy);
    case FilterKind::kSvdMccKf: return svd_mcckf_step(state, model, y, policy);
    case FilterKind::kRsvdMccKf: return rsvd_mcckf_step(state, model, y, policy);
    case FilterKind::kSvdImccKf: return svd_imcckf_step(state, model, y, policy);
    case FilterKind::kClassicalKf: return classical_kf_step(state, model, y, policy);
  }
  throw Error(ErrorCode::kInvalidArgument, "step: unknown filter kind");
}

namespace detail {

Predicted predict_state(const FilterState& state, const StepModel& model, const Vector& y) {
  Predicted p;
  p.x_pred = model.f * state.x_hat;
  p.innovation = y - model.h * p.x_pred;
  p.residual = p.x_pred - model.f * state.x_hat;
  p.innovation_sq =
      tri_solve(model.r_chol.s.transpose(), p.innovation, Triangle::kLower).squaredNorm();
  return p;
}

StepResult guarded(const char* who, StepImpl impl, const FilterState& state,
                   const StepModel& model, const Vector& y, const KernelPolicy& policy) {
  check_dims(state, model, y, who);
  policy.validate();
  try {
    StepResult r = impl(state, model, y, policy);
    r.state.phase = Phase::kPosterior;
    r.diag.diverged = !r.state.all_finite() || !r.diag.gain.allFinite() ||
                      !std::isfinite(r.diag.lambda);
    return r;
  } catch (const Error& e) {
    if (!e.numerical()) throw;
    StepResult r;
    r.state = state;
    r.state.x_hat.setConstant(std::numeric_limits<double>::quiet_NaN());
    r.diag.diverged = true;
    r.diag.failure = e.what();
    r.diag.lambda = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
}

Matrix spd_solve(const Matrix& a, const Matrix& rhs, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kDecompositionFailure,
                std::string(what) + ": matrix lost positive definiteness");
  }
  return llt.solve(rhs);
}

Vector guarded_reciprocal(const Vector& d, const char* what) {
  Vector out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) >= kInverseGuard)) {
      throw Error(ErrorCode::kSingularFactor,
                  std::string(what) + ": diagonal factor entry below the inversion guard");
    }
    out(i) = 1.0 / d(i);
  }
  return out;
}

}  // namespace detail

}  // namespace mcckf
