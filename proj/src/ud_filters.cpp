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

// UD (modified Cholesky) array implementations, P = U D U^T. All updates go
// through modified weighted Gram-Schmidt; no square roots of D are taken.

#include <cmath>
#include <vector>

#include "filter_detail.hpp"

namespace mcckf {

namespace {

using detail::eye;

struct Prior {
  detail::Predicted pred;
  UDFactor ud_pred;
  LambdaValue lam;
};

// [F U_P, G U_Q] with weights diag(D_P, D_Q) -> U_{k|k-1}, D_{k|k-1}.
// Columns carrying a zero process-noise weight (singular Q) contribute
// nothing to the Gram matrix and are left out.
Prior time_update(const FilterState& state, const StepModel& model, const Vector& y,
                  const KernelPolicy& policy) {
  const UDFactor& ud = detail::rep<UDFactor>(state, "ud filter");
  const Eigen::Index n = ud.u.rows();
  const Matrix gu = model.g * model.q_ud.u;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < model.q_ud.d.size(); ++j) {
    if (model.q_ud.d(j) > 0.0) keep.push_back(j);
  }
  const auto kept = static_cast<Eigen::Index>(keep.size());
  Matrix a_t(n, n + kept);
  Vector w(n + kept);
  a_t.leftCols(n) = model.f * ud.u;
  w.head(n) = ud.d;
  for (Eigen::Index c = 0; c < kept; ++c) {
    a_t.col(n + c) = gu.col(keep[static_cast<std::size_t>(c)]);
    w(n + c) = model.q_ud.d(keep[static_cast<std::size_t>(c)]);
  }
  MwgsResult tu = mwgs(a_t, w);

  Prior out;
  out.ud_pred = UDFactor{std::move(tu.b), std::move(tu.d)};
  out.pred = detail::predict_state(state, model, y);
  double resid_sq = 0.0;
  if (!out.pred.residual.isZero(0.0)) {
    const Vector z = tri_solve(out.ud_pred.u, out.pred.residual, Triangle::kUpper);
    const Vector d_inv = detail::guarded_reciprocal(out.ud_pred.d, "D_{k|k-1}");
    resid_sq = z.cwiseProduct(z).dot(d_inv);
  }
  out.lam = lambda_from_norms(out.pred.innovation_sq, resid_sq, policy);
  return out;
}

StepResult ud_mcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                         const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy);
  const double lam = pr.lam.lambda;
  const Eigen::Index n = pr.ud_pred.u.rows();
  const Eigen::Index m = model.h.rows();
  const UDFactor& rud = model.r_ud;

  // [U^{-T}, lambda^{1/2} H^T U_R^{-T}] with weights diag(D^{-1}, D_R^{-1}).
  // The Gram matrix is P_{k|k}^{-1} = U_{k|k}^{-T} D_{k|k}^{-1} U_{k|k}^{-1},
  // whose unit factor U_{k|k}^{-T} is lower triangular, so this sweep runs
  // in the forward (lower) direction.
  const Matrix u_inv = tri_solve(pr.ud_pred.u, eye(n), Triangle::kUpper);
  const Matrix ur_inv_h = tri_solve(rud.u, model.h, Triangle::kUpper);  // U_R^{-1} H
  const Vector d_inv = detail::guarded_reciprocal(pr.ud_pred.d, "D_{k|k-1}");
  const Vector dr_inv = detail::guarded_reciprocal(rud.d, "D_R");
  Matrix a_t(n, n + m);
  a_t.leftCols(n) = u_inv.transpose();
  a_t.rightCols(m) = std::sqrt(lam) * ur_inv_h.transpose();
  Vector w(n + m);
  w << d_inv, dr_inv;
  const MwgsResult info = mwgs(a_t, w, Triangle::kLower);  // b = U_{k|k}^{-T}, d = D_{k|k}^{-1}

  // K = lambda (L Dinv L^T)^{-1} H^T R^{-1}
  const Matrix ht_rinv = ur_inv_h.transpose() * dr_inv.asDiagonal() *
                         tri_solve(rud.u, eye(m), Triangle::kUpper);
  const Matrix z1 = tri_solve(info.b, ht_rinv, Triangle::kLower);
  const Matrix z2 = detail::guarded_reciprocal(info.d, "D_{k|k}^{-1}").asDiagonal() * z1;
  const Matrix k = lam * tri_solve(info.b.transpose(), z2, Triangle::kUpper);

  // Joseph form: [(I - K H) U, K U_R] with weights diag(D, D_R).
  Matrix joseph(n, n + m);
  joseph.leftCols(n) = (eye(n) - k * model.h) * pr.ud_pred.u;
  joseph.rightCols(m) = k * rud.u;
  Vector wj(n + m);
  wj << pr.ud_pred.d, rud.d;
  MwgsResult post = mwgs(joseph, wj);

  StepResult r;
  r.state.cov = UDFactor{std::move(post.b), std::move(post.d)};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  return r;
}

StepResult ud_imcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                          const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy);
  const double lam = pr.lam.lambda;
  const double root_lam = std::sqrt(lam);
  const Eigen::Index n = pr.ud_pred.u.rows();
  const Eigen::Index m = model.h.rows();
  const UDFactor& rud = model.r_ud;

  // [U 0; lambda^{1/2} H U  U_R] with weights diag(D, D_R)
  //   -> [U_{k|k}  Kbar_u; 0  U_{R_e}], diag(D_{k|k}, D_{R_e})
  Matrix a_t = Matrix::Zero(n + m, n + m);
  a_t.topLeftCorner(n, n) = pr.ud_pred.u;
  a_t.bottomLeftCorner(m, n) = root_lam * model.h * pr.ud_pred.u;
  a_t.bottomRightCorner(m, m) = rud.u;
  Vector w(n + m);
  w << pr.ud_pred.d, rud.d;
  const MwgsResult post = mwgs(a_t, w);
  const Matrix kbar_u = post.b.topRightCorner(n, m);
  const Matrix u_re = post.b.bottomRightCorner(m, m);

  StepResult r;
  r.state.cov = UDFactor{post.b.topLeftCorner(n, n), post.d.head(n)};
  r.state.x_hat = pr.pred.x_pred +
                  root_lam * kbar_u * tri_solve(u_re, pr.pred.innovation, Triangle::kUpper);
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain =
      root_lam * tri_solve(u_re.transpose(), kbar_u.transpose(), Triangle::kLower).transpose();
  r.diag.innovation = pr.pred.innovation;
  r.diag.re_factor_present = true;
  return r;
}

}  // namespace

StepResult ud_mcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                         const KernelPolicy& p) {
  return detail::guarded("ud-mcckf", ud_mcckf_impl, s, m, y, p);
}

StepResult ud_imcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                          const KernelPolicy& p) {
  return detail::guarded("ud-imcckf", ud_imcckf_impl, s, m, y, p);
}

}  // namespace mcckf
