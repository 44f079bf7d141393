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

// Cholesky array implementations. Factors are upper triangular with
// P = S^T S; every update triangularizes a pre-array and reads the new
// factors off the post-array.

#include <cmath>

#include "filter_detail.hpp"

namespace mcckf {

namespace {

using detail::eye;

struct Prior {
  detail::Predicted pred;
  Matrix s_pred;  // P_{k|k-1} = s_pred^T s_pred
  LambdaValue lam;
};

// [S F^T; Q^{1/2} G^T] -> [S_{k|k-1}; 0]
Prior time_update(const FilterState& state, const StepModel& model, const Vector& y,
                  const KernelPolicy& policy) {
  const Matrix& s = detail::rep<CholeskyFactor>(state, "cholesky filter").s;
  const Eigen::Index n = s.rows();
  const Eigen::Index q = model.q_sqrt.rows();
  Matrix pre(n + q, n);
  pre.topRows(n) = s * model.f.transpose();
  pre.bottomRows(q) = model.q_sqrt * model.g.transpose();

  Prior out;
  out.s_pred = triangularize(pre);
  out.pred = detail::predict_state(state, model, y);
  double resid_sq = 0.0;
  if (!out.pred.residual.isZero(0.0)) {
    resid_sq = tri_solve(out.s_pred.transpose(), out.pred.residual, Triangle::kLower).squaredNorm();
  }
  out.lam = lambda_from_norms(out.pred.innovation_sq, resid_sq, policy);
  return out;
}

StepResult sr_mcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                         const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy);
  const double lam = pr.lam.lambda;
  const Eigen::Index n = pr.s_pred.rows();
  const Eigen::Index m = model.h.rows();
  const Matrix& rs = model.r_chol.s;
  const Matrix rs_t = rs.transpose();

  // [P^{-T/2}; lambda^{1/2} R^{-T/2} H] -> [P_{k|k}^{-T/2}; 0]
  const Matrix s_inv = tri_solve(pr.s_pred, eye(n), Triangle::kUpper);
  const Matrix whitened_h = tri_solve(rs_t, model.h, Triangle::kLower);  // R^{-T/2} H
  Matrix pre(n + m, n);
  pre.topRows(n) = s_inv.transpose();
  pre.bottomRows(m) = std::sqrt(lam) * whitened_h;
  const Matrix x = triangularize(pre);  // x^T x = P_{k|k}^{-1}

  // K = lambda (x^T x)^{-1} H^T R^{-1}, by two triangular solves.
  const Matrix ht_rinv =
      whitened_h.transpose() * tri_solve(rs_t, eye(m), Triangle::kLower);
  const Matrix z = tri_solve(x.transpose(), ht_rinv, Triangle::kLower);
  const Matrix k = lam * tri_solve(x, z, Triangle::kUpper);

  // Joseph form: [S (I - K H)^T; R^{1/2} K^T] -> [S_{k|k}; 0]
  Matrix joseph(n + m, n);
  joseph.topRows(n) = pr.s_pred * (eye(n) - k * model.h).transpose();
  joseph.bottomRows(m) = rs * k.transpose();

  StepResult r;
  r.state.cov = CholeskyFactor{triangularize(joseph)};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  return r;
}

StepResult chol_imcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                            const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy);
  const double lam = pr.lam.lambda;
  const double root_lam = std::sqrt(lam);
  const Eigen::Index n = pr.s_pred.rows();
  const Eigen::Index m = model.h.rows();

  // [R^{1/2} 0; lambda^{1/2} S H^T  S] -> [R_e^{1/2}  Kbar^T; 0  S_{k|k}]
  Matrix pre = Matrix::Zero(m + n, m + n);
  pre.topLeftCorner(m, m) = model.r_chol.s;
  pre.bottomLeftCorner(n, m) = root_lam * pr.s_pred * model.h.transpose();
  pre.bottomRightCorner(n, n) = pr.s_pred;
  const Matrix post = triangularize(pre);
  const Matrix re_sqrt = post.topLeftCorner(m, m);
  const Matrix kbar_t = post.topRightCorner(m, n);

  // K = lambda^{1/2} Kbar R_e^{-T/2}
  const Matrix k = root_lam * tri_solve(re_sqrt, kbar_t, Triangle::kUpper).transpose();

  StepResult r;
  r.state.cov = CholeskyFactor{post.bottomRightCorner(n, n)};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  r.diag.re_factor_present = true;
  return r;
}

}  // namespace

StepResult sr_mcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                         const KernelPolicy& p) {
  return detail::guarded("sr-mcckf", sr_mcckf_impl, s, m, y, p);
}

StepResult chol_imcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                            const KernelPolicy& p) {
  return detail::guarded("chol-imcckf", chol_imcckf_impl, s, m, y, p);
}

}  // namespace mcckf
