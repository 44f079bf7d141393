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

// Conventional recursions: MCC-KF (Joseph-form covariance without lambda),
// IMCC-KF, and the classical Kalman filter used as the lambda == 1 reference.

#include "filter_detail.hpp"

namespace mcckf {

namespace {

using detail::eye;
using detail::spd_solve;

struct Prior {
  detail::Predicted pred;
  Matrix p_pred;
  LambdaValue lam;
};

Prior time_update(const FilterState& state, const StepModel& model, const Vector& y,
                  const KernelPolicy& policy, bool with_lambda) {
  const Matrix& p = detail::rep<FullCovariance>(state, "conventional filter").p;
  Prior out;
  out.pred = detail::predict_state(state, model, y);
  out.p_pred = model.f * p * model.f.transpose() + model.g * model.q * model.g.transpose();
  if (with_lambda) {
    double resid_sq = 0.0;
    if (!out.pred.residual.isZero(0.0)) {
      const Matrix z = spd_solve(out.p_pred, out.pred.residual, "P_{k|k-1}");
      resid_sq = out.pred.residual.dot(z.col(0));
    }
    out.lam = lambda_from_norms(out.pred.innovation_sq, resid_sq, policy);
  }
  return out;
}

StepResult mcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                      const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy, true);
  const double lam = pr.lam.lambda;
  const Eigen::Index n = model.f.rows();
  const Matrix r_inv = spd_solve(model.r, eye(model.r.rows()), "R");
  const Matrix p_inv = spd_solve(pr.p_pred, eye(n), "P_{k|k-1}");
  const Matrix ht_rinv = model.h.transpose() * r_inv;
  const Matrix info = p_inv + lam * ht_rinv * model.h;
  const Matrix k = lam * spd_solve(info, ht_rinv, "P_{k|k}^{-1}");
  const Matrix ikh = eye(n) - k * model.h;

  StepResult r;
  r.state.cov = FullCovariance{ikh * pr.p_pred * ikh.transpose() + k * model.r * k.transpose()};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  return r;
}

StepResult imcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                       const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy, true);
  const double lam = pr.lam.lambda;
  const Eigen::Index n = model.f.rows();
  const Matrix re = lam * model.h * pr.p_pred * model.h.transpose() + model.r;
  const Matrix pht = lam * pr.p_pred * model.h.transpose();
  const Matrix k = spd_solve(re, pht.transpose(), "R_e").transpose();

  StepResult r;
  r.state.cov = FullCovariance{(eye(n) - k * model.h) * pr.p_pred};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = lam;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  return r;
}

StepResult classical_impl(const FilterState& state, const StepModel& model, const Vector& y,
                          const KernelPolicy& policy) {
  Prior pr = time_update(state, model, y, policy, false);
  const Eigen::Index n = model.f.rows();
  const Matrix re = model.h * pr.p_pred * model.h.transpose() + model.r;
  const Matrix pht = pr.p_pred * model.h.transpose();
  const Matrix k = spd_solve(re, pht.transpose(), "R_e").transpose();

  StepResult r;
  r.state.cov = FullCovariance{(eye(n) - k * model.h) * pr.p_pred};
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.diag.lambda = 1.0;
  r.diag.gain = k;
  r.diag.innovation = pr.pred.innovation;
  return r;
}

}  // namespace

StepResult mcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                      const KernelPolicy& p) {
  return detail::guarded("mcckf", mcckf_impl, s, m, y, p);
}

StepResult imcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                       const KernelPolicy& p) {
  return detail::guarded("imcckf", imcckf_impl, s, m, y, p);
}

StepResult classical_kf_step(const FilterState& s, const StepModel& m, const Vector& y,
                             const KernelPolicy& p) {
  return detail::guarded("kf", classical_impl, s, m, y, p);
}

}  // namespace mcckf
