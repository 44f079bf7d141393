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

// SVD array implementations, P = V D V^T with V orthogonal. Every update
// takes the SVD of a pre-array and reads D^{1/2} (or D^{-1/2}) and V off
// the post-arrays.

#include <cmath>

#include "filter_detail.hpp"

namespace mcckf {

namespace {

using detail::eye;

struct Prior {
  detail::Predicted pred;
  SVDFactor svd_pred;
  LambdaValue lam;
};

// [D^{1/2} V^T F^T; D_Q^{1/2} V_Q^T G^T] -> D_{k|k-1}^{1/2}, V_{k|k-1}
Prior time_update(const FilterState& state, const StepModel& model, const Vector& y,
                  const KernelPolicy& policy) {
  const SVDFactor& svd = detail::rep<SVDFactor>(state, "svd filter");
  const Eigen::Index n = svd.v.rows();
  const Eigen::Index q = model.q_svd.v.rows();
  Matrix pre(n + q, n);
  pre.topRows(n) = svd.dsqrt.asDiagonal() * svd.v.transpose() * model.f.transpose();
  pre.bottomRows(q) = model.q_svd.dsqrt.asDiagonal() * model.q_svd.v.transpose() *
                      model.g.transpose();
  SvdPostArrays post = svd_post_arrays(pre);

  Prior out;
  out.svd_pred = SVDFactor{std::move(post.v), std::move(post.dsqrt)};
  out.pred = detail::predict_state(state, model, y);
  double resid_sq = 0.0;
  if (!out.pred.residual.isZero(0.0)) {
    const Vector inv = detail::guarded_reciprocal(out.svd_pred.dsqrt, "D_{k|k-1}^{1/2}");
    resid_sq = inv.cwiseProduct(out.svd_pred.v.transpose() * out.pred.residual).squaredNorm();
  }
  out.lam = lambda_from_norms(out.pred.innovation_sq, resid_sq, policy);
  return out;
}

Matrix r_inverse(const SVDFactor& r) {
  const Vector inv = detail::guarded_reciprocal(r.dsqrt, "D_R^{1/2}");
  return r.v * inv.array().square().matrix().asDiagonal() * r.v.transpose();
}

struct InformationUpdate {
  SVDFactor post;  // factors of P_{k|k}; dsqrt ascending as read off
  Vector s;        // D_{k|k}^{-1/2}, descending
  Matrix gain;
};

// [lambda^{1/2} D_R^{-1/2} V_R^T H V_{k|k-1}; D_{k|k-1}^{-1/2}]
//   -> D_{k|k}^{-1/2}, and V_{k|k} = V_{k|k-1} * right singular vectors.
InformationUpdate information_update(const Prior& pr, const StepModel& model) {
  const double lam = pr.lam.lambda;
  const Eigen::Index n = pr.svd_pred.v.rows();
  const Eigen::Index m = model.h.rows();
  const Vector dr_inv = detail::guarded_reciprocal(model.r_svd.dsqrt, "D_R^{1/2}");
  const Vector dp_inv = detail::guarded_reciprocal(pr.svd_pred.dsqrt, "D_{k|k-1}^{1/2}");
  Matrix pre(m + n, n);
  pre.topRows(m) = std::sqrt(lam) * dr_inv.asDiagonal() * model.r_svd.v.transpose() * model.h *
                   pr.svd_pred.v;
  pre.bottomRows(n) = dp_inv.asDiagonal();
  const SvdPostArrays arr = svd_post_arrays(pre);

  InformationUpdate out;
  out.s = arr.dsqrt;
  const Matrix v_post = pr.svd_pred.v * arr.v;
  const Vector d_post = detail::guarded_reciprocal(arr.dsqrt, "D_{k|k}^{-1/2}");
  out.gain = lam * v_post * d_post.array().square().matrix().asDiagonal() * v_post.transpose() *
             model.h.transpose() * r_inverse(model.r_svd);
  out.post = SVDFactor{v_post, d_post};
  return out;
}

// [D^{1/2} V^T (I - K H)^T; D_R^{1/2} V_R^T K^T] -> D_{k|k}^{1/2}, V_{k|k}
SVDFactor joseph(const SVDFactor& pred, const StepModel& model, const Matrix& k) {
  const Eigen::Index n = pred.v.rows();
  const Eigen::Index m = model.h.rows();
  Matrix pre(n + m, n);
  pre.topRows(n) =
      pred.dsqrt.asDiagonal() * pred.v.transpose() * (eye(n) - k * model.h).transpose();
  pre.bottomRows(m) = model.r_svd.dsqrt.asDiagonal() * model.r_svd.v.transpose() * k.transpose();
  SvdPostArrays post = svd_post_arrays(pre);
  return SVDFactor{std::move(post.v), std::move(post.dsqrt)};
}

StepResult finish(const Prior& pr, Matrix k, CovarianceRep cov) {
  StepResult r;
  r.state.x_hat = pr.pred.x_pred + k * pr.pred.innovation;
  r.state.cov = std::move(cov);
  r.diag.lambda = pr.lam.lambda;
  r.diag.sigma = pr.lam.sigma;
  r.diag.gain = std::move(k);
  r.diag.innovation = pr.pred.innovation;
  return r;
}

StepResult svd_mcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                          const KernelPolicy& policy) {
  const Prior pr = time_update(state, model, y, policy);
  InformationUpdate info = information_update(pr, model);
  SVDFactor post = joseph(pr.svd_pred, model, info.gain);
  return finish(pr, std::move(info.gain), std::move(post));
}

StepResult svd_imcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                           const KernelPolicy& policy) {
  const Prior pr = time_update(state, model, y, policy);
  InformationUpdate info = information_update(pr, model);
  // 1/s comes out ascending; flip to keep the descending convention.
  SVDFactor post{info.post.v.rowwise().reverse(), info.post.dsqrt.reverse()};
  return finish(pr, std::move(info.gain), std::move(post));
}

StepResult rsvd_mcckf_impl(const FilterState& state, const StepModel& model, const Vector& y,
                           const KernelPolicy& policy) {
  const Prior pr = time_update(state, model, y, policy);
  const double lam = pr.lam.lambda;
  const Eigen::Index n = pr.svd_pred.v.rows();
  const Eigen::Index m = model.h.rows();

  // [lambda^{1/2} D^{1/2} V^T H^T; D_R^{1/2} V_R^T] -> D_{R_e}^{1/2}, V_{R_e}
  Matrix pre(n + m, m);
  pre.topRows(n) = std::sqrt(lam) * pr.svd_pred.dsqrt.asDiagonal() * pr.svd_pred.v.transpose() *
                   model.h.transpose();
  pre.bottomRows(m) = model.r_svd.dsqrt.asDiagonal() * model.r_svd.v.transpose();
  const SvdPostArrays re = svd_post_arrays(pre);
  const Vector re_inv = detail::guarded_reciprocal(re.dsqrt, "D_{R_e}^{1/2}");

  const Matrix k = lam * pr.svd_pred.reconstruct() * model.h.transpose() * re.v *
                   re_inv.array().square().matrix().asDiagonal() * re.v.transpose();
  SVDFactor post = joseph(pr.svd_pred, model, k);
  StepResult r = finish(pr, k, std::move(post));
  r.diag.re_factor_present = true;
  return r;
}

}  // namespace

StepResult svd_mcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                          const KernelPolicy& p) {
  return detail::guarded("svd-mcckf", svd_mcckf_impl, s, m, y, p);
}

StepResult rsvd_mcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                           const KernelPolicy& p) {
  return detail::guarded("rsvd-mcckf", rsvd_mcckf_impl, s, m, y, p);
}

StepResult svd_imcckf_step(const FilterState& s, const StepModel& m, const Vector& y,
                           const KernelPolicy& p) {
  return detail::guarded("svd-imcckf", svd_imcckf_impl, s, m, y, p);
}

}  // namespace mcckf
