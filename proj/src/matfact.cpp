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

#include "mcckf/matfact.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "mcckf/error.hpp"

namespace mcckf {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(who) + ": expected a nonempty square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_symmetric(const Matrix& a, const char* who) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": matrix is not symmetric");
  }
}

// Shared backward recursion for the two UD entry points.
UDFactor ud_backward(const Matrix& p, bool allow_zero_pivot, double tol) {
  const Eigen::Index n = p.rows();
  UDFactor f{Matrix::Identity(n, n), Vector::Zero(n)};
  const double zero_tol = tol * std::max(1.0, p.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    double dj = p(j, j);
    for (Eigen::Index k = j + 1; k < n; ++k) dj -= f.d(k) * f.u(j, k) * f.u(j, k);
    if (!(dj > 0.0)) {
      if (allow_zero_pivot && dj > -zero_tol) {
        f.d(j) = 0.0;
        for (Eigen::Index i = 0; i < j; ++i) f.u(i, j) = 0.0;
        continue;
      }
      throw DecompositionError("ud_decompose: matrix is not positive definite (pivot " +
                                   std::to_string(j) + ")",
                               static_cast<long>(j));
    }
    f.d(j) = dj;
    for (Eigen::Index i = 0; i < j; ++i) {
      double s = p(i, j);
      for (Eigen::Index k = j + 1; k < n; ++k) s -= f.d(k) * f.u(i, k) * f.u(j, k);
      f.u(i, j) = s / dj;
    }
  }
  return f;
}

}  // namespace

Matrix triangularize(const Matrix& pre_array) {
  const Eigen::Index r = pre_array.rows();
  const Eigen::Index s = pre_array.cols();
  if (r < s || s == 0) {
    throw Error(ErrorCode::kInvalidArgument, "triangularize: pre-array needs rows >= cols");
  }
  Eigen::HouseholderQR<Matrix> qr(pre_array);
  Matrix post = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < s; ++i) {
    if (post(i, i) < 0.0) post.row(i) *= -1.0;
  }
  return post;
}

MwgsResult mwgs(const Matrix& a_transpose, const Vector& weights, Triangle shape) {
  const Eigen::Index s = a_transpose.rows();
  const Eigen::Index r = a_transpose.cols();
  if (weights.size() != r) {
    throw Error(ErrorCode::kInvalidArgument, "mwgs: weight vector length does not match columns");
  }
  if (r < s) throw Error(ErrorCode::kInvalidArgument, "mwgs: needs at least as many columns as rows");
  for (Eigen::Index k = 0; k < r; ++k) {
    if (!(weights(k) > kMinWeight)) {
      throw Error(ErrorCode::kInvalidWeight,
                  "mwgs: weight " + std::to_string(k) + " is not strictly positive");
    }
  }

  Matrix w = a_transpose;  // rows are orthogonalized in place
  MwgsResult out{Matrix::Identity(s, s), Vector::Zero(s)};
  auto sweep = [&](Eigen::Index j, Eigen::Index first, Eigen::Index last) {
    const Vector dw = weights.cwiseProduct(w.row(j).transpose());
    const double dj = w.row(j).dot(dw);
    out.d(j) = dj;
    if (dj == 0.0) return;  // rank deficient: nothing to project out
    for (Eigen::Index i = first; i < last; ++i) {
      const double bij = w.row(i).dot(dw) / dj;
      out.b(i, j) = bij;
      w.row(i) -= bij * w.row(j);
    }
  };
  if (shape == Triangle::kUpper) {
    for (Eigen::Index j = s - 1; j >= 0; --j) sweep(j, 0, j);
  } else {
    for (Eigen::Index j = 0; j < s; ++j) sweep(j, j + 1, s);
  }
  return out;
}

UDFactor ud_decompose(const Matrix& p) {
  require_square(p, "ud_decompose");
  require_symmetric(p, "ud_decompose");
  return ud_backward(p, false, 0.0);
}

UDFactor ud_decompose_psd(const Matrix& p, double tol) {
  require_square(p, "ud_decompose_psd");
  require_symmetric(p, "ud_decompose_psd");
  return ud_backward(p, true, tol);
}

CholeskyFactor cholesky_upper(const Matrix& a) {
  require_square(a, "cholesky_upper");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    // Locate the pivot for the diagnostic.
    long pivot = 0;
    for (Eigen::Index k = 1; k <= a.rows(); ++k) {
      Eigen::LLT<Matrix> lead(a.topLeftCorner(k, k));
      if (lead.info() != Eigen::Success) {
        pivot = static_cast<long>(k - 1);
        break;
      }
    }
    throw DecompositionError(
        "cholesky_upper: matrix is not positive definite (pivot " + std::to_string(pivot) + ")",
        pivot);
  }
  return CholeskyFactor{llt.matrixU()};
}

Matrix psd_sqrt_upper(const Matrix& a) {
  require_square(a, "psd_sqrt_upper");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixU();
  require_symmetric(a, "psd_sqrt_upper");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  Vector lam = eig.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol) {
      throw DecompositionError("psd_sqrt_upper: matrix is indefinite", static_cast<long>(i));
    }
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  return lam.asDiagonal() * eig.eigenvectors().transpose();
}

SvdPostArrays svd_post_arrays(const Matrix& pre_array) {
  const Eigen::Index r = pre_array.rows();
  const Eigen::Index s = pre_array.cols();
  if (r < s || s == 0) {
    throw Error(ErrorCode::kInvalidArgument, "svd_post_arrays: pre-array needs rows >= cols");
  }
  if (!pre_array.allFinite()) {
    throw Error(ErrorCode::kDomain, "svd_post_arrays: pre-array has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(pre_array, Eigen::ComputeFullV);
  SvdPostArrays out{svd.singularValues(), svd.matrixV()};
  for (Eigen::Index j = 0; j < s; ++j) {
    Eigen::Index imax = 0;
    out.v.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.v(imax, j) < 0.0) out.v.col(j) *= -1.0;
  }
  return out;
}

SVDFactor svd_decompose(const Matrix& p) {
  require_square(p, "svd_decompose");
  const SvdPostArrays sv = svd_post_arrays(p);
  return SVDFactor{sv.v, sv.dsqrt.cwiseSqrt()};
}

Matrix tri_solve(const Matrix& t, const Matrix& rhs, Triangle shape) {
  require_square(t, "tri_solve");
  const Eigen::Index n = t.rows();
  if (rhs.rows() != n) throw Error(ErrorCode::kInvalidArgument, "tri_solve: dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (t(i, i) == 0.0) {
      throw Error(ErrorCode::kSingularFactor,
                  "tri_solve: zero diagonal entry at " + std::to_string(i));
    }
  }
  Matrix x = rhs;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (shape == Triangle::kUpper) {
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = x(i, c);
        for (Eigen::Index k = i + 1; k < n; ++k) s -= t(i, k) * x(k, c);
        x(i, c) = s / t(i, i);
      }
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        double s = x(i, c);
        for (Eigen::Index k = 0; k < i; ++k) s -= t(i, k) * x(k, c);
        x(i, c) = s / t(i, i);
      }
    }
  }
  return x;
}

}  // namespace mcckf
