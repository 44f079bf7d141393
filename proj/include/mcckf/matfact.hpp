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

// Array-algorithm kernels shared by the factored-form filters.
//
// Conventions:
//   CholeskyFactor: A = S^T S with S upper triangular, nonnegative diagonal.
//   UDFactor:       A = U diag(d) U^T with U unit upper triangular.
//   SVDFactor:      A = V diag(dsqrt)^2 V^T with V orthogonal, dsqrt descending.
//
// Nothing in here forms an explicit general inverse. Inverse factors are
// obtained with tri_solve against the identity or by diagonal division.

#ifndef MCCKF_MATFACT_HPP
#define MCCKF_MATFACT_HPP

#include <Eigen/Core>

namespace mcckf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Copies the upper triangle onto the lower one, so the result is exactly
/// symmetric.
inline Matrix mirror_upper(Matrix p) {
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < p.rows(); ++i) p(i, j) = p(j, i);
  }
  return p;
}

struct CholeskyFactor {
  Matrix s;
  Matrix reconstruct() const { return mirror_upper(s.transpose() * s); }
};

struct UDFactor {
  Matrix u;
  Vector d;
  Matrix reconstruct() const { return mirror_upper(u * d.asDiagonal() * u.transpose()); }
};

struct SVDFactor {
  Matrix v;
  Vector dsqrt;
  Matrix reconstruct() const {
    return mirror_upper(v * dsqrt.array().square().matrix().asDiagonal() * v.transpose());
  }
};

enum class Triangle { kUpper, kLower };

/// Weights at or below this value are rejected by mwgs.
inline constexpr double kMinWeight = 1e-300;

/// Orthogonal triangularization of an r x s pre-array (r >= s). Returns the
/// s x s upper-triangular R with R^T R = A^T A, rows sign-flipped so the
/// diagonal is nonnegative.
Matrix triangularize(const Matrix& pre_array);

struct MwgsResult {
  Matrix b;  // unit triangular, s x s
  Vector d;  // nonnegative, length s
};

/// Modified weighted Gram-Schmidt on the rows of an s x r matrix A^T with
/// diagonal weights D_A (length r, all > kMinWeight). Produces B, D_B with
///   A^T D_A A = B D_B B^T.
/// B is unit upper triangular by default (backward sweep, last row first);
/// kLower runs the sweep forward and yields a unit lower triangular B.
MwgsResult mwgs(const Matrix& a_transpose, const Vector& weights,
                Triangle shape = Triangle::kUpper);

/// Backward (last column first) modified Cholesky factorization of a
/// symmetric positive definite matrix. Throws DecompositionError naming the
/// pivot whose d_j is not positive.
UDFactor ud_decompose(const Matrix& p);

/// Same recursion, but a zero (or roundoff-negative, within tol * max diag)
/// pivot is accepted as d_j = 0 with a zero column above it. Meant for
/// process-noise covariances, which may be singular.
UDFactor ud_decompose_psd(const Matrix& p, double tol = 1e-12);

/// Upper Cholesky factor S with A = S^T S. Throws DecompositionError.
CholeskyFactor cholesky_upper(const Matrix& a);

/// Any square root S (not necessarily triangular) with A = S^T S, for
/// symmetric PSD input. Uses the Cholesky factor when A is positive definite.
Matrix psd_sqrt_upper(const Matrix& a);

struct SvdPostArrays {
  Vector dsqrt;  // singular values of the pre-array, descending
  Matrix v;      // right singular vectors, s x s
};

/// SVD of an r x s pre-array (r >= s); V diag(dsqrt)^2 V^T = A^T A.
/// Columns of V are sign-normalized: largest-magnitude entry positive.
SvdPostArrays svd_post_arrays(const Matrix& pre_array);

/// SVD factors of a symmetric PSD matrix (P = V D V^T, dsqrt = D^{1/2}).
SVDFactor svd_decompose(const Matrix& p);

/// Solves t x = rhs for triangular t. Throws kSingularFactor on a zero
/// diagonal entry.
Matrix tri_solve(const Matrix& t, const Matrix& rhs, Triangle shape = Triangle::kUpper);

}  // namespace mcckf

#endif  // MCCKF_MATFACT_HPP
