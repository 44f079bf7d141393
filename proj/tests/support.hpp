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

// Random generators and comparison helpers for the test binaries.

#ifndef MCCKF_TESTS_SUPPORT_HPP
#define MCCKF_TESTS_SUPPORT_HPP

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "mcckf/filters.hpp"
#include "mcckf/matfact.hpp"
#include "mcckf/rng.hpp"
#include "mcckf/ssmodel.hpp"

namespace testing {

using mcckf::Matrix;
using mcckf::Vector;

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

inline Matrix random_matrix(mcckf::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Vector random_vector(mcckf::Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1); }

inline double uniform(mcckf::Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng.engine());
}

inline Matrix random_orthogonal(mcckf::Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Symmetric positive definite with eigenvalues spread log-uniformly over
/// [1, cond] and scaled by `scale`.
inline Matrix random_spd(mcckf::Rng& rng, Eigen::Index n, double cond = 10.0, double scale = 1.0) {
  const Matrix q = random_orthogonal(rng, n);
  Vector ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = scale * std::pow(cond, uniform(rng, 0.0, 1.0));
  Matrix a = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline Matrix random_upper(mcckf::Rng& rng, Eigen::Index n) {
  Matrix t = random_matrix(rng, n, n).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) t(i, i) = (rng.normal() > 0 ? 1.0 : -1.0) * uniform(rng, 1.0, 3.0);
  return t;
}

inline Vector random_weights(mcckf::Rng& rng, Eigen::Index n) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = uniform(rng, 0.1, 5.0);
  return w;
}

/// A stable random system with n states, m measurements, and a full-rank
/// process noise.
struct RandomSystem {
  mcckf::StateSpaceModel model;
  mcckf::StepModel step;
};

inline RandomSystem random_system(mcckf::Rng& rng, Eigen::Index n, Eigen::Index m) {
  RandomSystem s;
  Matrix f = random_matrix(rng, n, n);
  const double radius = f.eigenvalues().cwiseAbs().maxCoeff();
  f *= uniform(rng, 0.5, 0.98) / std::max(radius, 1e-12);
  s.model.f = f;
  s.model.g = Matrix::Identity(n, n);
  s.model.h = random_matrix(rng, m, n);
  s.model.q_cov = random_spd(rng, n, 10.0, 0.1);
  s.model.r_cov = random_spd(rng, m, 10.0, 0.5);
  s.model.x0_mean = random_vector(rng, n);
  s.model.pi0 = random_spd(rng, n, 10.0, 1.0);
  s.step = mcckf::StepModel::make(s.model.f, s.model.g, s.model.q_cov, s.model.h, s.model.r_cov);
  return s;
}

/// Measurements from a simulated trajectory with occasional large outliers,
/// so that lambda actually varies under a fixed kernel.
inline std::vector<Vector> outlier_measurements(mcckf::Rng& rng, const mcckf::StateSpaceModel& m,
                                                long steps) {
  mcckf::TrialRecord t = mcckf::simulate(m, steps, mcckf::ShotNoiseConfig{}, rng.engine()());
  for (auto& y : t.measurements) {
    if (uniform(rng, 0.0, 1.0) < 0.1) y += 5.0 * random_vector(rng, y.size());
  }
  return t.measurements;
}

}  // namespace testing

#endif  // MCCKF_TESTS_SUPPORT_HPP
