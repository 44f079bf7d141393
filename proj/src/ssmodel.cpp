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

#include "mcckf/ssmodel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcckf/error.hpp"
#include "mcckf/rng.hpp"

namespace mcckf {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfiguration, what);
}

void check_shape(const Matrix& a, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (a.rows() != rows || a.cols() != cols) {
    config_error(std::string("model: ") + name + " must be " + std::to_string(rows) + "x" +
                 std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                 std::to_string(a.cols()));
  }
}

// min eigenvalue relative to the largest magnitude, or throws if asymmetric.
double min_rel_eigenvalue(const Matrix& a, const char* name) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    config_error(std::string("model: ") + name + " is not symmetric");
  }
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() / scale;
}

// Draws `count` distinct instants uniformly from [lo, hi] (partial Fisher-Yates).
std::vector<long> draw_instants(Rng& rng, long lo, long hi, long count) {
  std::vector<long> pool(static_cast<std::size_t>(hi - lo + 1));
  std::iota(pool.begin(), pool.end(), lo);
  const long size = static_cast<long>(pool.size());
  for (long i = 0; i < count; ++i) {
    const long j = rng.uniform_int(i, size - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Adds integer impulses to every component of the selected noise samples.
// `offset` maps instant k to the sample index (k - offset).
std::vector<long> add_shots(Rng& rng, const ShotNoiseConfig& shot, long n_steps,
                            std::vector<Vector>& noise, long offset) {
  const long count = shot.corrupted_count(n_steps);
  const long lo = shot.protected_prefix + 1;
  const long hi = n_steps - shot.protected_suffix;
  std::vector<long> instants = draw_instants(rng, lo, hi, count);
  for (long k : instants) {
    Vector& sample = noise[static_cast<std::size_t>(k - offset)];
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
      sample(i) += static_cast<double>(rng.uniform_int(shot.magnitude_low, shot.magnitude_high));
    }
  }
  return instants;
}

}  // namespace

void StateSpaceModel::validate(bool allow_singular_r) const {
  const Eigen::Index n = f.rows();
  if (n == 0) config_error("model: empty state");
  check_shape(f, n, n, "F");
  if (g.rows() != n || g.cols() == 0) config_error("model: G must have one row per state");
  const Eigen::Index q = g.cols();
  if (h.cols() != n || h.rows() == 0) config_error("model: H must have one column per state");
  const Eigen::Index m = h.rows();
  check_shape(q_cov, q, q, "Q");
  check_shape(r_cov, m, m, "R");
  check_shape(pi0, n, n, "Pi0");
  if (x0_mean.size() != n) config_error("model: x0 must have state dimension");
  if (!f.allFinite() || !g.allFinite() || !h.allFinite() || !q_cov.allFinite() ||
      !r_cov.allFinite() || !pi0.allFinite() || !x0_mean.allFinite()) {
    config_error("model: non-finite entries");
  }
  if (min_rel_eigenvalue(q_cov, "Q") < -1e-12) config_error("model: Q is not positive semi-definite");
  const double r_min = min_rel_eigenvalue(r_cov, "R");
  if (allow_singular_r ? r_min < -1e-12 : !(r_min > 0.0)) {
    config_error(allow_singular_r ? "model: R is not positive semi-definite"
                                  : "model: R is not positive definite");
  }
  if (!(min_rel_eigenvalue(pi0, "Pi0") > 0.0)) config_error("model: Pi0 is not positive definite");
}

void ShotNoiseConfig::validate() const {
  if (!(fraction_corrupted >= 0.0 && fraction_corrupted <= 1.0)) {
    config_error("shot: fraction_corrupted must lie in [0, 1]");
  }
  if (protected_prefix < 0 || protected_suffix < 0) {
    config_error("shot: protected prefix/suffix must be nonnegative");
  }
  if (magnitude_low > magnitude_high) config_error("shot: magnitude_low exceeds magnitude_high");
}

long ShotNoiseConfig::corrupted_count(long n_steps) const {
  return std::lround(fraction_corrupted * static_cast<double>(n_steps));
}

TrialRecord simulate(const StateSpaceModel& model, long n_steps, const ShotNoiseConfig& shot,
                     std::uint64_t seed) {
  model.validate(true);
  if (n_steps < 1) config_error("simulate: n_steps must be at least 1");
  if (shot.enabled) {
    shot.validate();
    const long window = n_steps - shot.protected_suffix - shot.protected_prefix;
    if (window < 1) config_error("shot: protected regions leave no admissible instant");
    if (shot.corrupted_count(n_steps) > window) {
      config_error("shot: more corrupted instants requested than the window holds");
    }
  }

  const Eigen::Index n = model.state_dim();
  const Eigen::Index q = model.noise_dim();
  const Eigen::Index m = model.meas_dim();
  const Matrix q_root = psd_sqrt_upper(model.q_cov).transpose();  // Q = L L^T
  const Matrix r_root = psd_sqrt_upper(model.r_cov).transpose();
  const Matrix pi_root = psd_sqrt_upper(model.pi0).transpose();

  Rng rng(seed);
  auto gaussian = [&rng](Eigen::Index size) {
    Vector z(size);
    for (Eigen::Index i = 0; i < size; ++i) z(i) = rng.normal();
    return z;
  };

  TrialRecord rec;
  rec.seed = seed;
  rec.x0 = model.x0_mean + pi_root * gaussian(n);
  const auto steps = static_cast<std::size_t>(n_steps);
  rec.process_noise.reserve(steps);
  rec.measurement_noise.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) rec.process_noise.push_back(q_root * gaussian(q));
  for (std::size_t k = 0; k < steps; ++k) rec.measurement_noise.push_back(r_root * gaussian(m));

  if (shot.enabled) {
    if (shot.corrupt_process) {
      rec.process_shot_instants = add_shots(rng, shot, n_steps, rec.process_noise, 1);
    }
    if (shot.corrupt_measurement) {
      rec.measurement_shot_instants = add_shots(rng, shot, n_steps, rec.measurement_noise, 1);
    }
  }

  rec.truth.reserve(steps);
  rec.measurements.reserve(steps);
  Vector x = rec.x0;
  for (std::size_t k = 0; k < steps; ++k) {
    x = model.f * x + model.g * rec.process_noise[k];
    rec.truth.push_back(x);
    rec.measurements.push_back(model.h * x + rec.measurement_noise[k]);
  }

  if (n_steps >= 2) {
    rec.q_hat = sample_covariance(rec.process_noise);
    rec.r_hat = sample_covariance(rec.measurement_noise);
  } else {
    rec.q_hat = model.q_cov;
    rec.r_hat = model.r_cov;
  }
  return rec;
}

Matrix sample_covariance(std::span<const Vector> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "sample_covariance: at least 2 samples required");
  }
  const Eigen::Index dim = samples.front().size();
  Vector mean = Vector::Zero(dim);
  for (const Vector& s : samples) {
    if (s.size() != dim) throw Error(ErrorCode::kInvalidArgument, "sample_covariance: ragged samples");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  Matrix cov = Matrix::Zero(dim, dim);
  for (const Vector& s : samples) {
    const Vector c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
  return 0.5 * (cov + cov.transpose());
}

StateSpaceModel example1_model() {
  const double dt = 0.1;
  StateSpaceModel m;
  m.f.resize(3, 3);
  m.f << 1.0, dt, dt * dt / 2.0,
         0.0, 1.0, dt,
         0.0, 0.0, 1.0;
  m.g = Matrix::Identity(3, 3);
  m.h.resize(1, 3);
  m.h << 1.0, 0.0, 0.0;
  const double dt2 = dt * dt, dt3 = dt2 * dt, dt4 = dt3 * dt, dt5 = dt4 * dt;
  m.q_cov.resize(3, 3);
  m.q_cov << dt5 / 20.0, dt4 / 8.0, dt3 / 6.0,
             dt4 / 8.0,  dt3 / 3.0, dt2 / 2.0,
             dt3 / 6.0,  dt2 / 2.0, dt;
  m.r_cov = Matrix::Constant(1, 1, 0.01);
  m.x0_mean.resize(3);
  m.x0_mean << 1.0, 0.1, 0.0;
  m.pi0 = 0.1 * Matrix::Identity(3, 3);
  return m;
}

StateSpaceModel example2_model(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    config_error("example2: delta must be positive and finite");
  }
  StateSpaceModel m = example1_model();
  m.h.resize(2, 3);
  m.h << 1.0, 1.0, 1.0,
         1.0, 1.0, 1.0 + delta;
  m.r_cov = delta * delta * Matrix::Identity(2, 2);
  m.x0_mean = Vector::Zero(3);
  m.pi0 = Matrix::Identity(3, 3);
  return m;
}

}  // namespace mcckf
