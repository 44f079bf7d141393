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

// Linear discrete-time stochastic model
//   x_k = F x_{k-1} + G w_{k-1},   y_k = H x_k + v_k,
// trajectory simulation with optional shot noise, and the two benchmark
// models used by the experiment harness.

#ifndef MCCKF_SSMODEL_HPP
#define MCCKF_SSMODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mcckf/matfact.hpp"

namespace mcckf {

struct StateSpaceModel {
  Matrix f;      // n x n
  Matrix g;      // n x q
  Matrix h;      // m x n
  Matrix q_cov;  // q x q, PSD
  Matrix r_cov;  // m x m, PD
  Vector x0_mean;
  Matrix pi0;  // n x n, PD

  Eigen::Index state_dim() const { return f.rows(); }
  Eigen::Index noise_dim() const { return g.cols(); }
  Eigen::Index meas_dim() const { return h.rows(); }

  /// Throws kConfiguration on inconsistent dimensions, asymmetric or
  /// indefinite covariances. The simulator accepts a singular R; filters
  /// do not.
  void validate(bool allow_singular_r = false) const;
};

/// Sparse impulsive disturbance added on top of the Gaussian noise.
struct ShotNoiseConfig {
  bool enabled = false;
  double fraction_corrupted = 0.10;
  int protected_prefix = 10;  // first instants never corrupted
  int protected_suffix = 1;   // last instants never corrupted
  long magnitude_low = 0;     // magnitudes are integers in [low, high]
  long magnitude_high = 3;
  bool corrupt_process = true;
  bool corrupt_measurement = true;

  void validate() const;
  /// Number of corrupted instants for a run of n_steps.
  long corrupted_count(long n_steps) const;
};

struct TrialRecord {
  Vector x0;                       // initial state draw
  std::vector<Vector> truth;       // x_1 .. x_N
  std::vector<Vector> measurements;  // y_1 .. y_N
  std::vector<Vector> process_noise;  // w_0 .. w_{N-1} as realized (incl. shots)
  std::vector<Vector> measurement_noise;  // v_1 .. v_N as realized (incl. shots)
  std::vector<long> process_shot_instants;      // 1-based k, sorted
  std::vector<long> measurement_shot_instants;  // 1-based k, sorted
  Matrix q_hat;
  Matrix r_hat;
  std::uint64_t seed = 0;
};

/// Simulates n_steps instants. Shot impulses at instant k are added to every
/// component of w_{k-1} (which drives x_k) and of v_k; process and
/// measurement instants are drawn independently. Deterministic in `seed`.
TrialRecord simulate(const StateSpaceModel& model, long n_steps, const ShotNoiseConfig& shot,
                     std::uint64_t seed);

/// Unbiased (N-1) sample covariance about the sample mean, exactly symmetric.
Matrix sample_covariance(std::span<const Vector> samples);

/// Kinematic displacement/velocity/acceleration model, dt = 0.1.
StateSpaceModel example1_model();

/// Example-1 dynamics observed through H = [[1,1,1],[1,1,1+delta]] with
/// R = delta^2 I and x0 ~ N(0, I).
StateSpaceModel example2_model(double delta);

}  // namespace mcckf

#endif  // MCCKF_SSMODEL_HPP
