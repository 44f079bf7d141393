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

#include <doctest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>

#include "mcckf/error.hpp"
#include "mcckf/ssmodel.hpp"
#include "support.hpp"

using namespace mcckf;
using testing::rel_diff;

namespace {

StateSpaceModel zero_noise_model() {
  StateSpaceModel m;
  m.f = Matrix::Identity(2, 2);
  m.g = Matrix::Identity(2, 2);
  m.h = Matrix::Ones(1, 2);
  m.q_cov = Matrix::Zero(2, 2);
  m.r_cov = Matrix::Zero(1, 1);
  m.x0_mean = Eigen::Vector2d(1.0, -2.0);
  m.pi0 = Matrix::Identity(2, 2);
  return m;
}

}  // namespace

TEST_CASE("simulate: zero noise keeps the initial draw") {
  const StateSpaceModel m = zero_noise_model();
  const TrialRecord t = simulate(m, 20, ShotNoiseConfig{}, 5);
  REQUIRE(t.truth.size() == 20);
  REQUIRE(t.measurements.size() == 20);
  for (std::size_t k = 0; k < t.truth.size(); ++k) {
    CHECK(t.truth[k] == t.x0);
    CHECK(t.measurements[k] == m.h * t.truth[k]);
  }
  CHECK(t.q_hat.isZero(0.0));
  CHECK(t.r_hat.isZero(0.0));
}

TEST_CASE("simulate: filters still reject a singular R") {
  CHECK_NOTHROW(zero_noise_model().validate(true));
  try {
    zero_noise_model().validate();
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
  }
}

TEST_CASE("simulate: shot instants on example 1") {
  ShotNoiseConfig shot;
  shot.enabled = true;
  CHECK(shot.corrupted_count(300) == 30);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TrialRecord t = simulate(example1_model(), 300, shot, seed);
    for (const auto* instants : {&t.process_shot_instants, &t.measurement_shot_instants}) {
      REQUIRE(instants->size() == 30);
      const std::set<long> distinct(instants->begin(), instants->end());
      CHECK(distinct.size() == 30);
      CHECK(*distinct.begin() >= 11);
      CHECK(*distinct.rbegin() <= 299);
      CHECK(std::is_sorted(instants->begin(), instants->end()));
    }
  }
}

TEST_CASE("simulate: shot magnitudes are integers within bounds") {
  // With zero Gaussian noise the realized noise is the shot itself.
  StateSpaceModel m = zero_noise_model();
  m.r_cov = Matrix::Zero(1, 1);
  ShotNoiseConfig shot;
  shot.enabled = true;
  shot.fraction_corrupted = 0.5;
  shot.magnitude_low = 1;
  shot.magnitude_high = 4;
  const TrialRecord t = simulate(m, 100, shot, 9);
  std::set<long> process(t.process_shot_instants.begin(), t.process_shot_instants.end());
  for (long k = 1; k <= 100; ++k) {
    const Vector& w = t.process_noise[static_cast<std::size_t>(k - 1)];
    if (process.count(k)) {
      CHECK(w(0) == std::round(w(0)));
      CHECK(w(0) >= 1.0);
      CHECK(w(0) <= 4.0);
    } else {
      CHECK(w.isZero(0.0));
    }
  }
}

TEST_CASE("simulate: overlapping protected windows are a configuration error") {
  ShotNoiseConfig shot;
  shot.enabled = true;
  shot.protected_prefix = 8;
  shot.protected_suffix = 3;
  try {
    simulate(example1_model(), 10, shot, 1);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
  }
  ShotNoiseConfig too_many;
  too_many.enabled = true;
  too_many.fraction_corrupted = 1.0;
  CHECK_THROWS_AS(simulate(example1_model(), 300, too_many, 1), Error);
}

TEST_CASE("simulate: same seed gives identical records") {
  ShotNoiseConfig shot;
  shot.enabled = true;
  const TrialRecord a = simulate(example1_model(), 50, shot, 77);
  const TrialRecord b = simulate(example1_model(), 50, shot, 77);
  const TrialRecord c = simulate(example1_model(), 50, shot, 78);
  CHECK(a.x0 == b.x0);
  CHECK(a.truth == b.truth);
  CHECK(a.measurements == b.measurements);
  CHECK(a.q_hat == b.q_hat);
  CHECK(a.process_shot_instants == b.process_shot_instants);
  CHECK(a.measurements != c.measurements);
}

TEST_CASE("simulate: sample Q converges for long Gaussian runs") {
  const StateSpaceModel m = example1_model();
  const TrialRecord t = simulate(m, 100000, ShotNoiseConfig{}, 3);
  CHECK(rel_diff(t.q_hat, m.q_cov) < 0.05);
  CHECK(rel_diff(t.r_hat, m.r_cov) < 0.05);
  CHECK(t.q_hat == t.q_hat.transpose());
}

TEST_CASE("sample_covariance: small cases") {
  std::vector<Vector> pair{Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)};
  CHECK(sample_covariance(pair)(0, 0) == doctest::Approx(2.0));
  std::vector<Vector> constant(5, Eigen::Vector3d(1, 2, 3));
  CHECK(sample_covariance(constant).isZero(0.0));
  std::vector<Vector> one{Vector::Ones(2)};
  try {
    sample_covariance(one);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
}

TEST_CASE("sample_covariance: statistical oracle and symmetry") {
  Rng rng(21);
  std::vector<Vector> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(Eigen::Vector2d(rng.normal(), 2.0 * rng.normal()));
  const Matrix c = sample_covariance(draws);
  CHECK(std::abs(c(0, 0) - 1.0) < 0.1);
  CHECK(std::abs(c(1, 1) - 4.0) < 0.4);
  CHECK(std::abs(c(0, 1)) < 0.1);
  CHECK(c == c.transpose());
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(c).eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("example1_model entries") {
  const StateSpaceModel m = example1_model();
  CHECK(m.q_cov(2, 2) == doctest::Approx(0.1));
  CHECK(m.q_cov(0, 0) == doctest::Approx(5e-7));
  CHECK((m.f * Eigen::Vector3d(1, 0.1, 0)).isApprox(Eigen::Vector3d(1.01, 0.1, 0)));
  CHECK(m.r_cov(0, 0) == doctest::Approx(0.01));
  CHECK(m.pi0.isApprox(0.1 * Matrix::Identity(3, 3)));
  CHECK(m.x0_mean.isApprox(Eigen::Vector3d(1, 0.1, 0)));
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("example2_model entries") {
  StateSpaceModel m = example2_model(0.1);
  CHECK((m.h.row(1) - m.h.row(0)).isApprox(Eigen::RowVector3d(0, 0, 0.1)));
  m = example2_model(1e-8);
  CHECK(m.r_cov.isApprox(1e-16 * Matrix::Identity(2, 2)));
  CHECK(m.r_cov(0, 0) < std::numeric_limits<double>::epsilon());
  CHECK(m.pi0 == Matrix::Identity(3, 3));
  CHECK(m.x0_mean.isZero(0.0));

  const Matrix hth = example2_model(1.0).h.transpose() * example2_model(1.0).h;
  // H^T H is rank two in three dimensions; its nonzero spectrum is moderate.
  const Vector sv = Eigen::JacobiSVD<Matrix>(hth).singularValues();
  CHECK(std::isfinite(sv(0) / sv(1)));
  CHECK(sv(0) / sv(1) < 100.0);

  for (double bad : {0.0, -1.0}) {
    try {
      example2_model(bad);
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfiguration);
    }
  }
}
