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

#include <cmath>
#include <limits>
#include <sstream>

#include "mcckf/error.hpp"
#include "mcckf/harness.hpp"
#include "support.hpp"

using namespace mcckf;

namespace {

ExperimentConfig scalar_config(double q, double r) {
  ExperimentConfig c;
  c.source = ModelSource::kCustom;
  c.custom.f = Matrix::Constant(1, 1, 0.9);
  c.custom.g = Matrix::Identity(1, 1);
  c.custom.h = Matrix::Identity(1, 1);
  c.custom.q_cov = Matrix::Constant(1, 1, q);
  c.custom.r_cov = Matrix::Constant(1, 1, r);
  c.custom.x0_mean = Vector::Constant(1, 1.0);
  c.custom.pi0 = Matrix::Identity(1, 1);
  c.covariances = CovarianceSource::kTrue;
  c.shot.enabled = false;
  c.n_trials = 1;
  c.n_steps = 3;
  return c;
}

std::string rmse_csv(const ExperimentConfig& c) {
  std::ostringstream out;
  write_rmse_csv(out, run_monte_carlo(c), c);
  return out.str();
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const ExperimentConfig e1 = ExperimentConfig::example1();
  CHECK(e1.n_steps == 300);
  CHECK(e1.n_trials == 500);
  CHECK(e1.shot.enabled);
  CHECK(e1.covariances == CovarianceSource::kSample);
  CHECK(e1.filter_list().size() == 9);
  const ExperimentConfig e2 = ExperimentConfig::example2(1e-3);
  CHECK_FALSE(e2.shot.enabled);
  CHECK(e2.covariances == CovarianceSource::kSampleQOnly);
  CHECK(default_deltas().size() == 15);
  CHECK(default_deltas().front() == 1e-1);
  CHECK(default_deltas().back() == 1e-15);

  ExperimentConfig bad = e1;
  bad.n_trials = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = e1;
  bad.n_steps = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ExperimentConfig::example2(-1.0);
  try {
    bad.validate();
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
  }
}

TEST_CASE("RMSE of a single three-step trial matches the direct formula") {
  ExperimentConfig c = scalar_config(0.2, 0.5);
  c.filters = {FilterKind::kMccKf, FilterKind::kClassicalKf};
  const RmseReport report = run_monte_carlo(c);
  REQUIRE(report.filters.size() == 2);

  const StateSpaceModel m = c.model();
  const TrialRecord t = simulate_trial(c, 0);
  REQUIRE(t.truth.size() == 3);
  const StepModel sm = StepModel::make(m.f, m.g, m.q_cov, m.h, m.r_cov);
  for (std::size_t i = 0; i < 2; ++i) {
    const FilterKind kind = c.filters[i];
    FilterState s = initialize(kind, m.x0_mean, m.pi0);
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      s = step(kind, s, sm, t.measurements[k], c.kernel).state;
      const double e = t.truth[k](0) - s.x_hat(0);
      sum_sq += e * e;
    }
    const double expected = std::sqrt(sum_sq / 3.0);
    CHECK(report.filters[i].rmse(0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(report.filters[i].rmse_norm == doctest::Approx(expected).epsilon(1e-14));
    CHECK(report.filters[i].used_trials == 1);
  }
}

TEST_CASE("noiseless scalar system with a near-exact sensor has zero RMSE") {
  ExperimentConfig c = scalar_config(0.0, 1e-14);
  c.n_steps = 20;
  c.n_trials = 3;
  for (const FilterRmse& f : run_monte_carlo(c).filters) {
    CAPTURE(filter_id(f.kind));
    CHECK(f.finite());
    CHECK(f.rmse_norm < 1e-6);
  }

  // At R = 1e-30 only the unsymmetrized (I - KH) P update loses definiteness.
  c.custom.r_cov(0, 0) = 1e-30;
  for (const FilterRmse& f : run_monte_carlo(c).filters) {
    CAPTURE(filter_id(f.kind));
    if (f.kind == FilterKind::kImccKf) {
      CHECK(f.diverged_trials == 3);
    } else {
      CHECK(f.rmse_norm < 1e-12);
    }
  }
}

TEST_CASE("combined norm is the Euclidean norm of the components") {
  ExperimentConfig c = ExperimentConfig::example1();
  c.n_trials = 3;
  c.n_steps = 60;
  for (const FilterRmse& f : run_monte_carlo(c).filters) {
    CHECK(f.rmse.size() == 3);
    CHECK((f.rmse.array() >= 0.0).all());
    CHECK(f.rmse_norm == doctest::Approx(f.rmse.norm()).epsilon(1e-15));
  }
}

TEST_CASE("two half batches merge into the full batch") {
  ExperimentConfig full = ExperimentConfig::example1();
  full.n_trials = 8;
  full.n_steps = 80;
  ExperimentConfig first = full;
  first.n_trials = 4;
  ExperimentConfig second = first;
  second.first_trial = 4;

  const auto whole = accumulate_trials(full);
  auto merged = accumulate_trials(first);
  const auto tail = accumulate_trials(second);
  REQUIRE(whole.size() == merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    merged[i].merge(tail[i]);
    const FilterKind kind = full.filter_list()[i];
    const FilterRmse a = whole[i].finish(kind, full.n_steps, false);
    const FilterRmse b = merged[i].finish(kind, full.n_steps, false);
    CHECK(testing::rel_diff(a.rmse, b.rmse) <= 1e-14);
    CHECK(a.used_trials == b.used_trials);
  }
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig c = ExperimentConfig::example1();
  c.n_trials = 12;
  c.n_steps = 100;
  c.master_seed = 99;
  const std::string one = rmse_csv(c);
  c.threads = 3;
  CHECK(rmse_csv(c) == one);
  c.threads = 8;
  CHECK(rmse_csv(c) == one);
  c.master_seed = 100;
  CHECK(rmse_csv(c) != one);
}

TEST_CASE("all filters consume the same measurement history") {
  const ExperimentConfig c = ExperimentConfig::example1();
  const TrialRecord a = simulate_trial(c, 3);
  const TrialRecord b = simulate_trial(c, 3);
  CHECK(a.measurements == b.measurements);
  CHECK(a.seed == trial_seed(c.master_seed, 3));
}

TEST_CASE("detect_divergence") {
  FilterState s = initialize(FilterKind::kMccKf, Vector::Zero(2), Matrix::Identity(2, 2));
  StepDiagnostics d;
  d.gain = Matrix::Ones(2, 1);
  d.innovation = Vector::Ones(1);
  CHECK_FALSE(detect_divergence(s, d));
  d.gain(1, 0) = std::numeric_limits<double>::infinity();
  CHECK(detect_divergence(s, d));
  d.gain(1, 0) = 0.0;
  d.lambda = std::nan("");
  CHECK(detect_divergence(s, d));
  d.lambda = 1.0;
  s.x_hat(0) = std::nan("");
  CHECK(detect_divergence(s, d));
  FilterState ud = initialize(FilterKind::kUdMccKf, Vector::Zero(2), Matrix::Identity(2, 2));
  std::get<UDFactor>(ud.cov).d(1) = std::numeric_limits<double>::infinity();
  CHECK(detect_divergence(ud, StepDiagnostics{}));
}

TEST_CASE("divergent trials propagate to a non-finite RMSE unless survivors are requested") {
  ExperimentConfig c = ExperimentConfig::example2(1e-9);
  c.n_trials = 4;
  c.filters = {FilterKind::kSvdMccKf, FilterKind::kRsvdMccKf};
  const RmseReport all = run_monte_carlo(c);
  CHECK(all.filters[0].diverged_trials > 0);
  CHECK_FALSE(all.filters[0].finite());
  CHECK(std::isnan(all.filters[0].rmse_norm));
  CHECK(all.filters[1].finite());
  CHECK(all.filters[1].diverged_trials == 0);

  c.rmse_over_survivors = true;
  const RmseReport survivors = run_monte_carlo(c);
  CHECK(survivors.filters[0].used_trials == 4 - survivors.filters[0].diverged_trials);
  CHECK(survivors.filters[1].rmse_norm == all.filters[1].rmse_norm);
}

TEST_CASE("survivor mode with no survivors at all is an empty result") {
  ExperimentConfig c = ExperimentConfig::example2(1e-12);
  c.n_trials = 3;
  c.filters = {FilterKind::kMccKf};
  c.rmse_over_survivors = true;
  try {
    run_monte_carlo(c);
    FAIL("expected an empty result");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyResult);
  }
}

TEST_CASE("sweep: well-conditioned rows are finite and ordered") {
  ExperimentConfig c = ExperimentConfig::example2(1e-2);
  c.n_trials = 4;
  c.n_steps = 100;
  const SweepReport s = run_delta_sweep(c, {1e-1, 1e-2});
  REQUIRE(s.cells.size() == 18);
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t f = 0; f < 9; ++f) {
      const SweepCell& cell = s.cell(d, f);
      CHECK(cell.delta == s.deltas[d]);
      CHECK(cell.kind == s.filters[f]);
      CHECK(cell.status == CellStatus::kOk);
      CHECK(std::isfinite(cell.rmse_norm));
    }
  }
  for (int b : s.breakdown_index) CHECK(b == -1);
  CHECK(s.resurrected.empty());

  std::ostringstream csv;
  write_sweep_csv(csv, s, c);
  CHECK(csv.str().find("delta,filter,rmse_norm,status\n") != std::string::npos);
  CHECK(csv.str().find("seed") != std::string::npos);
}

TEST_CASE("sweep: breakdown index and grid validation") {
  ExperimentConfig c = ExperimentConfig::example2(1e-2);
  c.n_trials = 2;
  c.n_steps = 100;
  c.filters = {FilterKind::kMccKf, FilterKind::kRsvdMccKf};
  const SweepReport s = run_delta_sweep(c, {1e-2, 1e-12});
  CHECK(s.breakdown_index[0] == 1);
  CHECK(s.cell(1, 0).status == CellStatus::kNonFinite);
  CHECK(s.breakdown_index[1] == -1);
  for (const std::vector<double>& bad : std::vector<std::vector<double>>{
           {1e-3, 1e-2}, {1e-2, 1e-2}, {1e-1, -1.0}, {}}) {
    try {
      run_delta_sweep(c, bad);
      FAIL("expected a configuration error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfiguration);
    }
  }
}

TEST_CASE("trace rows and truncation") {
  ExperimentConfig c = ExperimentConfig::example1();
  c.n_steps = 25;
  const auto rows = run_trace(c, FilterKind::kUdImccKf, 2);
  REQUIRE(rows.size() == 25);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k == static_cast<long>(i + 1));
    CHECK_FALSE(rows[i].diverged);
    CHECK(rows[i].lambda > 0.0);
    CHECK(rows[i].lambda <= 1.0);
  }

  ExperimentConfig bad = ExperimentConfig::example2(1e-9);
  const auto cut = run_trace(bad, FilterKind::kSvdMccKf, 0);
  REQUIRE_FALSE(cut.empty());
  CHECK(cut.size() < 300);
  CHECK(cut.back().diverged);
}

TEST_CASE("text tables") {
  ExperimentConfig c = ExperimentConfig::example1();
  c.n_trials = 2;
  c.n_steps = 30;
  c.filters = {FilterKind::kMccKf, FilterKind::kImccKf};
  const std::string table = format_rmse_table(run_monte_carlo(c));
  CHECK(table.find("mcckf") != std::string::npos);
  CHECK(table.find("imcckf") != std::string::npos);
  CHECK(table.find("RMSE_x3") != std::string::npos);
}
