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

// Monte-Carlo experiments over the benchmark models: RMSE per state
// component, the ill-conditioning sweep, single-trial traces, and the CSV
// and text renderings of their results.

#ifndef MCCKF_HARNESS_HPP
#define MCCKF_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcckf/correntropy.hpp"
#include "mcckf/filters.hpp"
#include "mcckf/ssmodel.hpp"

namespace mcckf {

enum class ModelSource { kExample1, kExample2, kCustom };

/// Which noise covariances the filters are given.
enum class CovarianceSource {
  kSample,       // sample covariances of the realized w and v
  kSampleQOnly,  // sample covariance of w, true R
  kTrue,         // the model's Q and R
};

struct ExperimentConfig {
  ModelSource source = ModelSource::kExample1;
  double delta = 1e-2;      // example2 only
  StateSpaceModel custom;   // kCustom only
  std::vector<FilterKind> filters;  // empty means the nine correntropy filters
  long n_steps = 300;
  long n_trials = 500;
  std::uint64_t master_seed = 1;
  KernelPolicy kernel = KernelPolicy::adaptive();
  ShotNoiseConfig shot;
  CovarianceSource covariances = CovarianceSource::kSample;
  bool rmse_over_survivors = false;
  int threads = 1;        // 0 means hardware concurrency
  long first_trial = 0;   // trial j uses trial_seed(master_seed, first_trial + j)
  std::vector<double> deltas;  // sweep grid; empty means default_deltas()

  /// Shot noise on, sample Q and R.
  static ExperimentConfig example1();
  /// Gaussian noise only, sample Q and true R.
  static ExperimentConfig example2(double delta);

  /// Throws kConfiguration.
  void validate() const;
  StateSpaceModel model() const;
  std::vector<FilterKind> filter_list() const;
};

/// 1e-1, 1e-2, ..., 1e-15.
std::vector<double> default_deltas();

struct FilterRmse {
  FilterKind kind = FilterKind::kMccKf;
  Vector rmse;             // per state component; NaN when non-finite
  double rmse_norm = 0.0;  // Euclidean norm of rmse
  long diverged_trials = 0;
  long used_trials = 0;    // trials entering the sums
  double cpu_seconds = 0.0;  // mean per trial, informational
  bool finite() const;
};

struct RmseReport {
  long n_steps = 0;
  long n_trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<FilterRmse> filters;
  double wall_seconds = 0.0;
};

/// Running sums for one filter. Batches over disjoint trial ranges merge by
/// addition.
struct RmseAccumulator {
  Vector sum_sq;
  long used_trials = 0;
  long diverged_trials = 0;
  double cpu_seconds = 0.0;

  void merge(const RmseAccumulator& other);
  FilterRmse finish(FilterKind kind, long n_steps, bool over_survivors) const;
};

/// Outcome of one filter on one trial.
struct TrialOutcome {
  Vector sum_sq;  // sum over k of squared component errors
  bool diverged = false;
  long diverged_at = 0;  // 1-based instant, when diverged
  double cpu_seconds = 0.0;
};

/// Runs one filter over a simulated trial from the model's initial moments.
TrialOutcome run_filter(FilterKind kind, const StateSpaceModel& model, const TrialRecord& trial,
                        const StepModel& step_model, const KernelPolicy& kernel);

/// Filter-side model for a trial according to the covariance source.
StepModel filter_model(const StateSpaceModel& model, const TrialRecord& trial,
                       CovarianceSource source);

/// Per-filter accumulators over the configured trial range, reduced in trial
/// order regardless of the thread count.
std::vector<RmseAccumulator> accumulate_trials(const ExperimentConfig& config);

/// Throws kEmptyResult when over_survivors is set and no filter kept a
/// single trial.
RmseReport run_monte_carlo(const ExperimentConfig& config);

/// True iff any estimate, factor, gain or lambda entry is non-finite.
bool detect_divergence(const FilterState& state, const StepDiagnostics& diag);

enum class CellStatus { kOk, kNonFinite };

struct SweepCell {
  double delta = 0.0;
  FilterKind kind = FilterKind::kMccKf;
  double rmse_norm = 0.0;
  CellStatus status = CellStatus::kOk;
  long diverged_trials = 0;
};

struct SweepReport {
  std::vector<double> deltas;          // descending
  std::vector<FilterKind> filters;
  std::vector<SweepCell> cells;        // delta-major, deltas descending
  std::vector<int> breakdown_index;    // per filter: first failing delta index, -1 if none
  std::vector<FilterKind> resurrected;  // filters finite again after a failure
  long n_trials = 0;
  long n_steps = 0;
  std::uint64_t master_seed = 0;
  double wall_seconds = 0.0;

  const SweepCell& cell(std::size_t delta_index, std::size_t filter_index) const;
};

/// Runs the Monte-Carlo experiment on example2_model(delta) for each delta.
/// The trial seeds do not depend on delta. Throws kConfiguration unless the
/// deltas are positive and strictly descending.
SweepReport run_delta_sweep(const ExperimentConfig& config, const std::vector<double>& deltas);

struct TraceRow {
  long k = 0;
  double lambda = 0.0;
  double sigma = 0.0;
  Vector x_hat;
  Vector p_diag;
  Vector innovation;
  bool diverged = false;
};

/// Single trial (index `trial` of the configured seed), single filter. Stops
/// after the first diverged step.
std::vector<TraceRow> run_trace(const ExperimentConfig& config, FilterKind kind, long trial = 0);

/// The simulated trial behind run_trace / run_monte_carlo for index `trial`.
TrialRecord simulate_trial(const ExperimentConfig& config, long trial = 0);

void write_rmse_csv(std::ostream& out, const RmseReport& report, const ExperimentConfig& config);
void write_sweep_csv(std::ostream& out, const SweepReport& report, const ExperimentConfig& config);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows,
                     const ExperimentConfig& config, FilterKind kind, long trial);
void write_trial_csv(std::ostream& out, const TrialRecord& trial, const ExperimentConfig& config);

/// Fixed-width text tables, four decimals.
std::string format_rmse_table(const RmseReport& report);
std::string format_sweep_table(const SweepReport& report);

}  // namespace mcckf

#endif  // MCCKF_HARNESS_HPP
