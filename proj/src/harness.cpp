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

#include "mcckf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "mcckf/error.hpp"
#include "mcckf/rng.hpp"

namespace mcckf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest round-trip form, for metadata lines.
std::string short_num(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return "Inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, std::fabs(v) < 1e6 ? "%.4f" : "%.4e", v);
  return buf;
}

const char* source_name(ModelSource s) {
  switch (s) {
    case ModelSource::kExample1: return "example1";
    case ModelSource::kExample2: return "example2";
    case ModelSource::kCustom: return "custom";
  }
  return "?";
}

const char* covariance_name(CovarianceSource s) {
  switch (s) {
    case CovarianceSource::kSample: return "sample";
    case CovarianceSource::kSampleQOnly: return "sample_q_only";
    case CovarianceSource::kTrue: return "true";
  }
  return "?";
}

void write_metadata(std::ostream& out, const char* kind, const ExperimentConfig& c) {
  out << "# mcckf " << kind << "\n";
  out << "# model=" << source_name(c.source);
  if (c.source == ModelSource::kExample2) out << " delta=" << short_num(c.delta);
  out << "\n";
  out << "# master_seed=" << c.master_seed << " first_trial=" << c.first_trial
      << " trials=" << c.n_trials << " steps=" << c.n_steps << "\n";
  if (c.kernel.mode == KernelPolicy::Mode::kAdaptive) {
    out << "# kernel=adaptive sigma_floor=" << short_num(c.kernel.sigma_floor);
  } else {
    out << "# kernel=fixed sigma=" << short_num(c.kernel.sigma_fixed);
  }
  out << " lambda_min=" << short_num(c.kernel.lambda_min) << "\n";
  out << "# shot=" << (c.shot.enabled ? "on" : "off");
  if (c.shot.enabled) {
    out << " fraction=" << short_num(c.shot.fraction_corrupted) << " magnitudes=" << c.shot.magnitude_low
        << ".." << c.shot.magnitude_high;
  }
  out << " covariances=" << covariance_name(c.covariances)
      << " rmse_over_survivors=" << (c.rmse_over_survivors ? "yes" : "no") << "\n";
}

int resolve_threads(int requested, long work) {
  int t = requested;
  if (t <= 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<long>(t, std::max<long>(work, 1)));
}

// Runs body(i) for i in [0, count) on `threads` workers.
template <class Body>
void parallel_for(long count, int threads, Body body) {
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (long i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentConfig ExperimentConfig::example1() {
  ExperimentConfig c;
  c.source = ModelSource::kExample1;
  c.shot.enabled = true;
  c.covariances = CovarianceSource::kSample;
  return c;
}

ExperimentConfig ExperimentConfig::example2(double delta) {
  ExperimentConfig c;
  c.source = ModelSource::kExample2;
  c.delta = delta;
  c.shot.enabled = false;
  c.covariances = CovarianceSource::kSampleQOnly;
  return c;
}

void ExperimentConfig::validate() const {
  if (n_steps < 1) throw Error(ErrorCode::kConfiguration, "n_steps must be at least 1");
  if (n_trials < 1) throw Error(ErrorCode::kConfiguration, "n_trials must be at least 1");
  if (first_trial < 0) throw Error(ErrorCode::kConfiguration, "first_trial must be nonnegative");
  if (threads < 0) throw Error(ErrorCode::kConfiguration, "threads must be nonnegative");
  if (source == ModelSource::kExample2 && !(delta > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "delta must be positive");
  }
  for (double d : deltas) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::kConfiguration, "sweep deltas must be positive");
    }
  }
  try {
    kernel.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfiguration, e.what());
  }
  shot.validate();
  model().validate();
}

StateSpaceModel ExperimentConfig::model() const {
  switch (source) {
    case ModelSource::kExample1: return example1_model();
    case ModelSource::kExample2: return example2_model(delta);
    case ModelSource::kCustom: return custom;
  }
  throw Error(ErrorCode::kConfiguration, "unknown model source");
}

std::vector<FilterKind> ExperimentConfig::filter_list() const {
  if (!filters.empty()) return filters;
  const auto all = correntropy_filters();
  return {all.begin(), all.end()};
}

std::vector<double> default_deltas() {
  std::vector<double> d;
  for (int e = 1; e <= 15; ++e) d.push_back(std::pow(10.0, -e));
  return d;
}

bool FilterRmse::finite() const { return std::isfinite(rmse_norm); }

void RmseAccumulator::merge(const RmseAccumulator& other) {
  if (sum_sq.size() == 0) {
    sum_sq = other.sum_sq;
  } else if (other.sum_sq.size() != 0) {
    sum_sq += other.sum_sq;
  }
  used_trials += other.used_trials;
  diverged_trials += other.diverged_trials;
  cpu_seconds += other.cpu_seconds;
}

FilterRmse RmseAccumulator::finish(FilterKind kind, long n_steps, bool over_survivors) const {
  FilterRmse r;
  r.kind = kind;
  r.diverged_trials = diverged_trials;
  r.used_trials = used_trials;
  const long all = used_trials + (over_survivors ? diverged_trials : 0);
  r.cpu_seconds = all > 0 ? cpu_seconds / static_cast<double>(all) : 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (used_trials == 0 || (!over_survivors && diverged_trials > 0) || sum_sq.size() == 0) {
    r.rmse = Vector::Constant(std::max<Eigen::Index>(sum_sq.size(), 0), nan);
    r.rmse_norm = nan;
    return r;
  }
  const double denom = static_cast<double>(used_trials) * static_cast<double>(n_steps);
  r.rmse = (sum_sq / denom).cwiseSqrt();
  r.rmse_norm = r.rmse.norm();
  return r;
}

StepModel filter_model(const StateSpaceModel& model, const TrialRecord& trial,
                       CovarianceSource source) {
  switch (source) {
    case CovarianceSource::kSample:
      return StepModel::make(model.f, model.g, trial.q_hat, model.h, trial.r_hat);
    case CovarianceSource::kSampleQOnly:
      return StepModel::make(model.f, model.g, trial.q_hat, model.h, model.r_cov);
    case CovarianceSource::kTrue:
      return StepModel::make(model.f, model.g, model.q_cov, model.h, model.r_cov);
  }
  throw Error(ErrorCode::kConfiguration, "unknown covariance source");
}

bool detect_divergence(const FilterState& state, const StepDiagnostics& diag) {
  return !state.all_finite() || !diag.gain.allFinite() || !std::isfinite(diag.lambda);
}

TrialOutcome run_filter(FilterKind kind, const StateSpaceModel& model, const TrialRecord& trial,
                        const StepModel& step_model, const KernelPolicy& kernel) {
  const auto start = Clock::now();
  TrialOutcome out;
  out.sum_sq = Vector::Zero(model.state_dim());
  FilterState state = initialize(kind, model.x0_mean, model.pi0);
  for (std::size_t k = 0; k < trial.measurements.size(); ++k) {
    StepResult r = step(kind, state, step_model, trial.measurements[k], kernel);
    if (r.diag.diverged || detect_divergence(r.state, r.diag)) {
      out.diverged = true;
      out.diverged_at = static_cast<long>(k) + 1;
      break;
    }
    state = std::move(r.state);
    out.sum_sq += (trial.truth[k] - state.x_hat).array().square().matrix();
  }
  out.cpu_seconds = seconds_since(start);
  return out;
}

TrialRecord simulate_trial(const ExperimentConfig& config, long trial) {
  return simulate(config.model(), config.n_steps, config.shot,
                  trial_seed(config.master_seed, static_cast<std::uint64_t>(config.first_trial + trial)));
}

std::vector<RmseAccumulator> accumulate_trials(const ExperimentConfig& config) {
  config.validate();
  const StateSpaceModel model = config.model();
  const std::vector<FilterKind> kinds = config.filter_list();
  const std::size_t nf = kinds.size();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.n_trials) * nf);

  parallel_for(config.n_trials, resolve_threads(config.threads, config.n_trials), [&](long j) {
    const TrialRecord trial = simulate(
        model, config.n_steps, config.shot,
        trial_seed(config.master_seed, static_cast<std::uint64_t>(config.first_trial + j)));
    const StepModel sm = filter_model(model, trial, config.covariances);
    for (std::size_t f = 0; f < nf; ++f) {
      outcomes[static_cast<std::size_t>(j) * nf + f] =
          run_filter(kinds[f], model, trial, sm, config.kernel);
    }
  });

  std::vector<RmseAccumulator> acc(nf);
  for (auto& a : acc) a.sum_sq = Vector::Zero(model.state_dim());
  for (long j = 0; j < config.n_trials; ++j) {
    for (std::size_t f = 0; f < nf; ++f) {
      const TrialOutcome& o = outcomes[static_cast<std::size_t>(j) * nf + f];
      acc[f].cpu_seconds += o.cpu_seconds;
      if (o.diverged) {
        ++acc[f].diverged_trials;
      } else {
        acc[f].sum_sq += o.sum_sq;
        ++acc[f].used_trials;
      }
    }
  }
  return acc;
}

RmseReport run_monte_carlo(const ExperimentConfig& config) {
  const auto start = Clock::now();
  const std::vector<RmseAccumulator> acc = accumulate_trials(config);
  const std::vector<FilterKind> kinds = config.filter_list();
  RmseReport report;
  report.n_steps = config.n_steps;
  report.n_trials = config.n_trials;
  report.master_seed = config.master_seed;
  bool any_used = false;
  for (std::size_t f = 0; f < kinds.size(); ++f) {
    report.filters.push_back(acc[f].finish(kinds[f], config.n_steps, config.rmse_over_survivors));
    any_used = any_used || acc[f].used_trials > 0;
  }
  if (config.rmse_over_survivors && !any_used) {
    throw Error(ErrorCode::kEmptyResult, "every trial diverged for every filter");
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

const SweepCell& SweepReport::cell(std::size_t delta_index, std::size_t filter_index) const {
  return cells.at(delta_index * filters.size() + filter_index);
}

SweepReport run_delta_sweep(const ExperimentConfig& config, const std::vector<double>& deltas) {
  const auto start = Clock::now();
  if (deltas.empty()) throw Error(ErrorCode::kConfiguration, "sweep needs at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i])) {
      throw Error(ErrorCode::kConfiguration, "sweep deltas must be positive");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw Error(ErrorCode::kConfiguration, "sweep deltas must be strictly descending");
    }
  }
  SweepReport report;
  report.deltas = deltas;
  report.filters = config.filter_list();
  report.n_trials = config.n_trials;
  report.n_steps = config.n_steps;
  report.master_seed = config.master_seed;
  report.breakdown_index.assign(report.filters.size(), -1);

  for (std::size_t i = 0; i < deltas.size(); ++i) {
    ExperimentConfig c = config;
    c.source = ModelSource::kExample2;
    c.delta = deltas[i];
    c.filters = report.filters;
    const std::vector<RmseAccumulator> acc = accumulate_trials(c);
    for (std::size_t f = 0; f < report.filters.size(); ++f) {
      const FilterRmse r = acc[f].finish(report.filters[f], c.n_steps, c.rmse_over_survivors);
      SweepCell cell;
      cell.delta = deltas[i];
      cell.kind = report.filters[f];
      cell.rmse_norm = r.rmse_norm;
      cell.diverged_trials = r.diverged_trials;
      cell.status = r.finite() ? CellStatus::kOk : CellStatus::kNonFinite;
      if (cell.status == CellStatus::kNonFinite && report.breakdown_index[f] < 0) {
        report.breakdown_index[f] = static_cast<int>(i);
      }
      report.cells.push_back(cell);
    }
  }
  for (std::size_t f = 0; f < report.filters.size(); ++f) {
    const int b = report.breakdown_index[f];
    if (b < 0) continue;
    for (std::size_t i = static_cast<std::size_t>(b) + 1; i < deltas.size(); ++i) {
      if (report.cell(i, f).status == CellStatus::kOk) {
        report.resurrected.push_back(report.filters[f]);
        break;
      }
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

std::vector<TraceRow> run_trace(const ExperimentConfig& config, FilterKind kind, long trial) {
  config.validate();
  const StateSpaceModel model = config.model();
  const TrialRecord rec = simulate_trial(config, trial);
  const StepModel sm = filter_model(model, rec, config.covariances);
  std::vector<TraceRow> rows;
  FilterState state = initialize(kind, model.x0_mean, model.pi0);
  for (std::size_t k = 0; k < rec.measurements.size(); ++k) {
    StepResult r = step(kind, state, sm, rec.measurements[k], config.kernel);
    TraceRow row;
    row.k = static_cast<long>(k) + 1;
    row.lambda = r.diag.lambda;
    row.sigma = r.diag.sigma;
    row.x_hat = r.state.x_hat;
    row.p_diag = r.state.covariance().diagonal();
    row.innovation = r.diag.innovation.size() == model.meas_dim()
                         ? r.diag.innovation
                         : Vector::Constant(model.meas_dim(), std::numeric_limits<double>::quiet_NaN());
    row.diverged = r.diag.diverged || detect_divergence(r.state, r.diag);
    rows.push_back(row);
    if (row.diverged) break;
    state = std::move(r.state);
  }
  return rows;
}

void write_rmse_csv(std::ostream& out, const RmseReport& report, const ExperimentConfig& config) {
  write_metadata(out, "rmse report", config);
  out << "filter,component,rmse,rmse_norm,diverged_trials\n";
  for (const FilterRmse& f : report.filters) {
    for (Eigen::Index i = 0; i < f.rmse.size(); ++i) {
      out << filter_id(f.kind) << ",x" << (i + 1) << ',' << num(f.rmse(i)) << ','
          << num(f.rmse_norm) << ',' << f.diverged_trials << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepReport& report, const ExperimentConfig& config) {
  ExperimentConfig meta = config;
  meta.source = ModelSource::kExample2;
  write_metadata(out, "delta sweep", meta);
  out << "delta,filter,rmse_norm,status\n";
  for (const SweepCell& c : report.cells) {
    out << num(c.delta) << ',' << filter_id(c.kind) << ',' << num(c.rmse_norm) << ','
        << (c.status == CellStatus::kOk ? "ok" : "nonfinite") << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows,
                     const ExperimentConfig& config, FilterKind kind, long trial) {
  write_metadata(out, "trace", config);
  out << "# filter=" << filter_id(kind) << " trial=" << trial << "\n";
  const Eigen::Index n = config.model().state_dim();
  const Eigen::Index m = config.model().meas_dim();
  out << "k,lambda";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_hat_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",p_diag_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",innov_" << i;
  out << ",sigma,diverged\n";
  for (const TraceRow& r : rows) {
    out << r.k << ',' << num(r.lambda);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(r.x_hat(i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(r.p_diag(i));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << num(r.innovation(i));
    out << ',' << num(r.sigma) << ',' << (r.diverged ? "true" : "false") << '\n';
  }
}

void write_trial_csv(std::ostream& out, const TrialRecord& trial, const ExperimentConfig& config) {
  write_metadata(out, "simulated trial", config);
  out << "# seed=" << trial.seed << "\n";
  const Eigen::Index n = trial.x0.size();
  const Eigen::Index m = trial.measurements.empty() ? 0 : trial.measurements.front().size();
  out << "k";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",y_" << i;
  out << ",process_shot,measurement_shot\n";
  auto has = [](const std::vector<long>& v, long k) {
    return std::binary_search(v.begin(), v.end(), k);
  };
  out << 0;
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(trial.x0(i));
  for (Eigen::Index i = 0; i < m; ++i) out << ",";
  out << ",0,0\n";
  for (std::size_t k = 0; k < trial.truth.size(); ++k) {
    const long kk = static_cast<long>(k) + 1;
    out << kk;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << num(trial.truth[k](i));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << num(trial.measurements[k](i));
    out << ',' << has(trial.process_shot_instants, kk) << ','
        << has(trial.measurement_shot_instants, kk) << '\n';
  }
}

std::string format_rmse_table(const RmseReport& report) {
  std::ostringstream os;
  const Eigen::Index n = report.filters.empty() ? 0 : report.filters.front().rmse.size();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s", "filter");
  os << buf;
  for (Eigen::Index i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, " %12s", ("RMSE_x" + std::to_string(i)).c_str());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, " %12s %9s %10s\n", "||RMSE||", "diverged", "CPU (s)");
  os << buf;
  for (const FilterRmse& f : report.filters) {
    std::snprintf(buf, sizeof buf, "%-12s", std::string(filter_id(f.kind)).c_str());
    os << buf;
    for (Eigen::Index i = 0; i < f.rmse.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %12s", fixed4(f.rmse(i)).c_str());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, " %12s %9ld %10s\n", fixed4(f.rmse_norm).c_str(),
                  f.diverged_trials, fixed4(f.cpu_seconds).c_str());
    os << buf;
  }
  return os.str();
}

std::string format_sweep_table(const SweepReport& report) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-8s", "delta");
  os << buf;
  for (FilterKind k : report.filters) {
    std::snprintf(buf, sizeof buf, " %12s", std::string(filter_id(k)).c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-8.0e", report.deltas[i]);
    os << buf;
    for (std::size_t f = 0; f < report.filters.size(); ++f) {
      const SweepCell& c = report.cell(i, f);
      const std::string v = c.status == CellStatus::kOk ? fixed4(c.rmse_norm) : "NaN";
      std::snprintf(buf, sizeof buf, " %12s", v.c_str());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace mcckf
