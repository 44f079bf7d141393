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

#include "mcckf/mcckf.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "mcckf/config.hpp"
#include "mcckf/error.hpp"
#include "mcckf/harness.hpp"

struct mcckf_experiment {
  mcckf::ExperimentConfig config;
};

struct mcckf_rmse_report {
  mcckf::RmseReport report;
  mcckf::ExperimentConfig config;
  std::string table;
};

struct mcckf_sweep_report {
  mcckf::SweepReport report;
  mcckf::ExperimentConfig config;
  std::string table;
};

namespace {

using mcckf::ErrorCode;

thread_local std::string last_error;

mcckf_status set_error(mcckf_status status, const std::string& what) {
  last_error = what;
  return status;
}

// Runs body and maps exceptions onto status codes.
template <class Body>
mcckf_status guard(Body body) {
  try {
    body();
    return MCCKF_OK;
  } catch (const mcckf::Error& e) {
    return set_error(static_cast<mcckf_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MCCKF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MCCKF_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mcckf::Error(ErrorCode::kInvalidArgument, what);
}

template <class Writer>
void write_to(const char* path, Writer writer) {
  require(path != nullptr && *path != '\0', "output path is empty");
  if (std::string(path) == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mcckf::Error(ErrorCode::kIo, std::string("cannot open ") + path);
  writer(out);
  out.flush();
  if (!out) throw mcckf::Error(ErrorCode::kIo, std::string("write failed: ") + path);
}

std::vector<mcckf::FilterKind> parse_filter_list(const char* ids) {
  require(ids != nullptr, "filter list is null");
  std::vector<mcckf::FilterKind> kinds;
  std::stringstream ss(ids);
  std::string id;
  while (std::getline(ss, id, ',')) {
    const auto kind = mcckf::parse_filter_id(id);
    if (!kind) {
      std::string valid;
      for (mcckf::FilterKind k : mcckf::all_filters()) {
        if (!valid.empty()) valid += ", ";
        valid += mcckf::filter_id(k);
      }
      throw mcckf::Error(ErrorCode::kInvalidArgument,
                         "unknown filter '" + id + "' (valid: " + valid + ")");
    }
    kinds.push_back(*kind);
  }
  require(!kinds.empty(), "filter list is empty");
  return kinds;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* mcckf_version(void) { return "1.0.0"; }

const char* mcckf_last_error(void) { return last_error.c_str(); }

const char* mcckf_status_name(int status) {
  if (status == MCCKF_OK) return "ok";
  if (status == MCCKF_ERR_INTERNAL) return "internal error";
  if (status >= 1 && status <= 10) return mcckf::to_string(static_cast<ErrorCode>(status));
  return "unknown status";
}

size_t mcckf_filter_count(void) { return mcckf::all_filters().size(); }

const char* mcckf_filter_id(size_t index) {
  const auto all = mcckf::all_filters();
  if (index >= all.size()) return nullptr;
  return mcckf::filter_id(all[index]).data();
}

int mcckf_filter_is_valid(const char* id) {
  return id != nullptr && mcckf::parse_filter_id(id).has_value() ? 1 : 0;
}

mcckf_status mcckf_experiment_create(const char* preset, double delta, mcckf_experiment** out) {
  return guard([&] {
    require(out != nullptr, "output handle pointer is null");
    require(preset != nullptr, "preset is null");
    const std::string p = preset;
    mcckf::ExperimentConfig c;
    if (p == "example1") {
      c = mcckf::ExperimentConfig::example1();
    } else if (p == "example2") {
      c = mcckf::ExperimentConfig::example2(delta);
    } else {
      throw mcckf::Error(ErrorCode::kInvalidArgument, "preset must be example1 or example2");
    }
    c.validate();
    *out = new mcckf_experiment{std::move(c)};
  });
}

mcckf_status mcckf_experiment_load(const char* path, mcckf_experiment** out) {
  return guard([&] {
    require(out != nullptr, "output handle pointer is null");
    require(path != nullptr, "path is null");
    *out = new mcckf_experiment{mcckf::load_config(path)};
  });
}

mcckf_status mcckf_experiment_parse(const char* json, mcckf_experiment** out) {
  return guard([&] {
    require(out != nullptr, "output handle pointer is null");
    require(json != nullptr, "json is null");
    *out = new mcckf_experiment{mcckf::parse_config(json)};
  });
}

void mcckf_experiment_destroy(mcckf_experiment* exp) { delete exp; }

mcckf_status mcckf_experiment_set_filters(mcckf_experiment* exp, const char* ids) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    exp->config.filters = parse_filter_list(ids);
  });
}

mcckf_status mcckf_experiment_set_trials(mcckf_experiment* exp, long trials) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    if (trials < 1) throw mcckf::Error(ErrorCode::kConfiguration, "trials must be at least 1");
    exp->config.n_trials = trials;
  });
}

mcckf_status mcckf_experiment_set_steps(mcckf_experiment* exp, long steps) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    if (steps < 1) throw mcckf::Error(ErrorCode::kConfiguration, "steps must be at least 1");
    exp->config.n_steps = steps;
  });
}

mcckf_status mcckf_experiment_set_seed(mcckf_experiment* exp, uint64_t seed) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    exp->config.master_seed = seed;
  });
}

mcckf_status mcckf_experiment_set_threads(mcckf_experiment* exp, int threads) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    if (threads < 0) throw mcckf::Error(ErrorCode::kConfiguration, "threads must be nonnegative");
    exp->config.threads = threads;
  });
}

mcckf_status mcckf_experiment_set_kernel_fixed(mcckf_experiment* exp, double sigma) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    mcckf::KernelPolicy k = mcckf::KernelPolicy::fixed(sigma);
    k.lambda_min = exp->config.kernel.lambda_min;
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw mcckf::Error(ErrorCode::kConfiguration, "sigma must be positive");
    }
    exp->config.kernel = k;
  });
}

mcckf_status mcckf_experiment_set_kernel_adaptive(mcckf_experiment* exp, double sigma_floor) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) {
      throw mcckf::Error(ErrorCode::kConfiguration, "sigma floor must be positive");
    }
    mcckf::KernelPolicy k = mcckf::KernelPolicy::adaptive(sigma_floor);
    k.lambda_min = exp->config.kernel.lambda_min;
    exp->config.kernel = k;
  });
}

mcckf_status mcckf_experiment_set_rmse_over_survivors(mcckf_experiment* exp, int on) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    exp->config.rmse_over_survivors = on != 0;
  });
}

mcckf_status mcckf_experiment_set_delta(mcckf_experiment* exp, double delta) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw mcckf::Error(ErrorCode::kConfiguration, "delta must be positive");
    }
    if (exp->config.source != mcckf::ModelSource::kExample2) {
      mcckf::ExperimentConfig c = mcckf::ExperimentConfig::example2(delta);
      c.filters = exp->config.filters;
      c.n_steps = exp->config.n_steps;
      c.n_trials = exp->config.n_trials;
      c.master_seed = exp->config.master_seed;
      c.kernel = exp->config.kernel;
      c.rmse_over_survivors = exp->config.rmse_over_survivors;
      c.threads = exp->config.threads;
      c.deltas = exp->config.deltas;
      exp->config = c;
    }
    exp->config.delta = delta;
  });
}

mcckf_status mcckf_experiment_set_deltas(mcckf_experiment* exp, const double* deltas,
                                         size_t count) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    require(deltas != nullptr || count == 0, "deltas is null");
    std::vector<double> d(deltas, deltas + count);
    for (double x : d) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw mcckf::Error(ErrorCode::kConfiguration, "sweep deltas must be positive");
      }
    }
    for (size_t i = 1; i < d.size(); ++i) {
      if (!(d[i] < d[i - 1])) {
        throw mcckf::Error(ErrorCode::kConfiguration, "sweep deltas must be strictly descending");
      }
    }
    exp->config.deltas = std::move(d);
  });
}

size_t mcckf_experiment_state_dim(const mcckf_experiment* exp) {
  if (exp == nullptr) return 0;
  try {
    return static_cast<size_t>(exp->config.model().state_dim());
  } catch (const std::exception&) {
    return 0;
  }
}

mcckf_status mcckf_run_monte_carlo(const mcckf_experiment* exp, mcckf_rmse_report** out) {
  return guard([&] {
    require(exp != nullptr && out != nullptr, "null argument");
    auto* r = new mcckf_rmse_report{mcckf::run_monte_carlo(exp->config), exp->config, {}};
    r->table = mcckf::format_rmse_table(r->report);
    *out = r;
  });
}

void mcckf_rmse_report_destroy(mcckf_rmse_report* report) { delete report; }

size_t mcckf_rmse_report_filter_count(const mcckf_rmse_report* report) {
  return report == nullptr ? 0 : report->report.filters.size();
}

const char* mcckf_rmse_report_filter_id(const mcckf_rmse_report* report, size_t i) {
  if (report == nullptr || i >= report->report.filters.size()) return nullptr;
  return mcckf::filter_id(report->report.filters[i].kind).data();
}

double mcckf_rmse_report_norm(const mcckf_rmse_report* report, size_t i) {
  if (report == nullptr || i >= report->report.filters.size()) return kNaN;
  return report->report.filters[i].rmse_norm;
}

double mcckf_rmse_report_component(const mcckf_rmse_report* report, size_t i, size_t component) {
  if (report == nullptr || i >= report->report.filters.size()) return kNaN;
  const mcckf::Vector& r = report->report.filters[i].rmse;
  if (component >= static_cast<size_t>(r.size())) return kNaN;
  return r(static_cast<Eigen::Index>(component));
}

long mcckf_rmse_report_diverged(const mcckf_rmse_report* report, size_t i) {
  if (report == nullptr || i >= report->report.filters.size()) return -1;
  return report->report.filters[i].diverged_trials;
}

double mcckf_rmse_report_wall_seconds(const mcckf_rmse_report* report) {
  return report == nullptr ? kNaN : report->report.wall_seconds;
}

mcckf_status mcckf_rmse_report_write_csv(const mcckf_rmse_report* report, const char* path) {
  return guard([&] {
    require(report != nullptr, "report is null");
    write_to(path, [&](std::ostream& os) { mcckf::write_rmse_csv(os, report->report, report->config); });
  });
}

const char* mcckf_rmse_report_table(const mcckf_rmse_report* report) {
  return report == nullptr ? nullptr : report->table.c_str();
}

mcckf_status mcckf_run_delta_sweep(const mcckf_experiment* exp, mcckf_sweep_report** out) {
  return guard([&] {
    require(exp != nullptr && out != nullptr, "null argument");
    const std::vector<double> deltas =
        exp->config.deltas.empty() ? mcckf::default_deltas() : exp->config.deltas;
    auto* r = new mcckf_sweep_report{mcckf::run_delta_sweep(exp->config, deltas), exp->config, {}};
    r->table = mcckf::format_sweep_table(r->report);
    *out = r;
  });
}

void mcckf_sweep_report_destroy(mcckf_sweep_report* report) { delete report; }

size_t mcckf_sweep_report_delta_count(const mcckf_sweep_report* report) {
  return report == nullptr ? 0 : report->report.deltas.size();
}

size_t mcckf_sweep_report_filter_count(const mcckf_sweep_report* report) {
  return report == nullptr ? 0 : report->report.filters.size();
}

double mcckf_sweep_report_delta(const mcckf_sweep_report* report, size_t d) {
  if (report == nullptr || d >= report->report.deltas.size()) return kNaN;
  return report->report.deltas[d];
}

const char* mcckf_sweep_report_filter_id(const mcckf_sweep_report* report, size_t f) {
  if (report == nullptr || f >= report->report.filters.size()) return nullptr;
  return mcckf::filter_id(report->report.filters[f]).data();
}

int mcckf_sweep_report_cell(const mcckf_sweep_report* report, size_t d, size_t f,
                            double* rmse_norm) {
  if (report == nullptr || d >= report->report.deltas.size() ||
      f >= report->report.filters.size()) {
    if (rmse_norm != nullptr) *rmse_norm = kNaN;
    return 0;
  }
  const mcckf::SweepCell& c = report->report.cell(d, f);
  if (rmse_norm != nullptr) *rmse_norm = c.rmse_norm;
  return c.status == mcckf::CellStatus::kOk ? 1 : 0;
}

int mcckf_sweep_report_breakdown(const mcckf_sweep_report* report, size_t f) {
  if (report == nullptr || f >= report->report.filters.size()) return -1;
  return report->report.breakdown_index[f];
}

size_t mcckf_sweep_report_resurrected(const mcckf_sweep_report* report) {
  return report == nullptr ? 0 : report->report.resurrected.size();
}

double mcckf_sweep_report_wall_seconds(const mcckf_sweep_report* report) {
  return report == nullptr ? kNaN : report->report.wall_seconds;
}

mcckf_status mcckf_sweep_report_write_csv(const mcckf_sweep_report* report, const char* path) {
  return guard([&] {
    require(report != nullptr, "report is null");
    write_to(path, [&](std::ostream& os) { mcckf::write_sweep_csv(os, report->report, report->config); });
  });
}

const char* mcckf_sweep_report_table(const mcckf_sweep_report* report) {
  return report == nullptr ? nullptr : report->table.c_str();
}

mcckf_status mcckf_run_trace(const mcckf_experiment* exp, const char* filter, long trial,
                             const char* path, size_t* rows, int* diverged) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    require(filter != nullptr, "filter is null");
    require(trial >= 0, "trial must be nonnegative");
    const auto kinds = parse_filter_list(filter);
    require(kinds.size() == 1, "trace takes exactly one filter");
    const auto trace = mcckf::run_trace(exp->config, kinds.front(), trial);
    write_to(path, [&](std::ostream& os) {
      mcckf::write_trace_csv(os, trace, exp->config, kinds.front(), trial);
    });
    if (rows != nullptr) *rows = trace.size();
    if (diverged != nullptr) *diverged = !trace.empty() && trace.back().diverged ? 1 : 0;
  });
}

mcckf_status mcckf_simulate_to_csv(const mcckf_experiment* exp, long trial, const char* path) {
  return guard([&] {
    require(exp != nullptr, "experiment is null");
    require(trial >= 0, "trial must be nonnegative");
    exp->config.validate();
    const mcckf::TrialRecord rec = mcckf::simulate_trial(exp->config, trial);
    write_to(path, [&](std::ostream& os) { mcckf::write_trial_csv(os, rec, exp->config); });
  });
}

}  // extern "C"
