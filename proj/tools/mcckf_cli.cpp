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

// mcckf command-line driver. Talks to the library through the C API only.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcckf/mcckf.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown to unwind with a specific exit status.
struct Exit {
  int code;
};

struct Options {
  std::string config;
  std::string model;
  std::string filters;
  std::string filter;
  std::optional<long> trials;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  bool adaptive = false;
  std::optional<double> delta;
  std::vector<double> deltas;
  std::string out;
  bool over_survivors = false;
  std::optional<int> threads;
  long trial = 0;
};

void check(mcckf_status status, const char* context) {
  if (status == MCCKF_OK) return;
  std::cerr << "mcckf: " << context << ": " << mcckf_last_error() << "\n";
  const bool usage = status == MCCKF_ERR_CONFIGURATION || status == MCCKF_ERR_INVALID_ARGUMENT;
  throw Exit{usage ? kExitUsage : kExitRuntime};
}

class Experiment {
 public:
  Experiment() = default;
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;
  ~Experiment() { mcckf_experiment_destroy(handle_); }
  mcckf_experiment** out() { return &handle_; }
  mcckf_experiment* get() const { return handle_; }

 private:
  mcckf_experiment* handle_ = nullptr;
};

std::string output_dir(const Options& o) {
  std::string dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv("MCCKF_OUT_DIR");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    std::cerr << "mcckf: output directory " << dir << " is not usable\n";
    throw Exit{kExitRuntime};
  }
  return dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const char* text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr || std::fputs(text, f) < 0 || std::fclose(f) != 0) {
    std::cerr << "mcckf: cannot write " << path << "\n";
    throw Exit{kExitRuntime};
  }
}

// Builds the experiment from --config or a preset, then applies overrides.
void make_experiment(Experiment& exp, const Options& o, const char* preset) {
  if (!o.config.empty()) {
    check(mcckf_experiment_load(o.config.c_str(), exp.out()), "loading config");
  } else {
    std::string p = preset != nullptr ? preset : o.model;
    if (p.empty()) {
      std::cerr << "mcckf: a model is required (--config <path> or --model example1|example2)\n";
      throw Exit{kExitUsage};
    }
    const double delta = o.delta.value_or(1e-2);
    check(mcckf_experiment_create(p.c_str(), delta, exp.out()), "creating experiment");
  }
  mcckf_experiment* e = exp.get();
  if (o.delta) check(mcckf_experiment_set_delta(e, *o.delta), "--delta");
  if (!o.filters.empty()) check(mcckf_experiment_set_filters(e, o.filters.c_str()), "--filters");
  if (o.trials) check(mcckf_experiment_set_trials(e, *o.trials), "--trials");
  if (o.steps) check(mcckf_experiment_set_steps(e, *o.steps), "--steps");
  if (o.seed) check(mcckf_experiment_set_seed(e, *o.seed), "--seed");
  if (o.sigma) check(mcckf_experiment_set_kernel_fixed(e, *o.sigma), "--sigma");
  if (o.adaptive) check(mcckf_experiment_set_kernel_adaptive(e, 1e-6), "--adaptive");
  if (o.over_survivors) check(mcckf_experiment_set_rmse_over_survivors(e, 1), "--rmse-over-survivors");
  if (o.threads) check(mcckf_experiment_set_threads(e, *o.threads), "--threads");
  if (!o.deltas.empty()) {
    check(mcckf_experiment_set_deltas(e, o.deltas.data(), o.deltas.size()), "--deltas");
  }
}

int cmd_list_filters() {
  for (size_t i = 0; i < mcckf_filter_count(); ++i) std::cout << mcckf_filter_id(i) << "\n";
  return 0;
}

int cmd_monte_carlo(const Options& o, const char* preset, const char* stem) {
  Experiment exp;
  make_experiment(exp, o, preset);
  const std::string dir = output_dir(o);
  mcckf_rmse_report* report = nullptr;
  check(mcckf_run_monte_carlo(exp.get(), &report), "running experiment");
  const std::string csv = join(dir, std::string(stem) + "_rmse.csv");
  const std::string txt = join(dir, std::string(stem) + "_table.txt");
  const mcckf_status st = mcckf_rmse_report_write_csv(report, csv.c_str());
  const std::string table = mcckf_rmse_report_table(report);
  const double wall = mcckf_rmse_report_wall_seconds(report);
  mcckf_rmse_report_destroy(report);
  check(st, "writing CSV");
  write_text(txt, table.c_str());
  std::cout << table;
  std::fprintf(stdout, "wall time %.2f s\nwrote %s\nwrote %s\n", wall, csv.c_str(), txt.c_str());
  return 0;
}

int cmd_sweep(const Options& o) {
  Experiment exp;
  make_experiment(exp, o, o.config.empty() ? "example2" : nullptr);
  const std::string dir = output_dir(o);
  mcckf_sweep_report* report = nullptr;
  check(mcckf_run_delta_sweep(exp.get(), &report), "running sweep");
  const std::string csv = join(dir, "sweep.csv");
  const std::string txt = join(dir, "sweep_table.txt");
  const mcckf_status st = mcckf_sweep_report_write_csv(report, csv.c_str());
  const std::string table = mcckf_sweep_report_table(report);
  const size_t resurrected = mcckf_sweep_report_resurrected(report);
  const double wall = mcckf_sweep_report_wall_seconds(report);
  mcckf_sweep_report_destroy(report);
  check(st, "writing CSV");
  write_text(txt, table.c_str());
  std::cout << table;
  if (resurrected > 0) {
    std::cout << "note: " << resurrected
              << " filter(s) were finite again at a smaller delta after failing\n";
  }
  std::fprintf(stdout, "wall time %.2f s\nwrote %s\nwrote %s\n", wall, csv.c_str(), txt.c_str());
  return 0;
}

int cmd_run(const Options& o) {
  Experiment exp;
  make_experiment(exp, o, nullptr);
  if (o.filter.empty()) {
    std::cerr << "mcckf: run needs --filter <id>\n";
    throw Exit{kExitUsage};
  }
  const std::string dir = output_dir(o);
  const std::string csv = join(dir, "trace_" + o.filter + ".csv");
  size_t rows = 0;
  int diverged = 0;
  check(mcckf_run_trace(exp.get(), o.filter.c_str(), o.trial, csv.c_str(), &rows, &diverged),
        "running filter");
  std::cout << rows << " steps" << (diverged != 0 ? ", diverged at the last one" : "") << "\nwrote "
            << csv << "\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  Experiment exp;
  make_experiment(exp, o, nullptr);
  const std::string dir = output_dir(o);
  const std::string csv = join(dir, "trial_" + std::to_string(o.trial) + ".csv");
  check(mcckf_simulate_to_csv(exp.get(), o.trial, csv.c_str()), "simulating");
  std::cout << "wrote " << csv << "\n";
  return 0;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON experiment configuration");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--steps", o.steps, "time steps per trial (N)");
  app->add_option("--out", o.out, "output directory (default $MCCKF_OUT_DIR or .)");
  auto* sigma = app->add_option("--sigma", o.sigma, "fixed kernel size");
  auto* adaptive = app->add_flag("--adaptive", o.adaptive, "adaptive kernel size");
  sigma->excludes(adaptive);
}

void add_experiment(CLI::App* app, Options& o) {
  add_common(app, o);
  app->add_option("--filters", o.filters, "comma-separated filter identifiers");
  app->add_option("--trials", o.trials, "Monte-Carlo trials (M)");
  app->add_flag("--rmse-over-survivors", o.over_survivors,
                "average RMSE over non-diverged trials instead of reporting NaN");
  app->add_option("--threads", o.threads, "worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-correntropy Kalman filter experiments"};
  app.require_subcommand(1);
  Options o;

  auto* list = app.add_subcommand("list-filters", "print the filter identifiers");

  auto* simulate = app.add_subcommand("simulate", "simulate one trial to CSV");
  add_common(simulate, o);
  simulate->add_option("--model", o.model, "example1 or example2");
  simulate->add_option("--delta", o.delta, "example2 ill-conditioning parameter");
  simulate->add_option("--trial", o.trial, "trial index")->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "single trial, single filter, per-step trace");
  add_common(run, o);
  run->add_option("--model", o.model, "example1 or example2");
  run->add_option("--delta", o.delta, "example2 ill-conditioning parameter");
  run->add_option("--filter", o.filter, "filter identifier")->required();
  run->add_option("--trial", o.trial, "trial index")->check(CLI::NonNegativeNumber);

  auto* ex1 = app.add_subcommand("example1", "Monte-Carlo RMSE on the shot-noise example");
  add_experiment(ex1, o);

  auto* ex2 = app.add_subcommand("example2", "Monte-Carlo RMSE on the ill-conditioned example");
  add_experiment(ex2, o);
  ex2->add_option("--delta", o.delta, "ill-conditioning parameter");

  auto* sweep = app.add_subcommand("sweep", "ill-conditioning sweep over delta");
  add_experiment(sweep, o);
  sweep->add_option("--deltas", o.deltas, "comma-separated descending deltas")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list_filters();
    if (simulate->parsed()) return cmd_simulate(o);
    if (run->parsed()) return cmd_run(o);
    if (ex1->parsed()) return cmd_monte_carlo(o, o.config.empty() ? "example1" : nullptr, "example1");
    if (ex2->parsed()) return cmd_monte_carlo(o, o.config.empty() ? "example2" : nullptr, "example2");
    if (sweep->parsed()) return cmd_sweep(o);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitUsage;
}
