/* Copyright 2026 The mcckf Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the mcckf library.
 *
 * Objects are opaque handles created by mcckf_*_create / mcckf_run_* and
 * released with the matching *_destroy. Every fallible call returns an
 * mcckf_status; on failure mcckf_last_error() describes the problem (the
 * message is per thread and stays valid until the next failing call on that
 * thread). Filter divergence is reported as data, never as an error status.
 */

#ifndef MCCKF_H
#define MCCKF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCCKF_BUILDING)
#    define MCCKF_API __declspec(dllexport)
#  else
#    define MCCKF_API __declspec(dllimport)
#  endif
#else
#  define MCCKF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcckf_status {
  MCCKF_OK = 0,
  MCCKF_ERR_INVALID_ARGUMENT = 1,
  MCCKF_ERR_INVALID_WEIGHT = 2,
  MCCKF_ERR_DECOMPOSITION = 3,
  MCCKF_ERR_SINGULAR_FACTOR = 4,
  MCCKF_ERR_DOMAIN = 5,
  MCCKF_ERR_WEIGHTING = 6,
  MCCKF_ERR_CONFIGURATION = 7,
  MCCKF_ERR_INSUFFICIENT_DATA = 8,
  MCCKF_ERR_EMPTY_RESULT = 9,
  MCCKF_ERR_IO = 10,
  MCCKF_ERR_INTERNAL = 99
} mcckf_status;

typedef struct mcckf_experiment mcckf_experiment;
typedef struct mcckf_rmse_report mcckf_rmse_report;
typedef struct mcckf_sweep_report mcckf_sweep_report;

MCCKF_API const char* mcckf_version(void);
MCCKF_API const char* mcckf_last_error(void);
MCCKF_API const char* mcckf_status_name(int status);

/* Filter identifiers: the nine correntropy filters followed by "kf". */
MCCKF_API size_t mcckf_filter_count(void);
MCCKF_API const char* mcckf_filter_id(size_t index);
MCCKF_API int mcckf_filter_is_valid(const char* id);

/* Experiments. preset is "example1" or "example2"; delta is ignored for
 * example1. Presets use an adaptive kernel. */
MCCKF_API mcckf_status mcckf_experiment_create(const char* preset, double delta,
                                               mcckf_experiment** out);
MCCKF_API mcckf_status mcckf_experiment_load(const char* path, mcckf_experiment** out);
MCCKF_API mcckf_status mcckf_experiment_parse(const char* json, mcckf_experiment** out);
MCCKF_API void mcckf_experiment_destroy(mcckf_experiment* exp);

/* Comma-separated identifiers, e.g. "mcckf,imcckf". */
MCCKF_API mcckf_status mcckf_experiment_set_filters(mcckf_experiment* exp, const char* ids);
MCCKF_API mcckf_status mcckf_experiment_set_trials(mcckf_experiment* exp, long trials);
MCCKF_API mcckf_status mcckf_experiment_set_steps(mcckf_experiment* exp, long steps);
MCCKF_API mcckf_status mcckf_experiment_set_seed(mcckf_experiment* exp, uint64_t seed);
MCCKF_API mcckf_status mcckf_experiment_set_threads(mcckf_experiment* exp, int threads);
MCCKF_API mcckf_status mcckf_experiment_set_kernel_fixed(mcckf_experiment* exp, double sigma);
MCCKF_API mcckf_status mcckf_experiment_set_kernel_adaptive(mcckf_experiment* exp,
                                                            double sigma_floor);
MCCKF_API mcckf_status mcckf_experiment_set_rmse_over_survivors(mcckf_experiment* exp, int on);
/* Switches the model to example2 with the given delta. */
MCCKF_API mcckf_status mcckf_experiment_set_delta(mcckf_experiment* exp, double delta);
MCCKF_API mcckf_status mcckf_experiment_set_deltas(mcckf_experiment* exp, const double* deltas,
                                                   size_t count);
MCCKF_API size_t mcckf_experiment_state_dim(const mcckf_experiment* exp);

/* Monte-Carlo RMSE. */
MCCKF_API mcckf_status mcckf_run_monte_carlo(const mcckf_experiment* exp,
                                             mcckf_rmse_report** out);
MCCKF_API void mcckf_rmse_report_destroy(mcckf_rmse_report* report);
MCCKF_API size_t mcckf_rmse_report_filter_count(const mcckf_rmse_report* report);
MCCKF_API const char* mcckf_rmse_report_filter_id(const mcckf_rmse_report* report, size_t i);
/* Non-finite values come back as NaN. */
MCCKF_API double mcckf_rmse_report_norm(const mcckf_rmse_report* report, size_t i);
MCCKF_API double mcckf_rmse_report_component(const mcckf_rmse_report* report, size_t i,
                                             size_t component);
MCCKF_API long mcckf_rmse_report_diverged(const mcckf_rmse_report* report, size_t i);
MCCKF_API double mcckf_rmse_report_wall_seconds(const mcckf_rmse_report* report);
/* path "-" writes to standard output. */
MCCKF_API mcckf_status mcckf_rmse_report_write_csv(const mcckf_rmse_report* report,
                                                   const char* path);
/* Owned by the report. */
MCCKF_API const char* mcckf_rmse_report_table(const mcckf_rmse_report* report);

/* Ill-conditioning sweep over the experiment's deltas (default 1e-1..1e-15). */
MCCKF_API mcckf_status mcckf_run_delta_sweep(const mcckf_experiment* exp,
                                             mcckf_sweep_report** out);
MCCKF_API void mcckf_sweep_report_destroy(mcckf_sweep_report* report);
MCCKF_API size_t mcckf_sweep_report_delta_count(const mcckf_sweep_report* report);
MCCKF_API size_t mcckf_sweep_report_filter_count(const mcckf_sweep_report* report);
MCCKF_API double mcckf_sweep_report_delta(const mcckf_sweep_report* report, size_t d);
MCCKF_API const char* mcckf_sweep_report_filter_id(const mcckf_sweep_report* report, size_t f);
/* Returns 1 when the cell is finite, 0 when non-finite; *rmse_norm may be NULL. */
MCCKF_API int mcckf_sweep_report_cell(const mcckf_sweep_report* report, size_t d, size_t f,
                                      double* rmse_norm);
/* Index of the first failing delta for filter f, or -1. */
MCCKF_API int mcckf_sweep_report_breakdown(const mcckf_sweep_report* report, size_t f);
/* Number of filters that were finite again after failing. */
MCCKF_API size_t mcckf_sweep_report_resurrected(const mcckf_sweep_report* report);
MCCKF_API double mcckf_sweep_report_wall_seconds(const mcckf_sweep_report* report);
MCCKF_API mcckf_status mcckf_sweep_report_write_csv(const mcckf_sweep_report* report,
                                                    const char* path);
MCCKF_API const char* mcckf_sweep_report_table(const mcckf_sweep_report* report);

/* Single trial, single filter, per-step trace CSV. rows and diverged may be
 * NULL. */
MCCKF_API mcckf_status mcckf_run_trace(const mcckf_experiment* exp, const char* filter,
                                       long trial, const char* path, size_t* rows,
                                       int* diverged);

/* Writes the simulated truth and measurements of one trial. */
MCCKF_API mcckf_status mcckf_simulate_to_csv(const mcckf_experiment* exp, long trial,
                                             const char* path);

#ifdef __cplusplus
}
#endif

#endif /* MCCKF_H */
