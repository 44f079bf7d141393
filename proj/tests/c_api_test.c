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

/* Exercises the shared library through its C interface only. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mcckf/mcckf.h"

static int failures = 0;

#define CHECK(cond)                                                      \
  do {                                                                   \
    if (!(cond)) {                                                       \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                        \
    }                                                                    \
  } while (0)

static void test_registry(void) {
  size_t i;
  CHECK(strlen(mcckf_version()) > 0);
  CHECK(mcckf_filter_count() == 10);
  for (i = 0; i < mcckf_filter_count(); ++i) CHECK(mcckf_filter_is_valid(mcckf_filter_id(i)));
  CHECK(mcckf_filter_id(99) == NULL);
  CHECK(!mcckf_filter_is_valid("nosuch"));
  CHECK(!mcckf_filter_is_valid(NULL));
  CHECK(strcmp(mcckf_status_name(MCCKF_OK), "ok") == 0);
  CHECK(strcmp(mcckf_status_name(12345), "unknown status") == 0);
}

static void test_errors(void) {
  mcckf_experiment* exp = NULL;
  CHECK(mcckf_experiment_create("example9", 0.0, &exp) == MCCKF_ERR_INVALID_ARGUMENT);
  CHECK(exp == NULL);
  CHECK(strlen(mcckf_last_error()) > 0);
  CHECK(mcckf_experiment_create("example1", 0.0, NULL) == MCCKF_ERR_INVALID_ARGUMENT);
  CHECK(mcckf_experiment_create("example2", -1.0, &exp) == MCCKF_ERR_CONFIGURATION);
  CHECK(mcckf_experiment_parse("{\"bogus\": 1}", &exp) == MCCKF_ERR_CONFIGURATION);
  CHECK(mcckf_experiment_load("/nonexistent/config.json", &exp) == MCCKF_ERR_IO);

  CHECK(mcckf_experiment_create("example1", 0.0, &exp) == MCCKF_OK);
  CHECK(mcckf_experiment_set_filters(exp, "mcckf,nosuch") == MCCKF_ERR_INVALID_ARGUMENT);
  CHECK(strstr(mcckf_last_error(), "rsvd-mcckf") != NULL);
  CHECK(mcckf_experiment_set_trials(exp, 0) == MCCKF_ERR_CONFIGURATION);
  CHECK(mcckf_experiment_set_kernel_fixed(exp, -2.0) == MCCKF_ERR_CONFIGURATION);
  {
    const double bad[2] = {1e-3, 1e-2};
    CHECK(mcckf_experiment_set_deltas(exp, bad, 2) == MCCKF_ERR_CONFIGURATION);
  }
  mcckf_experiment_destroy(exp);
  mcckf_experiment_destroy(NULL);
}

static void test_monte_carlo(void) {
  mcckf_experiment* exp = NULL;
  mcckf_rmse_report* a = NULL;
  mcckf_rmse_report* b = NULL;
  size_t i;
  CHECK(mcckf_experiment_create("example1", 0.0, &exp) == MCCKF_OK);
  CHECK(mcckf_experiment_state_dim(exp) == 3);
  CHECK(mcckf_experiment_set_trials(exp, 4) == MCCKF_OK);
  CHECK(mcckf_experiment_set_steps(exp, 60) == MCCKF_OK);
  CHECK(mcckf_experiment_set_seed(exp, 5) == MCCKF_OK);
  CHECK(mcckf_run_monte_carlo(exp, &a) == MCCKF_OK);
  CHECK(mcckf_experiment_set_threads(exp, 4) == MCCKF_OK);
  CHECK(mcckf_run_monte_carlo(exp, &b) == MCCKF_OK);
  CHECK(mcckf_rmse_report_filter_count(a) == 9);
  for (i = 0; i < 9; ++i) {
    const double n = mcckf_rmse_report_norm(a, i);
    const double c0 = mcckf_rmse_report_component(a, i, 0);
    const double c1 = mcckf_rmse_report_component(a, i, 1);
    const double c2 = mcckf_rmse_report_component(a, i, 2);
    CHECK(isfinite(n));
    CHECK(fabs(n - sqrt(c0 * c0 + c1 * c1 + c2 * c2)) <= 1e-12 * n);
    CHECK(n == mcckf_rmse_report_norm(b, i));
    CHECK(mcckf_rmse_report_diverged(a, i) == 0);
    CHECK(strcmp(mcckf_rmse_report_filter_id(a, i), mcckf_filter_id(i)) == 0);
  }
  CHECK(isnan(mcckf_rmse_report_component(a, 0, 3)));
  CHECK(strstr(mcckf_rmse_report_table(a), "ud-imcckf") != NULL);
  mcckf_rmse_report_destroy(a);
  mcckf_rmse_report_destroy(b);
  mcckf_experiment_destroy(exp);
}

static void test_sweep_and_trace(const char* dir) {
  mcckf_experiment* exp = NULL;
  mcckf_sweep_report* s = NULL;
  const double deltas[2] = {1e-2, 1e-12};
  char path[4096];
  size_t rows = 0;
  int diverged = -1;
  double v = 0.0;
  CHECK(mcckf_experiment_create("example2", 1e-2, &exp) == MCCKF_OK);
  CHECK(mcckf_experiment_set_trials(exp, 2) == MCCKF_OK);
  CHECK(mcckf_experiment_set_steps(exp, 80) == MCCKF_OK);
  CHECK(mcckf_experiment_set_filters(exp, "mcckf,rsvd-mcckf") == MCCKF_OK);
  CHECK(mcckf_experiment_set_deltas(exp, deltas, 2) == MCCKF_OK);
  CHECK(mcckf_run_delta_sweep(exp, &s) == MCCKF_OK);
  CHECK(mcckf_sweep_report_delta_count(s) == 2);
  CHECK(mcckf_sweep_report_filter_count(s) == 2);
  CHECK(mcckf_sweep_report_delta(s, 1) == 1e-12);
  CHECK(strcmp(mcckf_sweep_report_filter_id(s, 1), "rsvd-mcckf") == 0);
  CHECK(mcckf_sweep_report_cell(s, 0, 0, &v) == 1);
  CHECK(isfinite(v));
  CHECK(mcckf_sweep_report_cell(s, 1, 0, NULL) == 0);
  CHECK(mcckf_sweep_report_cell(s, 1, 1, &v) == 1);
  CHECK(mcckf_sweep_report_breakdown(s, 0) == 1);
  CHECK(mcckf_sweep_report_breakdown(s, 1) == -1);
  snprintf(path, sizeof path, "%s/c_api_sweep.csv", dir);
  CHECK(mcckf_sweep_report_write_csv(s, path) == MCCKF_OK);
  CHECK(mcckf_sweep_report_write_csv(s, "/nonexistent/dir/x.csv") == MCCKF_ERR_IO);
  mcckf_sweep_report_destroy(s);

  CHECK(mcckf_experiment_set_delta(exp, 1e-9) == MCCKF_OK);
  CHECK(mcckf_experiment_set_steps(exp, 300) == MCCKF_OK);
  snprintf(path, sizeof path, "%s/c_api_trace.csv", dir);
  CHECK(mcckf_run_trace(exp, "svd-mcckf", 0, path, &rows, &diverged) == MCCKF_OK);
  CHECK(diverged == 1);
  CHECK(rows > 0 && rows < 300);
  CHECK(mcckf_run_trace(exp, "nosuch", 0, path, NULL, NULL) == MCCKF_ERR_INVALID_ARGUMENT);
  snprintf(path, sizeof path, "%s/c_api_trial.csv", dir);
  CHECK(mcckf_simulate_to_csv(exp, 0, path) == MCCKF_OK);
  mcckf_experiment_destroy(exp);
}

int main(int argc, char** argv) {
  test_registry();
  test_errors();
  test_monte_carlo();
  test_sweep_and_trace(argc > 1 ? argv[1] : ".");
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("c api: all checks passed\n");
  return 0;
}
