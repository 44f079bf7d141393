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

// JSON experiment configuration.
//
//   {
//     "model":      {"source": "example1" | "example2" | "custom", "delta": 1e-2,
//                    "F": [[...]], "G": [[...]], "H": [[...]], "Q": [[...]], "R": [[...]],
//                    "x0": [...], "P0": [[...]]},
//     "shot":       {"enabled": true, "fraction": 0.1, "protected_prefix": 10,
//                    "protected_suffix": 1, "magnitude_low": 0, "magnitude_high": 3,
//                    "process": true, "measurement": true},
//     "kernel":     {"mode": "adaptive" | "fixed", "sigma": 10, "sigma_floor": 1e-6,
//                    "lambda_min": 1e-12},
//     "experiment": {"filters": ["mcckf", ...], "steps": 300, "trials": 500, "seed": 1,
//                    "covariances": "sample" | "sample_q_only" | "true",
//                    "rmse_over_survivors": false, "threads": 1, "first_trial": 0,
//                    "deltas": [1e-1, ...]}
//   }
//
// Matrices are row-major nested lists. Every section and key is optional
// except the custom model's matrices. Unknown keys are rejected.

#ifndef MCCKF_CONFIG_HPP
#define MCCKF_CONFIG_HPP

#include <string>

#include "mcckf/harness.hpp"

namespace mcckf {

/// Throws kConfiguration on malformed JSON, unknown keys or invalid values.
ExperimentConfig parse_config(const std::string& json_text);

/// Throws kIo when the file cannot be read, otherwise as parse_config.
ExperimentConfig load_config(const std::string& path);

}  // namespace mcckf

#endif  // MCCKF_CONFIG_HPP
