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

#include "mcckf/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "mcckf/error.hpp"

namespace mcckf {

namespace {

using Json = nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kConfiguration, "config: " + what);
}

void only_keys(const Json& obj, const char* section, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(std::string(section) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail("unknown key '" + key + "' in " + section);
  }
}

double number(const Json& v, const std::string& name) {
  if (!v.is_number()) fail(name + " must be a number");
  return v.get<double>();
}

long integer(const Json& v, const std::string& name) {
  if (!v.is_number_integer()) fail(name + " must be an integer");
  return v.get<long>();
}

bool boolean(const Json& v, const std::string& name) {
  if (!v.is_boolean()) fail(name + " must be true or false");
  return v.get<bool>();
}

std::string text(const Json& v, const std::string& name) {
  if (!v.is_string()) fail(name + " must be a string");
  return v.get<std::string>();
}

Matrix matrix(const Json& v, const std::string& name) {
  if (!v.is_array() || v.empty() || !v.front().is_array()) {
    fail(name + " must be a nonempty list of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(name + " has ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = number(row[static_cast<std::size_t>(j)], name);
    }
  }
  return m;
}

Vector vector(const Json& v, const std::string& name) {
  if (!v.is_array() || v.empty()) fail(name + " must be a nonempty list");
  Vector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = number(v[i], name);
  return x;
}

ExperimentConfig model_section(const Json& m) {
  only_keys(m, "model", {"source", "delta", "F", "G", "H", "Q", "R", "x0", "P0"});
  const std::string source = m.contains("source") ? text(m["source"], "model.source") : "example1";
  ExperimentConfig c;
  if (source == "example1") {
    c = ExperimentConfig::example1();
  } else if (source == "example2") {
    c = ExperimentConfig::example2(m.contains("delta") ? number(m["delta"], "model.delta") : 1e-2);
  } else if (source == "custom") {
    c.source = ModelSource::kCustom;
    c.covariances = CovarianceSource::kTrue;
    for (const char* key : {"F", "H", "Q", "R", "x0", "P0"}) {
      if (!m.contains(key)) fail(std::string("custom model needs model.") + key);
    }
    StateSpaceModel& s = c.custom;
    s.f = matrix(m["F"], "model.F");
    s.g = m.contains("G") ? matrix(m["G"], "model.G") : Matrix::Identity(s.f.rows(), s.f.rows());
    s.h = matrix(m["H"], "model.H");
    s.q_cov = matrix(m["Q"], "model.Q");
    s.r_cov = matrix(m["R"], "model.R");
    s.x0_mean = vector(m["x0"], "model.x0");
    s.pi0 = matrix(m["P0"], "model.P0");
  } else {
    fail("model.source must be example1, example2 or custom");
  }
  if (source != "example2" && m.contains("delta")) fail("model.delta only applies to example2");
  if (source != "custom") {
    for (const char* key : {"F", "G", "H", "Q", "R", "x0", "P0"}) {
      if (m.contains(key)) fail(std::string("model.") + key + " only applies to a custom model");
    }
  }
  return c;
}

void shot_section(const Json& s, ShotNoiseConfig& shot) {
  only_keys(s, "shot", {"enabled", "fraction", "protected_prefix", "protected_suffix",
                        "magnitude_low", "magnitude_high", "process", "measurement"});
  if (s.contains("enabled")) shot.enabled = boolean(s["enabled"], "shot.enabled");
  if (s.contains("fraction")) shot.fraction_corrupted = number(s["fraction"], "shot.fraction");
  if (s.contains("protected_prefix")) {
    shot.protected_prefix = static_cast<int>(integer(s["protected_prefix"], "shot.protected_prefix"));
  }
  if (s.contains("protected_suffix")) {
    shot.protected_suffix = static_cast<int>(integer(s["protected_suffix"], "shot.protected_suffix"));
  }
  if (s.contains("magnitude_low")) shot.magnitude_low = integer(s["magnitude_low"], "shot.magnitude_low");
  if (s.contains("magnitude_high")) {
    shot.magnitude_high = integer(s["magnitude_high"], "shot.magnitude_high");
  }
  if (s.contains("process")) shot.corrupt_process = boolean(s["process"], "shot.process");
  if (s.contains("measurement")) {
    shot.corrupt_measurement = boolean(s["measurement"], "shot.measurement");
  }
}

void kernel_section(const Json& k, KernelPolicy& kernel) {
  only_keys(k, "kernel", {"mode", "sigma", "sigma_floor", "lambda_min"});
  if (k.contains("mode")) {
    const std::string mode = text(k["mode"], "kernel.mode");
    if (mode == "adaptive") {
      kernel.mode = KernelPolicy::Mode::kAdaptive;
    } else if (mode == "fixed") {
      kernel.mode = KernelPolicy::Mode::kFixed;
    } else {
      fail("kernel.mode must be adaptive or fixed");
    }
  }
  if (k.contains("sigma")) kernel.sigma_fixed = number(k["sigma"], "kernel.sigma");
  if (k.contains("sigma_floor")) kernel.sigma_floor = number(k["sigma_floor"], "kernel.sigma_floor");
  if (k.contains("lambda_min")) kernel.lambda_min = number(k["lambda_min"], "kernel.lambda_min");
}

std::uint64_t seed_value(const Json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      const unsigned long long x = std::stoull(s, &used, 0);
      if (used == s.size() && !s.empty() && s[0] != '-') return x;
    } catch (const std::exception&) {
    }
  }
  fail("experiment.seed must be a nonnegative integer");
}

void experiment_section(const Json& e, ExperimentConfig& c) {
  only_keys(e, "experiment", {"filters", "steps", "trials", "seed", "covariances",
                              "rmse_over_survivors", "threads", "first_trial", "deltas"});
  if (e.contains("filters")) {
    const Json& f = e["filters"];
    if (!f.is_array() || f.empty()) fail("experiment.filters must be a nonempty list");
    c.filters.clear();
    for (const Json& id : f) {
      const std::string name = text(id, "experiment.filters");
      const auto kind = parse_filter_id(name);
      if (!kind) fail("unknown filter '" + name + "'");
      c.filters.push_back(*kind);
    }
  }
  if (e.contains("steps")) c.n_steps = integer(e["steps"], "experiment.steps");
  if (e.contains("trials")) c.n_trials = integer(e["trials"], "experiment.trials");
  if (e.contains("seed")) c.master_seed = seed_value(e["seed"]);
  if (e.contains("covariances")) {
    const std::string s = text(e["covariances"], "experiment.covariances");
    if (s == "sample") {
      c.covariances = CovarianceSource::kSample;
    } else if (s == "sample_q_only") {
      c.covariances = CovarianceSource::kSampleQOnly;
    } else if (s == "true") {
      c.covariances = CovarianceSource::kTrue;
    } else {
      fail("experiment.covariances must be sample, sample_q_only or true");
    }
  }
  if (e.contains("rmse_over_survivors")) {
    c.rmse_over_survivors = boolean(e["rmse_over_survivors"], "experiment.rmse_over_survivors");
  }
  if (e.contains("threads")) c.threads = static_cast<int>(integer(e["threads"], "experiment.threads"));
  if (e.contains("first_trial")) c.first_trial = integer(e["first_trial"], "experiment.first_trial");
  if (e.contains("deltas")) {
    const Vector d = vector(e["deltas"], "experiment.deltas");
    c.deltas.assign(d.data(), d.data() + d.size());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(root, "top level", {"model", "shot", "kernel", "experiment"});
  ExperimentConfig c = model_section(root.contains("model") ? root["model"] : Json::object());
  if (root.contains("shot")) shot_section(root["shot"], c.shot);
  if (root.contains("kernel")) kernel_section(root["kernel"], c.kernel);
  if (root.contains("experiment")) experiment_section(root["experiment"], c);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mcckf
