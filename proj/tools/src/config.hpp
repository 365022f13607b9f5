// Copyright 2026 The ksmooth Authors
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


#ifndef KSMOOTH_TOOLS_CONFIG_HPP_
#define KSMOOTH_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ksmooth/experiments.hpp"

namespace ksmooth::cli {

// Every violation found while reading a configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

class IOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  int max_iter = 100;       // Gauss-Newton outer iterations
  double tol = -1.0;        // Gauss-Newton stopping tolerance; <= 0 is relative
  int ip_max_iter = 100;
  double kkt_tol = 1e-10;
};

struct SparseConfig {
  std::vector<int> components{0};
  double weight = 1.0;
  double lambda = 1.0;
  double tau = 1.0;
};

struct BenchConfig {
  int n = 3;
  std::vector<int> sizes{1000, 2000, 4000};
  int repeats = 20;
};

struct RunConfig {
  std::string command;
  std::string scenario;
  ScenarioParams params;
  std::string method;
  std::string process_penalty = "l2";
  std::string measurement_penalty = "l2";
  SparseConfig sparse;
  SolverConfig solver;
  std::string output_dir;
  std::uint64_t seed = 1;
  int reps = 100;
  double scale = 1.0;
  int threads = 1;
  std::vector<Cell> cells;  // empty selects the experiment's default grid
  VapnikCVSpec cv = vapnik_desk_spec();
  BenchConfig bench;
  bool plots = true;
};

std::vector<std::string> commands();
// Methods accepted by `smooth`.
std::vector<std::string> smooth_methods();
std::vector<std::string> table_scenarios();

// Structural validation of a JSON document. Returns every violation; an
// empty list means `out` has been filled in.
std::vector<std::string> read_config(const nlohmann::json& doc, RunConfig& out);

// read_config that throws ConfigError on any violation.
RunConfig parse_config(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);

// Output directory: explicit value, then $KSMOOTH_OUTPUT_DIR, then "ksmooth-out".
std::string default_output_dir();

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace ksmooth::cli

#endif  // KSMOOTH_TOOLS_CONFIG_HPP_
