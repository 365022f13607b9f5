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


#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "ksmooth/errors.hpp"
#include "ksmooth/plq.hpp"

namespace ksmooth::cli {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Methods that need an affine model.
const std::vector<std::string> kLinearOnly = {"linear", "filter", "outlier-removal", "plq",
                                              "sparse", "lasso"};

const std::vector<std::string> kVarianceParams = {"sigma2", "R", "truth_var", "phi",
                                                  "base_var", "initial_var"};

// Collects errors while reading typed fields out of one JSON object.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

  bool has(const std::string& key) const { return obj_.contains(key); }

  void number(const std::string& key, double& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) return error(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) return error(key, "must be finite");
    out = d;
  }

  void integer(const std::string& key, int& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) return error(key, "must be an integer");
    out = v.get<int>();
  }

  void seed(const std::string& key, std::uint64_t& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      return error(key, "must be a nonnegative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void string(const std::string& key, std::string& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) return error(key, "must be a string");
    out = v.get<std::string>();
  }

  void boolean(const std::string& key, bool& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) return error(key, "must be true or false");
    out = v.get<bool>();
  }

  void int_list(const std::string& key, std::vector<int>& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) return error(key, "must be an array of integers");
    std::vector<int> tmp;
    for (const json& e : v) {
      if (!e.is_number_integer()) return error(key, "must be an array of integers");
      tmp.push_back(e.get<int>());
    }
    out = std::move(tmp);
  }

  // Returns the sub-object for `key`, or null when absent or not an object.
  const json* object(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return nullptr;
    const json& v = obj_.at(key);
    if (!v.is_object()) {
      error(key, "must be an object");
      return nullptr;
    }
    return &v;
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void reject_unknown() {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) errors_.push_back("unknown key '" + name(key) + "'");
    }
  }

  std::string name(const std::string& key) const { return prefix_ + key; }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back("'" + name(key) + "' " + msg);
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void check_positive(std::vector<std::string>& errors, const std::string& name, double v) {
  if (!(v > 0.0)) errors.push_back("'" + name + "' must be positive");
}

void read_scenario_params(const json& obj, const std::string& scenario,
                          const std::vector<std::string>& allowed, ScenarioParams& out,
                          std::vector<std::string>& errors) {
  for (const auto& [key, value] : obj.items()) {
    const std::string name = "params." + key;
    if (!contains(allowed, key)) {
      errors.push_back("unknown key '" + name + "' for scenario '" + scenario +
                       "' (accepted: " + join(allowed) + ")");
      continue;
    }
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      errors.push_back("'" + name + "' must be a finite number");
      continue;
    }
    const double v = value.get<double>();
    if (contains(kVarianceParams, key) && !(v > 0.0)) {
      errors.push_back("'" + name + "' is a variance and must be positive");
      continue;
    }
    if (key == "N" && !(v >= 1.0 && v == std::floor(v))) {
      errors.push_back("'" + name + "' must be a positive integer");
      continue;
    }
    if (key == "p" && !(v >= 0.0 && v <= 1.0)) {
      errors.push_back("'" + name + "' must lie in [0, 1]");
      continue;
    }
    if ((key == "horizon" || key == "mu") && !(v > 0.0)) {
      errors.push_back("'" + name + "' must be positive");
      continue;
    }
    out[key] = v;
  }
}

std::vector<std::string> table_params(const std::string& scenario) {
  if (scenario == "robust-linear") return {"N", "horizon", "sigma2", "R", "base_var", "initial_var"};
  return {"N", "horizon", "mu", "R", "truth_var"};
}

bool scenario_is_linear(const std::string& name) {
  return name == "sine" || name == "robust-linear" || name == "box-sine" ||
         name == "variable-box";
}

bool scenario_has_constraints(const std::string& name) {
  return name == "box-sine" || name == "variable-box" || name == "ship";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid configuration"
                                        : "invalid configuration: " + errors.front()),
      errors_(std::move(errors)) {}

std::vector<std::string> commands() { return {"smooth", "table", "cv", "bench"}; }

std::vector<std::string> smooth_methods() {
  return {"linear", "filter", "outlier-removal", "gn", "l1", "plq", "constrained", "sparse",
          "lasso"};
}

std::vector<std::string> table_scenarios() { return {"robust-linear", "robust-vanderpol"}; }

std::vector<std::string> read_config(const json& doc, RunConfig& out) {
  std::vector<std::string> errors;
  if (!doc.is_object()) return {"configuration must be a JSON object"};
  RunConfig cfg = out;
  Reader r(doc, "", errors);

  r.string("command", cfg.command);
  if (cfg.command.empty()) {
    errors.push_back("'command' is required (one of: " + join(commands()) + ")");
  } else if (!contains(commands(), cfg.command)) {
    errors.push_back("unknown command '" + cfg.command + "' (available: " + join(commands()) +
                     ")");
  }
  r.string("scenario", cfg.scenario);
  r.string("method", cfg.method);
  r.string("process_penalty", cfg.process_penalty);
  r.string("measurement_penalty", cfg.measurement_penalty);
  r.string("output_dir", cfg.output_dir);
  r.seed("seed", cfg.seed);
  r.integer("reps", cfg.reps);
  r.number("scale", cfg.scale);
  r.integer("threads", cfg.threads);
  r.boolean("plots", cfg.plots);
  if (cfg.reps < 1) errors.push_back("'reps' must be at least 1");
  check_positive(errors, "scale", cfg.scale);
  if (cfg.threads < 1) errors.push_back("'threads' must be at least 1");

  if (const json* s = r.object("solver")) {
    Reader sr(*s, "solver.", errors);
    sr.integer("max_iter", cfg.solver.max_iter);
    sr.number("tol", cfg.solver.tol);
    sr.integer("ip_max_iter", cfg.solver.ip_max_iter);
    sr.number("kkt_tol", cfg.solver.kkt_tol);
    sr.reject_unknown();
    if (cfg.solver.max_iter < 1) errors.push_back("'solver.max_iter' must be at least 1");
    if (cfg.solver.ip_max_iter < 1) errors.push_back("'solver.ip_max_iter' must be at least 1");
    check_positive(errors, "solver.kkt_tol", cfg.solver.kkt_tol);
  }

  if (const json* s = r.object("sparse")) {
    Reader sr(*s, "sparse.", errors);
    sr.int_list("components", cfg.sparse.components);
    sr.number("weight", cfg.sparse.weight);
    sr.number("lambda", cfg.sparse.lambda);
    sr.number("tau", cfg.sparse.tau);
    sr.reject_unknown();
    check_positive(errors, "sparse.weight", cfg.sparse.weight);
    check_positive(errors, "sparse.lambda", cfg.sparse.lambda);
    if (!(cfg.sparse.tau >= 0.0)) errors.push_back("'sparse.tau' must be nonnegative");
    for (int c : cfg.sparse.components) {
      if (c < 0) errors.push_back("'sparse.components' entries must be nonnegative");
    }
  }

  if (const json* s = r.object("cv")) {
    Reader sr(*s, "cv.", errors);
    VapnikCVSpec& v = cfg.cv;
    sr.integer("samples", v.samples);
    sr.integer("train", v.train);
    sr.integer("n_lambda", v.n_lambda);
    sr.integer("n_eps", v.n_eps);
    sr.number("lambda_min", v.lambda_min);
    sr.number("lambda_max", v.lambda_max);
    sr.number("eps_min", v.eps_min);
    sr.number("eps_max", v.eps_max);
    sr.number("p", v.p);
    sr.number("base_var", v.base_var);
    sr.number("phi", v.phi);
    sr.number("R", v.R);
    sr.reject_unknown();
    check_positive(errors, "cv.base_var", v.base_var);
    check_positive(errors, "cv.phi", v.phi);
    check_positive(errors, "cv.R", v.R);
  }

  if (const json* s = r.object("bench")) {
    Reader sr(*s, "bench.", errors);
    sr.integer("n", cfg.bench.n);
    sr.int_list("sizes", cfg.bench.sizes);
    sr.integer("repeats", cfg.bench.repeats);
    sr.reject_unknown();
    if (cfg.bench.n < 1) errors.push_back("'bench.n' must be at least 1");
    if (cfg.bench.repeats < 1) errors.push_back("'bench.repeats' must be at least 1");
    if (cfg.bench.sizes.empty()) errors.push_back("'bench.sizes' must not be empty");
    for (int N : cfg.bench.sizes) {
      if (N < 1) errors.push_back("'bench.sizes' entries must be positive");
    }
  }

  if (const json* c = r.raw("cells")) {
    cfg.cells.clear();
    if (!c->is_array()) {
      errors.push_back("'cells' must be an array of [p, phi] pairs");
    } else {
      for (const json& e : *c) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
          errors.push_back("'cells' entries must be [p, phi] pairs");
          continue;
        }
        const Cell cell{e[0].get<double>(), e[1].get<double>()};
        if (!(cell.p >= 0.0 && cell.p <= 1.0)) errors.push_back("'cells' p must lie in [0, 1]");
        if (cell.p > 0.0 && !(cell.phi > 0.0)) {
          errors.push_back("'cells' phi is a variance and must be positive");
        }
        cfg.cells.push_back(cell);
      }
    }
  }

  const json* params = r.object("params");
  r.reject_unknown();

  // Command-specific requirements.
  if (cfg.command == "smooth") {
    const auto names = scenario_names();
    if (cfg.scenario.empty()) {
      errors.push_back("'scenario' is required for smooth (one of: " + join(names) + ")");
    } else if (!contains(names, cfg.scenario)) {
      errors.push_back("unknown scenario '" + cfg.scenario + "' (available: " + join(names) + ")");
    } else if (params) {
      read_scenario_params(*params, cfg.scenario, scenario_parameters(cfg.scenario), cfg.params,
                           errors);
    }
    if (cfg.method.empty()) {
      errors.push_back("'method' is required for smooth (one of: " + join(smooth_methods()) +
                       ")");
    } else if (!contains(smooth_methods(), cfg.method)) {
      errors.push_back("unknown method '" + cfg.method + "' (available: " +
                       join(smooth_methods()) + ")");
    } else if (contains(names, cfg.scenario)) {
      if (contains(kLinearOnly, cfg.method) && !scenario_is_linear(cfg.scenario)) {
        errors.push_back("method '" + cfg.method + "' needs an affine scenario, '" +
                         cfg.scenario + "' is nonlinear");
      }
      if (cfg.method == "constrained" && !scenario_has_constraints(cfg.scenario)) {
        errors.push_back("method 'constrained' needs a scenario with constraints (box-sine, "
                         "variable-box, ship)");
      }
    }
    if (cfg.method == "plq") {
      for (const auto& [key, text] : {std::pair{"process_penalty", cfg.process_penalty},
                                      std::pair{"measurement_penalty", cfg.measurement_penalty}}) {
        try {
          parse_penalty(text);
        } catch (const Error& e) {
          errors.push_back("'" + std::string(key) + "': " + e.what());
        }
      }
    }
  } else if (cfg.command == "table") {
    if (cfg.scenario.empty()) {
      errors.push_back("'scenario' is required for table (one of: " + join(table_scenarios()) +
                       ")");
    } else if (!contains(table_scenarios(), cfg.scenario)) {
      errors.push_back("unknown table scenario '" + cfg.scenario + "' (available: " +
                       join(table_scenarios()) + ")");
    } else if (params) {
      read_scenario_params(*params, cfg.scenario, table_params(cfg.scenario), cfg.params, errors);
    }
  } else if (params) {
    errors.push_back("'params' is only used by smooth and table");
  }
  if (cfg.command == "cv") {
    const VapnikCVSpec& v = cfg.cv;
    if (v.samples < 2) errors.push_back("'cv.samples' must be at least 2");
    if (!(v.train >= 1 && v.train < v.samples)) {
      errors.push_back("'cv.train' must lie in [1, cv.samples)");
    }
    if (v.n_lambda < 1 || v.n_eps < 1) errors.push_back("'cv' grid sizes must be at least 1");
    if (!(v.lambda_min > 0.0 && v.lambda_max >= v.lambda_min)) {
      errors.push_back("'cv.lambda_min' and 'cv.lambda_max' need 0 < min <= max");
    }
    if (!(v.eps_min >= 0.0 && v.eps_max >= v.eps_min)) {
      errors.push_back("'cv.eps_min' and 'cv.eps_max' need 0 <= min <= max");
    }
    if (!(v.p >= 0.0 && v.p <= 1.0)) errors.push_back("'cv.p' must lie in [0, 1]");
  }

  if (errors.empty()) out = std::move(cfg);
  return errors;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  auto errors = read_config(doc, cfg);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open configuration file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"'" + path + "' is not valid JSON: " + e.what()});
  }
}

std::string default_output_dir() {
  if (const char* env = std::getenv("KSMOOTH_OUTPUT_DIR"); env && *env) return env;
  return "ksmooth-out";
}

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  if (!cfg.scenario.empty()) j["scenario"] = cfg.scenario;
  if (!cfg.method.empty()) j["method"] = cfg.method;
  if (!cfg.params.empty()) j["params"] = cfg.params;
  if (cfg.method == "plq") {
    j["process_penalty"] = cfg.process_penalty;
    j["measurement_penalty"] = cfg.measurement_penalty;
  }
  if (cfg.method == "sparse" || cfg.method == "lasso") {
    j["sparse"] = {{"components", cfg.sparse.components},
                   {"weight", cfg.sparse.weight},
                   {"lambda", cfg.sparse.lambda},
                   {"tau", cfg.sparse.tau}};
  }
  j["solver"] = {{"max_iter", cfg.solver.max_iter},
                 {"tol", cfg.solver.tol},
                 {"ip_max_iter", cfg.solver.ip_max_iter},
                 {"kkt_tol", cfg.solver.kkt_tol}};
  j["seed"] = cfg.seed;
  j["reps"] = cfg.reps;
  j["scale"] = cfg.scale;
  j["threads"] = cfg.threads;
  if (!cfg.cells.empty()) {
    json cells = json::array();
    for (const Cell& c : cfg.cells) cells.push_back({c.p, c.phi});
    j["cells"] = cells;
  }
  if (cfg.command == "cv") {
    const VapnikCVSpec& v = cfg.cv;
    j["cv"] = {{"samples", v.samples},       {"train", v.train},
               {"n_lambda", v.n_lambda},     {"n_eps", v.n_eps},
               {"lambda_min", v.lambda_min}, {"lambda_max", v.lambda_max},
               {"eps_min", v.eps_min},       {"eps_max", v.eps_max},
               {"p", v.p},                   {"base_var", v.base_var},
               {"phi", v.phi},               {"R", v.R}};
  }
  if (cfg.command == "bench") {
    j["bench"] = {{"n", cfg.bench.n}, {"sizes", cfg.bench.sizes}, {"repeats", cfg.bench.repeats}};
  }
  j["plots"] = cfg.plots;
  return j;
}

}  // namespace ksmooth::cli
