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


#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "ksmooth/errors.hpp"
#include "ksmooth/version.hpp"

namespace {

using nlohmann::json;
using ksmooth::cli::ConfigError;
using ksmooth::cli::IOError;

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3, kIO = 4 };

struct Overrides {
  std::string config_path;
  std::string scenario;
  std::string method;
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<double> scale;
  std::optional<int> threads;
  std::string out;
  bool no_plots = false;
};

void add_common(CLI::App* app, Overrides& o, bool with_scenario, bool with_method) {
  app->add_option("-c,--config", o.config_path, "JSON configuration file");
  if (with_scenario) app->add_option("-s,--scenario", o.scenario, "scenario name");
  if (with_method) app->add_option("-m,--method", o.method, "smoothing method");
  if (with_scenario) {
    app->add_option("-p,--param", o.params, "scenario parameter as name=value (repeatable)");
  }
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--scale", o.scale, "problem size multiplier");
  app->add_option("-o,--out", o.out, "output directory");
  app->add_flag("--no-plots", o.no_plots, "skip SVG output");
}

void print_error(const std::string& category, const std::string& module,
                 const std::string& message) {
  json e = {{"error", {{"category", category}, {"module", module}, {"message", message}}}};
  std::cerr << e.dump() << '\n';
}

// Command-line values override the file.
json merged_document(const std::string& command, const Overrides& o) {
  json doc = o.config_path.empty() ? json::object() : ksmooth::cli::load_json_file(o.config_path);
  if (!doc.is_object()) throw ConfigError({"configuration root must be an object"});
  if (!command.empty()) doc["command"] = command;
  if (!o.scenario.empty()) doc["scenario"] = o.scenario;
  if (!o.method.empty()) doc["method"] = o.method;
  std::vector<std::string> errors;
  for (const std::string& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back("--param '" + p + "' must have the form name=value");
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(p.substr(eq + 1), &used);
      if (used != p.size() - eq - 1) throw std::invalid_argument(p);
      doc["params"][p.substr(0, eq)] = v;
    } catch (const std::exception&) {
      errors.push_back("--param '" + p + "' has a non-numeric value");
    }
  }
  if (!errors.empty()) throw ConfigError(errors);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.reps) doc["reps"] = *o.reps;
  if (o.scale) doc["scale"] = *o.scale;
  if (o.threads) doc["threads"] = *o.threads;
  if (!o.out.empty()) doc["output_dir"] = o.out;
  if (o.no_plots) doc["plots"] = false;
  return doc;
}

int execute(const std::string& command, const Overrides& o, bool validate_only) {
  try {
    const json doc = merged_document(validate_only ? "" : command, o);
    ksmooth::cli::RunConfig cfg;
    const std::vector<std::string> errors = ksmooth::cli::read_config(doc, cfg);
    if (validate_only) {
      for (const std::string& e : errors) std::cout << "error: " << e << '\n';
      if (errors.empty()) std::cout << "configuration is valid (" << cfg.command << ")\n";
      return errors.empty() ? kOk : kConfig;
    }
    if (!errors.empty()) throw ConfigError(errors);
    const ksmooth::cli::RunResult r = ksmooth::cli::run(cfg);
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    std::cout << r.summary.dump() << '\n';
    return kOk;
  } catch (const ConfigError& e) {
    for (const std::string& msg : e.errors()) print_error("ConfigError", "cli", msg);
    return kConfig;
  } catch (const IOError& e) {
    print_error("IOError", "cli", e.what());
    return kIO;
  } catch (const ksmooth::Error& e) {
    print_error(e.category(), e.module(), e.what());
    const bool input = e.category() == "InvalidParameter" || e.category() == "ShapeMismatch";
    return input ? kConfig : kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-space smoothing experiments"};
  app.set_version_flag("--version", std::string(ksmooth::kVersion));
  app.require_subcommand(1);

  Overrides smooth_o, table_o, cv_o, bench_o, validate_o;
  CLI::App* smooth = app.add_subcommand("smooth", "smooth one simulated scenario");
  add_common(smooth, smooth_o, true, true);

  CLI::App* table = app.add_subcommand("table", "Monte Carlo MSE table");
  add_common(table, table_o, true, false);
  table->add_option("--reps", table_o.reps, "replications per cell");
  table->add_option("-j,--threads", table_o.threads, "worker threads");

  CLI::App* cv = app.add_subcommand("cv", "cross-validated Vapnik function recovery");
  add_common(cv, cv_o, false, false);

  CLI::App* bench = app.add_subcommand("bench", "block tridiagonal solve timings");
  add_common(bench, bench_o, false, false);

  CLI::App* validate = app.add_subcommand("validate", "check a configuration file and exit");
  validate->add_option("config", validate_o.config_path, "JSON configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*smooth) return execute("smooth", smooth_o, false);
  if (*table) return execute("table", table_o, false);
  if (*cv) return execute("cv", cv_o, false);
  if (*bench) return execute("bench", bench_o, false);
  return execute("", validate_o, true);
}
