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


#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/constrained.hpp"
#include "ksmooth/errors.hpp"
#include "ksmooth/experiments.hpp"
#include "ksmooth/plq.hpp"
#include "ksmooth/rng.hpp"
#include "ksmooth/robust_l1.hpp"
#include "ksmooth/smoother_linear.hpp"
#include "ksmooth/smoother_nonlinear.hpp"
#include "ksmooth/sparse.hpp"
#include "output.hpp"

namespace ksmooth::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int scaled(double base, double scale, int floor = 1) {
  return std::max(floor, static_cast<int>(std::lround(base * scale)));
}

GNOptions gn_options(const SolverConfig& s) {
  GNOptions o;
  o.max_iter = s.max_iter;
  o.tol = s.tol;
  return o;
}

IPOptions ip_options(const SolverConfig& s) {
  IPOptions o;
  o.max_iter = s.ip_max_iter;
  o.kkt_tol = s.kkt_tol;
  return o;
}

Scenario build_scenario(const RunConfig& cfg) {
  ScenarioParams params = cfg.params;
  const auto allowed = scenario_parameters(cfg.scenario);
  if (cfg.scale != 1.0 && std::find(allowed.begin(), allowed.end(), "N") != allowed.end()) {
    const double N = params.count("N") ? params.at("N")
                                       : make_scenario(cfg.scenario, params, cfg.seed).model.N;
    params["N"] = scaled(N, cfg.scale);
  }
  return make_scenario(cfg.scenario, params, cfg.seed);
}

// State component observed directly by a scalar measurement, if any.
std::optional<int> measured_component(const Scenario& sc) {
  if (sc.linear) {
    for (int k = 0; k < sc.linear->num_steps(); ++k) {
      const Eigen::MatrixXd& H = sc.linear->H[k];
      if (H.rows() == 0) continue;
      if (H.rows() != 1) return std::nullopt;
      Eigen::Index r = 0, j = 0;
      if (H.cwiseAbs().maxCoeff(&r, &j) == 1.0 && H.cwiseAbs().sum() == 1.0) return static_cast<int>(j);
      return std::nullopt;
    }
    return std::nullopt;
  }
  if (sc.name.find("vanderpol") != std::string::npos) return 0;
  return std::nullopt;
}

SmootherSolution solve_scenario(const RunConfig& cfg, const Scenario& sc, json& extra) {
  const std::string& m = cfg.method;
  if (m == "linear") return smooth(*sc.linear);
  if (m == "filter") {
    SmootherSolution s;
    s.x = filter_estimates(*sc.linear).x;
    s.objective = objective(*sc.linear, s.x);
    return s;
  }
  if (m == "outlier-removal") {
    OutlierRemovalResult r = outlier_removal_baseline(*sc.linear);
    extra["removed"] = r.removed;
    return std::move(r.solution);
  }
  if (m == "gn") {
    auto [sol, trace] = smooth_nonlinear(sc.model, sc.x_init, gn_options(cfg.solver));
    return std::move(sol);
  }
  if (m == "l1") {
    if (sc.linear) return smooth_l1_laplace(*sc.linear, ip_options(cfg.solver));
    RobustOptions ro;
    ro.gn = gn_options(cfg.solver);
    ro.ip = ip_options(cfg.solver);
    return smooth_l1_laplace(sc.model, sc.x_init, ro).first;
  }
  if (m == "plq") {
    return smooth_plq(*sc.linear, parse_penalty(cfg.process_penalty),
                      parse_penalty(cfg.measurement_penalty), ip_options(cfg.solver));
  }
  if (m == "constrained") {
    if (sc.linear && sc.bounds) {
      return solve_qp_constrained(assemble(*sc.linear), *sc.bounds, ip_options(cfg.solver))
          .solution;
    }
    ConstrainedGNOptions co;
    co.gn = gn_options(cfg.solver);
    co.ip = ip_options(cfg.solver);
    return smooth_constrained_nonlinear(sc.model, *sc.constraints, sc.x_init, co);
  }
  // sparse / lasso
  const int n = sc.linear->state_dim();
  for (int c : cfg.sparse.components) {
    if (c >= n) {
      throw ConfigError({"'sparse.components' entry " + std::to_string(c) +
                         " is out of range for a state of dimension " + std::to_string(n)});
    }
  }
  const NormalSystem sys = assemble(*sc.linear);
  SparsePenaltySpec spec;
  spec.w = component_weights(n, sc.linear->num_steps(), cfg.sparse.components, cfg.sparse.weight);
  spec.lambda = cfg.sparse.lambda;
  spec.tau = cfg.sparse.tau;
  if (m == "sparse") return sparse_smooth_penalized(sys, spec, ip_options(cfg.solver));
  SmootherSolution s = sparse_smooth_lasso(sys, spec);
  extra["lasso_multiplier"] = lasso_multiplier(sys, spec, s.x);
  return s;
}

std::string estimate_csv(const Scenario& sc, const BlockVector& x) {
  const int n = x.block_size();
  int m = 0;
  for (const auto& z : sc.model.z) m = std::max(m, static_cast<int>(z.size()));
  std::ostringstream o;
  o << "k,t";
  for (int i = 1; i <= n; ++i) o << ",x_" << i;
  for (int i = 1; i <= m; ++i) o << ",z_" << i;
  for (int i = 1; i <= n; ++i) o << ",truth_" << i;
  o << '\n';
  for (int k = 0; k < x.num_blocks(); ++k) {
    o << k << ',' << format_double(sc.t[k]);
    for (int i = 0; i < n; ++i) o << ',' << format_double(x.block(k)(i));
    const Eigen::VectorXd& z = sc.model.z[k];
    for (int i = 0; i < m; ++i) {
      o << ',';
      if (i < z.size()) o << format_double(z(i));
    }
    for (int i = 0; i < n; ++i) o << ',' << format_double(sc.truth.block(k)(i));
    o << '\n';
  }
  return o.str();
}

std::string diagnostics_csv(const SmootherSolution& s) {
  const std::size_t rows =
      std::max({s.objective_trace.size(), s.residual_trace.size(), s.inner_iterations.size()});
  std::ostringstream o;
  o << "iteration,objective,residual,inner_iterations\n";
  for (std::size_t i = 0; i < rows; ++i) {
    o << i << ',';
    if (i < s.objective_trace.size()) o << format_double(s.objective_trace[i]);
    o << ',';
    if (i < s.residual_trace.size()) o << format_double(s.residual_trace[i]);
    o << ',';
    if (i < s.inner_iterations.size()) o << s.inner_iterations[i];
    o << '\n';
  }
  return o.str();
}

json write_metadata(const RunConfig& cfg, const fs::path& out, const json& result,
                    RunResult& rr) {
  json meta = base_metadata(cfg.seed, cfg.scale);
  meta["command"] = cfg.command;
  meta["config"] = to_json(cfg);
  meta["result"] = result;
  json files = json::array();
  for (const fs::path& f : rr.files) files.push_back(f.filename().string());
  meta["files"] = files;
  rr.files.push_back(write_file(out, "metadata.json", meta.dump(2) + "\n"));
  rr.summary = result;
  return meta;
}

}  // namespace

RunResult run_smooth(const RunConfig& cfg, const fs::path& out) {
  const Scenario sc = build_scenario(cfg);
  json extra = json::object();
  const auto t0 = std::chrono::steady_clock::now();
  const SmootherSolution sol = solve_scenario(cfg, sc, extra);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunResult rr;
  rr.files.push_back(write_file(out, "estimate.csv", estimate_csv(sc, sol.x)));
  rr.files.push_back(write_file(out, "diagnostics.csv", diagnostics_csv(sol)));
  if (cfg.plots) {
    const std::optional<int> measured = measured_component(sc);
    for (int i = 0; i < sol.x.block_size(); ++i) {
      Plot p;
      p.title = sc.name + ", " + cfg.method + ": x_" + std::to_string(i + 1);
      p.x_label = "t";
      p.y_label = "x_" + std::to_string(i + 1);
      Series truth{"truth", sc.t, {}, false}, est{"estimate", sc.t, {}, false};
      for (int k = 0; k < sol.x.num_blocks(); ++k) {
        truth.y.push_back(sc.truth.block(k)(i));
        est.y.push_back(sol.x.block(k)(i));
      }
      if (measured && *measured == i) {
        Series z{"measurements", {}, {}, true};
        for (int k = 0; k < sol.x.num_blocks(); ++k) {
          if (sc.model.z[k].size() == 0) continue;
          z.x.push_back(sc.t[k]);
          z.y.push_back(sc.model.z[k](0));
        }
        // Keep far outliers from flattening the curves.
        double lo = 1e300, hi = -1e300;
        for (const Series* s : {&truth, &est}) {
          for (double v : s->y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
        const double pad = 0.5 * (hi - lo) + 1e-9;
        p.y_lo = lo - pad;
        p.y_hi = hi + pad;
        p.series.push_back(std::move(z));
      }
      p.series.push_back(std::move(truth));
      p.series.push_back(std::move(est));
      if (sc.bounds && sc.bounds->B[0].rows() == 2 && sc.bounds->B[0](0, i) == 1.0) {
        Series upper{"upper bound", sc.t, {}, false}, lower{"lower bound", sc.t, {}, false};
        for (int k = 0; k < sol.x.num_blocks(); ++k) {
          upper.y.push_back(sc.bounds->b[k](0));
          lower.y.push_back(-sc.bounds->b[k](1));
        }
        p.series.push_back(std::move(upper));
        p.series.push_back(std::move(lower));
      }
      rr.files.push_back(
          write_file(out, "plot_x" + std::to_string(i + 1) + ".svg", render_svg(p)));
    }
  }

  json result = {{"scenario", sc.name},
                 {"method", cfg.method},
                 {"N", sol.x.num_blocks()},
                 {"status", to_string(sol.status)},
                 {"iterations", sol.iterations},
                 {"objective", sol.objective},
                 {"mse", mse(sol.x, sc.truth)},
                 {"seconds", secs}};
  if (sc.constraints) result["max_violation"] = max_violation(*sc.constraints, sol.x);
  if (sc.bounds) result["max_violation"] = max_violation(*sc.bounds, sol.x);
  for (auto& [k, v] : extra.items()) result[k] = v;
  write_metadata(cfg, out, result, rr);
  return rr;
}

RunResult run_table(const RunConfig& cfg, const fs::path& out) {
  const int reps = scaled(cfg.reps, cfg.scale);
  auto param = [&](const char* key, double fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
  };
  MSEReport report;
  if (cfg.scenario == "robust-linear") {
    RobustLinearTableSpec spec;
    spec.replications = reps;
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    if (!cfg.cells.empty()) spec.cells = cfg.cells;
    spec.N = static_cast<int>(param("N", spec.N));
    spec.horizon = param("horizon", spec.horizon);
    spec.sigma2 = param("sigma2", spec.sigma2);
    spec.R = param("R", spec.R);
    spec.base_var = param("base_var", spec.base_var);
    spec.initial_var = param("initial_var", spec.initial_var);
    report = run_robust_linear_table(spec);
  } else {
    RobustVdpTableSpec spec;
    spec.replications = reps;
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    if (!cfg.cells.empty()) spec.cells = cfg.cells;
    const double horizon = param("horizon", spec.model.dt * spec.model.N);
    spec.model.N = static_cast<int>(param("N", spec.model.N));
    spec.model.dt = horizon / spec.model.N;
    spec.model.mu = param("mu", spec.model.mu);
    spec.model.R = param("R", spec.model.R);
    spec.truth_var = param("truth_var", spec.truth_var);
    report = run_robust_vdp_table(spec);
  }

  RunResult rr;
  std::ostringstream reps_csv, summary_csv;
  write_replications_csv(report, reps_csv);
  write_summary_csv(report, summary_csv);
  rr.files.push_back(write_file(out, "replications.csv", reps_csv.str()));
  rr.files.push_back(write_file(out, "summary.csv", summary_csv.str()));

  json cells = json::array();
  for (const CellReport& c : report.cells) {
    json methods = json::object();
    for (const MethodSummary& m : c.methods) {
      methods[m.method] = {{"median", m.median}, {"lo95", m.lo95}, {"hi95", m.hi95}};
    }
    cells.push_back({{"p", c.p}, {"phi", c.phi}, {"methods", methods}});
  }
  if (cfg.plots && !report.cells.empty()) {
    Plot p;
    p.title = report.scenario + ": median MSE per cell";
    p.x_label = "cell index";
    p.y_label = "median MSE";
    for (const MethodSummary& m0 : report.cells.front().methods) {
      Series s{m0.method, {}, {}, false};
      for (std::size_t c = 0; c < report.cells.size(); ++c) {
        s.x.push_back(static_cast<double>(c));
        s.y.push_back(report.cells[c].method(m0.method).median);
      }
      p.series.push_back(std::move(s));
    }
    rr.files.push_back(write_file(out, "summary.svg", render_svg(p)));
  }
  json result = {{"scenario", report.scenario}, {"replications", reps}, {"cells", cells}};
  write_metadata(cfg, out, result, rr);
  return rr;
}

RunResult run_cv(const RunConfig& cfg, const fs::path& out) {
  VapnikCVSpec spec = cfg.cv;
  spec.seed = cfg.seed;
  if (cfg.scale != 1.0) {
    spec.samples = scaled(spec.samples, cfg.scale, 2);
    spec.train = std::clamp(scaled(spec.train, cfg.scale), 1, spec.samples - 1);
  }
  const VapnikCVResult r = run_vapnik_cv(spec);

  RunResult rr;
  std::ostringstream grid, gauss, fit;
  grid << "lambda2,eps,vapnik_mse\n";
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    for (std::size_t j = 0; j < r.eps_grid.size(); ++j) {
      grid << format_double(r.lambda_grid[i]) << ',' << format_double(r.eps_grid[j]) << ','
           << format_double(r.vapnik_error(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)))
           << '\n';
    }
  }
  gauss << "lambda2,gaussian_mse\n";
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    gauss << format_double(r.lambda_grid[i]) << ','
          << format_double(r.gaussian_error(static_cast<Eigen::Index>(i))) << '\n';
  }
  std::vector<char> is_train(r.t.size(), 0);
  for (int k : r.train_idx) is_train[k] = 1;
  fit << "k,t,z,truth,vapnik,gaussian,set\n";
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    const int kk = static_cast<int>(k);
    fit << k << ',' << format_double(r.t[k]) << ',' << format_double(r.z(kk)) << ','
        << format_double(r.truth(kk)) << ',' << format_double(r.vapnik_fit.block(kk)(1) + 1.0)
        << ',' << format_double(r.gaussian_fit.block(kk)(1) + 1.0) << ','
        << (is_train[k] ? "train" : "validation") << '\n';
  }
  rr.files.push_back(write_file(out, "cv_grid.csv", grid.str()));
  rr.files.push_back(write_file(out, "cv_gaussian.csv", gauss.str()));
  rr.files.push_back(write_file(out, "cv_fit.csv", fit.str()));
  if (cfg.plots) {
    Plot p;
    p.title = "function recovery";
    p.x_label = "t";
    p.y_label = "f(t)";
    p.y_lo = -2.0;
    p.y_hi = 4.0;
    Series z{"samples", r.t, {}, true}, truth{"truth", r.t, {}, false},
        vap{"Vapnik", r.t, {}, false}, gau{"Gaussian", r.t, {}, false};
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const int kk = static_cast<int>(k);
      z.y.push_back(r.z(kk));
      truth.y.push_back(r.truth(kk));
      vap.y.push_back(r.vapnik_fit.block(kk)(1) + 1.0);
      gau.y.push_back(r.gaussian_fit.block(kk)(1) + 1.0);
    }
    p.series = {z, truth, gau, vap};
    rr.files.push_back(write_file(out, "cv_fit.svg", render_svg(p)));
  }
  json result = {{"samples", spec.samples},
                 {"train", spec.train},
                 {"best_lambda2", r.best_lambda2},
                 {"best_eps", r.best_eps},
                 {"vapnik_validation_mse", r.vapnik_val_mse},
                 {"gaussian_lambda2", r.gaussian_lambda2},
                 {"gaussian_validation_mse", r.gaussian_val_mse},
                 {"support_vectors", r.support_vectors}};
  write_metadata(cfg, out, result, rr);
  return rr;
}

RunResult run_bench(const RunConfig& cfg, const fs::path& out) {
  const int n = cfg.bench.n;
  RandomStream rng({cfg.seed, 0, 0, NoiseRole::kProcess});
  std::ostringstream csv;
  csv << "n,N,seconds,seconds_per_block\n";
  json rows = json::array();
  double first = 0.0;
  int first_N = 0;
  for (int base_N : cfg.bench.sizes) {
    const int N = scaled(base_N, cfg.scale);
    // Diagonally dominant blocks keep every instance well conditioned.
    std::vector<Eigen::MatrixXd> diag(N), sub(N > 0 ? N - 1 : 0);
    for (auto& s : sub) {
      s.resize(n, n);
      for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = rng.normal() * 0.3;
    }
    for (int k = 0; k < N; ++k) {
      Eigen::MatrixXd a(n, n);
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal();
      diag[k] = a * a.transpose() + (2.0 * n) * Eigen::MatrixXd::Identity(n, n);
    }
    const BlockTriMatrix A(diag, sub);
    BlockVector r(n, N);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()(i) = rng.normal();
    double best = 1e300;
    for (int rep = 0; rep < cfg.bench.repeats; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const BlockTriSolution s = solve(A, r);
      const auto t1 = std::chrono::steady_clock::now();
      if (s.e.size() != r.size()) throw Error("InternalError", "cli", "solve returned wrong size");
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    if (first_N == 0) {
      first = best;
      first_N = N;
    }
    csv << n << ',' << N << ',' << format_double(best) << ',' << format_double(best / N) << '\n';
    rows.push_back({{"N", N},
                    {"seconds", best},
                    {"ratio_to_first", best / first},
                    {"size_ratio", double(N) / first_N}});
  }
  RunResult rr;
  rr.files.push_back(write_file(out, "bench.csv", csv.str()));
  json result = {{"n", n}, {"runs", rows}};
  write_metadata(cfg, out, result, rr);
  return rr;
}

RunResult run(const RunConfig& cfg) {
  const fs::path out = cfg.output_dir.empty() ? fs::path(default_output_dir()) : fs::path(cfg.output_dir);
  if (cfg.command == "smooth") return run_smooth(cfg, out);
  if (cfg.command == "table") return run_table(cfg, out);
  if (cfg.command == "cv") return run_cv(cfg, out);
  if (cfg.command == "bench") return run_bench(cfg, out);
  throw ConfigError({"unknown command '" + cfg.command + "'"});
}

}  // namespace ksmooth::cli
