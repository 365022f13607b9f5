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

#include "ksmooth/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ksmooth/errors.hpp"
#include "ksmooth/plq.hpp"
#include "ksmooth/robust_l1.hpp"
#include "ksmooth/smoother_nonlinear.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "experiments";

// Runs f(0) ... f(count - 1); results must be written by index so the
// outcome does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& f) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

NoiseMixtureSpec cell_noise(const Cell& cell, double base_var) {
  NoiseMixtureSpec n;
  n.p = cell.p;
  n.base_var = base_var;
  n.phi = cell.p > 0.0 ? cell.phi : base_var;
  n.validate();
  return n;
}

void validate_cells(const std::vector<Cell>& cells) {
  if (cells.empty()) throw InvalidParameter(kModule, "at least one (p, phi) cell is required");
  for (const Cell& c : cells) {
    if (!(c.p >= 0.0 && c.p <= 1.0)) throw InvalidParameter(kModule, "cell p must lie in [0, 1]");
    if (c.p > 0.0 && !(c.phi > 0.0)) {
      throw InvalidParameter(kModule, "cell phi must be positive when p > 0");
    }
  }
}

Eigen::VectorXd gaussian_noise(RandomStream& rng, const Eigen::MatrixXd& cov) {
  Eigen::VectorXd e(cov.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = rng.normal();
  if (cov.rows() == 0) return e;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    // Semidefinite covariance (e.g. exactly zero): fall back to eigen-sqrt.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd sq = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * sq.asDiagonal() * eig.eigenvectors().transpose() * e;
  }
  return llt.matrixL() * e;
}

// Time grid t_k = (k + 1) dt for the N stored steps.
std::vector<double> time_grid(int N, double dt) {
  std::vector<double> t(N);
  for (int k = 0; k < N; ++k) t[k] = (k + 1) * dt;
  return t;
}

BlockVector circle_truth(const std::vector<double>& t, double sign) {
  BlockVector x(2, static_cast<int>(t.size()));
  for (int k = 0; k < x.num_blocks(); ++k) {
    x.block(k) << sign * std::cos(t[k]), sign * std::sin(t[k]);
  }
  return x;
}

LinearStateSpace linear_table_model(const RobustLinearTableSpec& spec) {
  SmoothSignalParams p;
  p.N = spec.N;
  p.dt = spec.horizon / spec.N;
  p.sigma2 = spec.sigma2;
  p.R = spec.R;
  p.initial_mean = spec.initial_mean;
  p.initial_var = spec.initial_var;
  return smooth_signal_model(p);
}

std::vector<Eigen::VectorXd> measurements_of(const LinearStateSpace& model,
                                             const BlockVector& truth, RandomStream& rng,
                                             const NoiseMixtureSpec& noise) {
  std::vector<Eigen::VectorXd> z(model.num_steps());
  for (int k = 0; k < model.num_steps(); ++k) {
    z[k] = model.H[k] * truth.block(k);
    for (Eigen::Index i = 0; i < z[k].size(); ++i) z[k](i) += draw_mixture(rng, noise);
  }
  return z;
}

double get(const ScenarioParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int get_int(const ScenarioParams& params, const std::string& key, int fallback) {
  const double v = get(params, key, fallback);
  if (v != std::floor(v) || v < 1 || v > 1e7) {
    throw InvalidParameter(kModule, "parameter '" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace

void NoiseMixtureSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter(kModule, "mixture p must lie in [0, 1]");
  if (!(base_var >= 0.0) || !(phi >= 0.0)) {
    throw InvalidParameter(kModule, "mixture variances must be nonnegative");
  }
}

double draw_mixture(RandomStream& rng, const NoiseMixtureSpec& spec) {
  const bool outlier = spec.p > 0.0 && rng.uniform() < spec.p;
  return std::sqrt(outlier ? spec.phi : spec.base_var) * rng.normal();
}

std::vector<Eigen::VectorXd> measure(const NonlinearStateSpace& model, const BlockVector& truth,
                                     RandomStream& rng,
                                     const std::optional<NoiseMixtureSpec>& noise) {
  if (noise) noise->validate();
  std::vector<Eigen::VectorXd> z(model.N);
  for (int k = 0; k < model.N; ++k) {
    z[k] = model.measurement(k, truth.block(k));
    if (noise) {
      for (Eigen::Index i = 0; i < z[k].size(); ++i) z[k](i) += draw_mixture(rng, *noise);
    } else {
      z[k] += gaussian_noise(rng, model.R[k]);
    }
  }
  return z;
}

Simulation simulate(const NonlinearStateSpace& model, const StreamKey& key,
                    const SimulationOptions& opts) {
  const auto& Q = opts.truth_Q.empty() ? model.Q : opts.truth_Q;
  if (static_cast<int>(Q.size()) != model.N) {
    throw ShapeMismatch(kModule, "truth process covariances must have one entry per step");
  }
  StreamKey pk = key;
  pk.role = NoiseRole::kProcess;
  StreamKey mk = key;
  mk.role = NoiseRole::kMeasurement;
  RandomStream prng(pk);
  RandomStream mrng(mk);

  Simulation sim;
  sim.truth = BlockVector(model.n, model.N);
  Eigen::VectorXd prev = model.x0;
  for (int k = 0; k < model.N; ++k) {
    sim.truth.block(k) = model.process(k, prev) + gaussian_noise(prng, Q[k]);
    prev = sim.truth.block(k);
  }
  sim.z = measure(model, sim.truth, mrng, opts.noise);
  return sim;
}

Simulation simulate(const NonlinearStateSpace& model, std::uint64_t seed,
                    const SimulationOptions& opts) {
  StreamKey key;
  key.seed = seed;
  return simulate(model, key, opts);
}

double mse(const BlockVector& estimate, const BlockVector& truth) {
  if (!estimate.same_shape(truth)) throw ShapeMismatch(kModule, "estimate and truth differ in shape");
  if (truth.num_blocks() == 0) throw ShapeMismatch(kModule, "empty trajectory");
  return (estimate.data() - truth.data()).squaredNorm() / truth.num_blocks();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidParameter(kModule, "percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter(kModule, "percentile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MethodSummary summarize(std::string method, std::vector<double> values) {
  MethodSummary s;
  s.method = std::move(method);
  s.median = percentile(values, 0.5);
  s.lo95 = percentile(values, 0.025);
  s.hi95 = percentile(values, 0.975);
  s.mse = std::move(values);
  return s;
}

const MethodSummary& CellReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw InvalidParameter(kModule, "no method '" + name + "' in cell");
}

const CellReport& MSEReport::cell(double p, double phi) const {
  for (const auto& c : cells) {
    if (c.p == p && (p == 0.0 || c.phi == phi)) return c;
  }
  throw InvalidParameter(kModule, "no such (p, phi) cell in report");
}

void RobustLinearTableSpec::validate() const {
  if (replications < 1) throw InvalidParameter(kModule, "replications must be at least 1");
  if (N < 2) throw InvalidParameter(kModule, "N must be at least 2");
  if (!(horizon > 0.0) || !(sigma2 > 0.0) || !(R > 0.0) || !(base_var > 0.0) ||
      !(initial_var > 0.0)) {
    throw InvalidParameter(kModule, "horizon and variances must be positive");
  }
  validate_cells(cells);
}

MSEReport run_robust_linear_table(const RobustLinearTableSpec& spec) {
  spec.validate();
  const LinearStateSpace base = linear_table_model(spec);
  const std::vector<double> t = time_grid(spec.N, spec.horizon / spec.N);
  const BlockVector truth = circle_truth(t, -1.0);
  std::vector<std::string> names{"GKF", "IGS", "ILS"};
  if (spec.outlier_baseline) names.push_back("ORB");

  MSEReport report;
  report.scenario = "robust-linear";
  report.seed = spec.seed;
  report.replications = spec.replications;
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    const NoiseMixtureSpec noise = cell_noise(spec.cells[c], spec.base_var);
    std::vector<std::vector<double>> values(names.size(),
                                            std::vector<double>(spec.replications));
    parallel_for(spec.replications, spec.threads, [&](int rep) {
      RandomStream rng({spec.seed, static_cast<std::uint32_t>(rep),
                        static_cast<std::uint32_t>(c), NoiseRole::kMeasurement});
      const LinearStateSpace model =
          with_measurements(base, measurements_of(base, truth, rng, noise));
      values[0][rep] = mse(filter_estimates(model).x, truth);
      values[1][rep] = mse(smooth(model).x, truth);
      values[2][rep] = mse(smooth_l1_laplace(model).x, truth);
      if (spec.outlier_baseline) {
        values[3][rep] = mse(outlier_removal_baseline(model).solution.x, truth);
      }
    });
    CellReport cell;
    cell.p = spec.cells[c].p;
    cell.phi = cell.p > 0.0 ? spec.cells[c].phi : 0.0;
    for (std::size_t m = 0; m < names.size(); ++m) {
      cell.methods.push_back(summarize(names[m], std::move(values[m])));
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void RobustVdpTableSpec::validate() const {
  if (replications < 1) throw InvalidParameter(kModule, "replications must be at least 1");
  if (!(truth_var >= 0.0)) throw InvalidParameter(kModule, "truth_var must be nonnegative");
  validate_cells(cells);
  vanderpol_model(model);
}

MSEReport run_robust_vdp_table(const RobustVdpTableSpec& spec) {
  spec.validate();
  const NonlinearStateSpace base = vanderpol_model(spec.model);
  SimulationOptions sim_opts;
  sim_opts.truth_Q.assign(base.N, spec.truth_var * Eigen::MatrixXd::Identity(2, 2));

  MSEReport report;
  report.scenario = "robust-vanderpol";
  report.seed = spec.seed;
  report.replications = spec.replications;
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    SimulationOptions opts = sim_opts;
    opts.noise = cell_noise(spec.cells[c], spec.model.R);
    std::vector<double> igs(spec.replications), ils(spec.replications);
    parallel_for(spec.replications, spec.threads, [&](int rep) {
      const Simulation sim = simulate(
          base, StreamKey{spec.seed, static_cast<std::uint32_t>(rep),
                          static_cast<std::uint32_t>(c), NoiseRole::kProcess},
          opts);
      const NonlinearStateSpace model = with_measurements(base, sim.z);
      igs[rep] = mse(smooth_nonlinear(model).first.x, sim.truth);
      ils[rep] = mse(smooth_l1_laplace(model).first.x, sim.truth);
    });
    CellReport cell;
    cell.p = spec.cells[c].p;
    cell.phi = cell.p > 0.0 ? spec.cells[c].phi : 0.0;
    cell.methods.push_back(summarize("IGS", std::move(igs)));
    cell.methods.push_back(summarize("ILS", std::move(ils)));
    report.cells.push_back(std::move(cell));
  }
  return report;
}

OutlierRemovalResult outlier_removal_baseline(const LinearStateSpace& model, double threshold) {
  if (!(threshold > 0.0)) throw InvalidParameter(kModule, "threshold must be positive");
  const SmootherSolution first = smooth(model);
  OutlierRemovalResult out;
  LinearStateSpace refit = model;
  const int n = model.state_dim();
  int kept = 0;
  for (int k = 0; k < model.num_steps(); ++k) {
    const int m = model.measurement_dim(k);
    if (m == 0) continue;
    const Eigen::VectorXd r = model.z[k] - model.H[k] * first.x.block(k);
    const Eigen::VectorXd sd = model.R[k].diagonal().cwiseSqrt();
    if ((r.cwiseAbs().array() > threshold * sd.array()).any()) {
      out.removed.push_back(k);
      refit.z[k] = Eigen::VectorXd(0);
      refit.H[k] = Eigen::MatrixXd(0, n);
      refit.R[k] = Eigen::MatrixXd(0, 0);
    } else {
      ++kept;
    }
  }
  if (kept == 0) throw AllMeasurementsRemoved(kModule, "every measurement was flagged as an outlier");
  out.solution = out.removed.empty() ? first : smooth(refit);
  return out;
}

void VapnikCVSpec::validate() const {
  if (samples < 4) throw InvalidParameter(kModule, "samples must be at least 4");
  if (train < 1 || train >= samples) {
    throw InvalidParameter(kModule, "train size must lie in [1, samples)");
  }
  if (n_lambda < 1 || n_eps < 1) throw InvalidParameter(kModule, "grid sizes must be positive");
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
    throw InvalidParameter(kModule, "need 0 < lambda_min <= lambda_max");
  }
  if (!(eps_min >= 0.0) || !(eps_max >= eps_min)) {
    throw InvalidParameter(kModule, "need 0 <= eps_min <= eps_max");
  }
  NoiseMixtureSpec{p, base_var, phi}.validate();
  if (!(R > 0.0)) throw InvalidParameter(kModule, "R must be positive");
}

VapnikCVSpec vapnik_desk_spec() {
  VapnikCVSpec s;
  s.samples = 500;
  s.train = 325;
  s.n_lambda = 5;
  s.n_eps = 10;
  return s;
}

double vapnik_truth(double t) { return std::exp(std::sin(8.0 * t)); }

int count_support_vectors(const Eigen::VectorXd& residuals, double eps, double tol) {
  return static_cast<int>((residuals.array().abs() > eps - tol).count());
}

VapnikCVResult run_vapnik_cv(const VapnikCVSpec& spec) {
  spec.validate();
  const int n = spec.samples;
  VapnikCVResult res;
  res.t = time_grid(n, 1.0 / n);
  res.truth.resize(n);
  res.z.resize(n);
  RandomStream noise_rng({spec.seed, 0, 0, NoiseRole::kMeasurement});
  const NoiseMixtureSpec noise{spec.p, spec.base_var, spec.phi};
  for (int k = 0; k < n; ++k) {
    res.truth(k) = vapnik_truth(res.t[k]);
    res.z(k) = res.truth(k) + draw_mixture(noise_rng, noise);
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RandomStream split_rng({spec.seed, 0, 0, NoiseRole::kSplit});
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<int>(split_rng.below(static_cast<std::uint64_t>(i) + 1))]);
  }
  res.train_idx.assign(perm.begin(), perm.begin() + spec.train);
  res.val_idx.assign(perm.begin() + spec.train, perm.end());
  std::sort(res.train_idx.begin(), res.train_idx.end());
  std::sort(res.val_idx.begin(), res.val_idx.end());

  // f(0) = 1 is known, so the state models f - 1.
  std::vector<Eigen::VectorXd> ztrain(n, Eigen::VectorXd(0));
  for (int k : res.train_idx) ztrain[k] = Eigen::VectorXd::Constant(1, res.z(k) - 1.0);

  auto model_for = [&](double lambda2) {
    SmoothSignalParams p;
    p.N = n;
    p.dt = 1.0 / n;
    p.sigma2 = lambda2;
    p.R = spec.R;
    LinearStateSpace m = smooth_signal_model(p);
    for (int k = 0; k < n; ++k) {
      if (ztrain[k].size() == 0) {
        m.H[k] = Eigen::MatrixXd(0, 2);
        m.R[k] = Eigen::MatrixXd(0, 0);
      }
    }
    m.z = ztrain;
    return m;
  };
  auto val_error = [&](const BlockVector& x) {
    double e = 0.0;
    for (int k : res.val_idx) {
      const double d = res.z(k) - (x.block(k)(1) + 1.0);
      e += d * d;
    }
    return e / static_cast<double>(res.val_idx.size());
  };

  for (int i = 0; i < spec.n_lambda; ++i) {
    const double frac = spec.n_lambda == 1 ? 0.0 : double(i) / (spec.n_lambda - 1);
    res.lambda_grid.push_back(spec.lambda_min * std::pow(spec.lambda_max / spec.lambda_min, frac));
  }
  for (int j = 0; j < spec.n_eps; ++j) {
    const double frac = spec.n_eps == 1 ? 0.0 : double(j) / (spec.n_eps - 1);
    res.eps_grid.push_back(spec.eps_min + frac * (spec.eps_max - spec.eps_min));
  }

  IPOptions ip;
  ip.max_iter = 200;
  res.vapnik_error.resize(spec.n_lambda, spec.n_eps);
  res.gaussian_error.resize(spec.n_lambda);
  int bi = 0, bj = 0, gi = 0;
  for (int i = 0; i < spec.n_lambda; ++i) {
    const LinearStateSpace m = model_for(res.lambda_grid[i]);
    res.gaussian_error(i) = val_error(smooth(m).x);
    if (res.gaussian_error(i) < res.gaussian_error(gi)) gi = i;
    for (int j = 0; j < spec.n_eps; ++j) {
      res.vapnik_error(i, j) =
          val_error(smooth_plq(m, plq_l2(), plq_vapnik(res.eps_grid[j]), ip).x);
      if (res.vapnik_error(i, j) < res.vapnik_error(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  res.best_lambda2 = res.lambda_grid[bi];
  res.best_eps = res.eps_grid[bj];
  res.vapnik_val_mse = res.vapnik_error(bi, bj);
  res.gaussian_lambda2 = res.lambda_grid[gi];
  res.gaussian_val_mse = res.gaussian_error(gi);

  const LinearStateSpace best = model_for(res.best_lambda2);
  res.vapnik_fit = smooth_plq(best, plq_l2(), plq_vapnik(res.best_eps), ip).x;
  res.gaussian_fit = smooth(model_for(res.gaussian_lambda2)).x;
  Eigen::VectorXd resid(res.train_idx.size());
  for (std::size_t i = 0; i < res.train_idx.size(); ++i) {
    const int k = res.train_idx[i];
    resid(static_cast<Eigen::Index>(i)) =
        (ztrain[k](0) - res.vapnik_fit.block(k)(1)) / std::sqrt(spec.R);
  }
  res.support_vectors = count_support_vectors(resid, res.best_eps);
  return res;
}

std::vector<std::string> scenario_names() {
  return {"sine",     "robust-linear",    "box-sine", "variable-box",
          "vanderpol", "robust-vanderpol", "ship"};
}

std::vector<std::string> scenario_parameters(const std::string& name) {
  if (name == "sine") return {"N", "horizon", "sigma2", "R"};
  if (name == "robust-linear") return {"N", "horizon", "sigma2", "R", "p", "phi"};
  if (name == "vanderpol" || name == "robust-vanderpol") {
    return {"N", "horizon", "mu", "R", "truth_var", "p", "phi"};
  }
  if (name == "box-sine") return {"N", "horizon", "sigma2", "R"};
  if (name == "variable-box") return {"N", "horizon", "sigma2", "R", "alpha", "beta"};
  if (name == "ship") return {"N", "sigma2"};
  throw InvalidParameter(kModule, "unknown scenario '" + name + "'");
}

Scenario make_scenario(const std::string& name, const ScenarioParams& params,
                       std::uint64_t seed) {
  const auto allowed = scenario_parameters(name);
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidParameter(kModule, "scenario '" + name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw InvalidParameter(kModule, "parameter '" + key + "' is not finite");
  }
  Scenario sc;
  sc.name = name;

  if (name == "sine" || name == "robust-linear") {
    const bool robust = name == "robust-linear";
    RobustLinearTableSpec d;
    d.N = get_int(params, "N", 100);
    d.horizon = get(params, "horizon", 4.0 * std::numbers::pi);
    d.sigma2 = get(params, "sigma2", 1.0);
    d.R = get(params, "R", robust ? 0.25 : 0.35 * 0.35);
    d.base_var = d.R;
    d.validate();
    const LinearStateSpace base = linear_table_model(d);
    sc.t = time_grid(d.N, d.horizon / d.N);
    sc.truth = circle_truth(sc.t, robust ? -1.0 : 1.0);
    NoiseMixtureSpec noise{robust ? get(params, "p", 0.1) : 0.0, d.R,
                           robust ? get(params, "phi", 100.0) : d.R};
    noise.validate();
    RandomStream rng({seed, 0, 0, NoiseRole::kMeasurement});
    sc.linear = with_measurements(base, measurements_of(base, sc.truth, rng, noise));
    sc.model = as_nonlinear(*sc.linear);
    return sc;
  }

  if (name == "box-sine" || name == "variable-box") {
    const bool variable = name == "variable-box";
    RobustLinearTableSpec d;
    d.N = get_int(params, "N", 100);
    d.horizon = get(params, "horizon", 4.0 * std::numbers::pi);
    d.sigma2 = get(params, "sigma2", 1.0);
    d.R = get(params, "R", 1.0);
    d.validate();
    const double alpha = get(params, "alpha", 0.2);
    const double beta = get(params, "beta", 2.0);
    if (!(alpha >= 0.0)) throw InvalidParameter(kModule, "alpha must be nonnegative");
    const LinearStateSpace base = linear_table_model(d);
    sc.t = time_grid(d.N, d.horizon / d.N);
    std::vector<double> lower(d.N, -1.0), upper(d.N, 1.0);
    if (variable) {
      sc.truth = BlockVector(2, d.N);
      for (int k = 0; k < d.N; ++k) {
        const double t = sc.t[k];
        const double e = std::exp(-alpha * t);
        sc.truth.block(k) << e * (beta * std::cos(beta * t) - alpha * std::sin(beta * t)) + 0.1,
            e * std::sin(beta * t) + 0.1 * t;
        lower[k] = 0.1 * t - e;
        upper[k] = 0.1 * t + e;
      }
    } else {
      sc.truth = circle_truth(sc.t, 1.0);
    }
    RandomStream rng({seed, 0, 0, NoiseRole::kMeasurement});
    sc.linear = with_measurements(base, measurements_of(base, sc.truth, rng, {0.0, d.R, d.R}));
    sc.model = as_nonlinear(*sc.linear);
    sc.bounds = smooth_signal_bounds(lower, upper);
    return sc;
  }

  if (name == "vanderpol" || name == "robust-vanderpol") {
    const bool robust = name == "robust-vanderpol";
    VanDerPolParams p = robust ? vanderpol_robust_params() : vanderpol_simple_params();
    p.N = get_int(params, "N", p.N);
    p.dt = get(params, "horizon", robust ? 16.0 : 30.0) / p.N;
    p.mu = get(params, "mu", p.mu);
    p.R = get(params, "R", p.R);
    const double truth_var = get(params, "truth_var", 0.01);
    if (!(truth_var >= 0.0)) throw InvalidParameter(kModule, "truth_var must be nonnegative");
    const NonlinearStateSpace base = vanderpol_model(p);
    SimulationOptions opts;
    opts.truth_Q.assign(p.N, truth_var * Eigen::MatrixXd::Identity(2, 2));
    opts.noise = NoiseMixtureSpec{get(params, "p", robust ? 0.1 : 0.0), p.R,
                                  get(params, "phi", robust ? 1000.0 : p.R)};
    opts.noise->validate();
    const Simulation sim = simulate(base, seed, opts);
    sc.t = time_grid(p.N, p.dt);
    sc.truth = sim.truth;
    sc.model = with_measurements(base, sim.z);
    return sc;
  }

  // ship
  ShipParams p;
  p.N = get_int(params, "N", p.N);
  p.dt = 2.0 * std::numbers::pi / p.N;
  p.sigma2 = get(params, "sigma2", p.sigma2);
  auto [model, con] = ship_model(p);
  sc.t = time_grid(p.N, p.dt);
  sc.truth = BlockVector(4, p.N);
  for (int k = 0; k < p.N; ++k) sc.truth.block(k) = ship_truth(sc.t[k]);
  RandomStream rng({seed, 0, 0, NoiseRole::kMeasurement});
  sc.model = with_measurements(model, measure(model, sc.truth, rng, std::nullopt));
  sc.constraints = std::move(con);
  BlockVector x0(4, p.N);
  for (int k = 0; k < p.N; ++k) x0.block(k) << 0.0, 0.0, 0.0, 1.0;
  sc.x_init = std::move(x0);
  return sc;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_replications_csv(const MSEReport& report, std::ostream& out) {
  out << "cell_p,cell_phi,method,replication,mse\n";
  for (const auto& cell : report.cells) {
    for (const auto& m : cell.methods) {
      for (std::size_t r = 0; r < m.mse.size(); ++r) {
        out << format_double(cell.p) << ',' << format_double(cell.phi) << ',' << m.method << ','
            << r << ',' << format_double(m.mse[r]) << '\n';
      }
    }
  }
}

void write_summary_csv(const MSEReport& report, std::ostream& out) {
  out << "cell_p,cell_phi,method,median,lo95,hi95\n";
  for (const auto& cell : report.cells) {
    for (const auto& m : cell.methods) {
      out << format_double(cell.p) << ',' << format_double(cell.phi) << ',' << m.method << ','
          << format_double(m.median) << ',' << format_double(m.lo95) << ','
          << format_double(m.hi95) << '\n';
    }
  }
}

}  // namespace ksmooth
