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

#ifndef KSMOOTH_EXPERIMENTS_HPP_
#define KSMOOTH_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/rng.hpp"
#include "ksmooth/smoother_linear.hpp"

namespace ksmooth {

// v ~ (1 - p) N(0, base_var) + p N(0, phi).
struct NoiseMixtureSpec {
  double p = 0.0;
  double base_var = 1.0;
  double phi = 1.0;

  void validate() const;
};

double draw_mixture(RandomStream& rng, const NoiseMixtureSpec& spec);

struct Simulation {
  BlockVector truth;
  std::vector<Eigen::VectorXd> z;
};

struct SimulationOptions {
  // Measurement noise; Gaussian with covariance R_k when unset. Mixtures
  // are drawn independently per component.
  std::optional<NoiseMixtureSpec> noise;
  // Process covariances used for the truth; the model's Q_k when empty.
  std::vector<Eigen::MatrixXd> truth_Q;
};

// x_k = g_k(x_{k-1}) + w_k starting from model.x0, z_k = h_k(x_k) + v_k.
Simulation simulate(const NonlinearStateSpace& model, const StreamKey& key,
                    const SimulationOptions& opts = {});
Simulation simulate(const NonlinearStateSpace& model, std::uint64_t seed,
                    const SimulationOptions& opts = {});

// Measurements of a known truth: z_k = h_k(truth_k) + v_k.
std::vector<Eigen::VectorXd> measure(const NonlinearStateSpace& model, const BlockVector& truth,
                                     RandomStream& rng,
                                     const std::optional<NoiseMixtureSpec>& noise);

// (1/N) sum_k |x_k - xhat_k|^2.
double mse(const BlockVector& estimate, const BlockVector& truth);

// Linear interpolation between order statistics, position q (n - 1).
double percentile(std::vector<double> values, double q);

struct MethodSummary {
  std::string method;
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  std::vector<double> mse;  // one per replication, in replication order
};

MethodSummary summarize(std::string method, std::vector<double> mse);

struct CellReport {
  double p = 0.0;
  double phi = 0.0;  // 0 when p = 0
  std::vector<MethodSummary> methods;

  const MethodSummary& method(const std::string& name) const;
};

struct MSEReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int replications = 0;
  std::vector<CellReport> cells;

  const CellReport& cell(double p, double phi) const;
};

struct Cell {
  double p = 0.0;
  double phi = 0.0;
};

struct RobustLinearTableSpec {
  int replications = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<Cell> cells{{0.0, 0.0}, {0.1, 1.0}, {0.1, 4.0}, {0.1, 10.0}, {0.1, 100.0}};
  int N = 100;
  double horizon = 4.0 * 3.14159265358979323846;  // dt = horizon / N
  double sigma2 = 1.0;
  double R = 0.25;
  double base_var = 0.25;
  Eigen::Vector2d initial_mean = Eigen::Vector2d::Zero();
  double initial_var = 1.0;
  bool outlier_baseline = true;

  void validate() const;
};

// Methods: "GKF" (filter), "IGS" (Gaussian smoother), "ILS" (l1 smoother)
// and optionally "ORB" (3-sigma outlier removal and refit).
MSEReport run_robust_linear_table(const RobustLinearTableSpec& spec);

struct RobustVdpTableSpec {
  int replications = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<Cell> cells{{0.0, 0.0},    {0.1, 10.0},  {0.2, 10.0},  {0.3, 10.0},
                          {0.1, 100.0},  {0.2, 100.0}, {0.3, 100.0}, {0.1, 1000.0},
                          {0.2, 1000.0}, {0.3, 1000.0}};
  VanDerPolParams model = vanderpol_robust_params();
  double truth_var = 0.01;

  void validate() const;
};

// Methods: "IGS" (Gauss-Newton) and "ILS" (l1 Gauss-Newton).
MSEReport run_robust_vdp_table(const RobustVdpTableSpec& spec);

struct OutlierRemovalResult {
  SmootherSolution solution;
  std::vector<int> removed;  // steps whose measurement was dropped
};

// Gaussian fit, drop measurements with a component residual above
// `threshold` standard deviations, refit once.
OutlierRemovalResult outlier_removal_baseline(const LinearStateSpace& model,
                                              double threshold = 3.0);

struct VapnikCVSpec {
  int samples = 2000;
  int train = 1300;
  int n_lambda = 10;
  int n_eps = 20;
  double lambda_min = 0.01;
  double lambda_max = 10000.0;
  double eps_min = 0.0;
  double eps_max = 1.0;
  double p = 0.1;
  double base_var = 0.25;
  double phi = 25.0;
  double R = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

VapnikCVSpec vapnik_desk_spec();  // 500 samples, 5 x 10 grid

struct VapnikCVResult {
  std::vector<double> lambda_grid;
  std::vector<double> eps_grid;
  Eigen::MatrixXd vapnik_error;     // validation MSE, lambda x eps
  Eigen::VectorXd gaussian_error;   // validation MSE per lambda
  double best_lambda2 = 0.0;
  double best_eps = 0.0;
  double vapnik_val_mse = 0.0;
  double gaussian_lambda2 = 0.0;
  double gaussian_val_mse = 0.0;
  int support_vectors = 0;
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  std::vector<double> t;
  Eigen::VectorXd z;      // raw samples f(t) + v
  Eigen::VectorXd truth;  // f(t)
  BlockVector vapnik_fit;
  BlockVector gaussian_fit;
};

double vapnik_truth(double t);  // exp(sin 8 t)

// Counts residuals on or outside the epsilon band: |r| > eps - tol.
int count_support_vectors(const Eigen::VectorXd& residuals, double eps, double tol = 1e-6);

VapnikCVResult run_vapnik_cv(const VapnikCVSpec& spec);

// Single-realization scenarios for the command line tool.
struct Scenario {
  std::string name;
  std::vector<double> t;
  BlockVector truth;
  NonlinearStateSpace model;
  std::optional<LinearStateSpace> linear;
  std::optional<NonlinearConstraints> constraints;
  std::optional<AffineConstraints> bounds;
  std::optional<BlockVector> x_init;
};

using ScenarioParams = std::map<std::string, double>;

std::vector<std::string> scenario_names();
// Accepted parameter names for a scenario.
std::vector<std::string> scenario_parameters(const std::string& name);

// Throws InvalidParameter on unknown names or parameters.
Scenario make_scenario(const std::string& name, const ScenarioParams& params,
                       std::uint64_t seed);

// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_replications_csv(const MSEReport& report, std::ostream& out);
void write_summary_csv(const MSEReport& report, std::ostream& out);

}  // namespace ksmooth

#endif  // KSMOOTH_EXPERIMENTS_HPP_
