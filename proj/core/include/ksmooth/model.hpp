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

#ifndef KSMOOTH_MODEL_HPP_
#define KSMOOTH_MODEL_HPP_

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"

namespace ksmooth {

// Linear-Gaussian state-space model over N time steps (0-based k):
//
//   x_0 = G[0] x_prev + w_0   (x_prev known; enters through `w`)
//   x_k = G[k] x_{k-1} + w_k  k >= 1
//   z_k = H[k] x_k + v_k
//
// `w` is the stacked prior vector of the least-squares form: block 0 holds
// the prior mean of x_0, the remaining blocks are whatever right-hand side the
// caller needs (zero for a plain model, nonzero for Gauss-Newton subproblems).
// Measurement dimension may vary per step; z[k].size() == 0 means no
// measurement at k.
struct LinearStateSpace {
  std::vector<Eigen::MatrixXd> G;
  std::vector<Eigen::MatrixXd> Q;
  std::vector<Eigen::MatrixXd> H;
  std::vector<Eigen::MatrixXd> R;
  std::vector<Eigen::VectorXd> z;
  BlockVector w;

  int state_dim() const { return w.block_size(); }
  int num_steps() const { return static_cast<int>(Q.size()); }
  int measurement_dim(int k) const { return static_cast<int>(z[k].size()); }
  int total_measurements() const;

  // Throws ShapeMismatch or NotPositiveDefinite.
  void validate() const;
};

// Builds `w` from a prior mean for x_0 (the g_1(x_0) term).
LinearStateSpace make_linear_model(std::vector<Eigen::MatrixXd> G,
                                   std::vector<Eigen::MatrixXd> Q,
                                   std::vector<Eigen::MatrixXd> H,
                                   std::vector<Eigen::MatrixXd> R,
                                   std::vector<Eigen::VectorXd> z,
                                   const Eigen::VectorXd& initial_mean);

using VectorMap = std::function<Eigen::VectorXd(int k, const Eigen::VectorXd&)>;
using JacobianMap = std::function<Eigen::MatrixXd(int k, const Eigen::VectorXd&)>;

// Nonlinear state-space model. `process(k, x)` is g_k applied to x_{k-1}
// (k = 0 maps the known initial state `x0`); `measurement(k, x)` is h_k.
// When a Jacobian map is empty, central differences are used instead.
struct NonlinearStateSpace {
  int n = 0;
  int N = 0;
  Eigen::VectorXd x0;
  Eigen::VectorXd initial_mean;  // g_1(x_0) as given to the smoother
  VectorMap process;
  JacobianMap process_jacobian;
  VectorMap measurement;
  JacobianMap measurement_jacobian;
  std::vector<Eigen::MatrixXd> Q;
  std::vector<Eigen::MatrixXd> R;
  std::vector<Eigen::VectorXd> z;

  bool uses_finite_differences() const {
    return !process_jacobian || !measurement_jacobian;
  }
  Eigen::MatrixXd process_jac(int k, const Eigen::VectorXd& x) const;
  Eigen::MatrixXd measurement_jac(int k, const Eigen::VectorXd& x) const;

  // Stacked prior vector w: initial_mean in block 0, zeros after.
  BlockVector prior_vector() const;

  void validate() const;
};

// Wraps an affine model so the nonlinear machinery can consume it. `w`
// blocks beyond 0 must be zero.
NonlinearStateSpace as_nonlinear(const LinearStateSpace& model);

// Replaces the measurement sequence.
NonlinearStateSpace with_measurements(NonlinearStateSpace model,
                                      std::vector<Eigen::VectorXd> z);
LinearStateSpace with_measurements(LinearStateSpace model,
                                   std::vector<Eigen::VectorXd> z);

// Per-step affine inequality constraints B[k] x_k <= b[k].
struct AffineConstraints {
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::VectorXd> b;

  int total() const;
};

// Per-step smooth constraints xi_k(x_k) <= b[k].
struct NonlinearConstraints {
  VectorMap xi;
  JacobianMap jacobian;
  std::vector<Eigen::VectorXd> b;
};

// B^nu = xi'(x), b^nu = b - xi(x): the constraint of the direction subproblem.
AffineConstraints linearize(const NonlinearConstraints& c, const BlockVector& x);

// max_i (xi(x) - b)_i, or -inf when there are no constraints.
double max_violation(const NonlinearConstraints& c, const BlockVector& x);
double max_violation(const AffineConstraints& c, const BlockVector& x);

struct StackedEval {
  BlockVector g;                    // x_0, x_1 - g_1(x_0), ...
  std::vector<Eigen::VectorXd> h;   // h_k(x_k)
};

StackedEval eval_stacked(const NonlinearStateSpace& model, const BlockVector& x);

// Gauss-Newton subproblem at x as a linear model: G holds the process
// Jacobians, H the measurement Jacobians, w = w - g(x) and z = z - h(x).
LinearStateSpace linearize(const NonlinearStateSpace& model, const BlockVector& x);

// Central-difference Jacobian with step 1e-6 * (1 + |x|).
Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Model catalog.

// Integrated-Brownian-motion model of a smooth scalar signal. State is
// (derivative, value); only the value is measured.
struct SmoothSignalParams {
  int N = 100;
  double dt = 0.1;
  double sigma2 = 1.0;          // process intensity
  double R = 1.0;               // measurement variance
  Eigen::Vector2d initial_mean = Eigen::Vector2d::Zero();
  double initial_var = -1.0;    // <= 0 selects Q_k for the first step
};

Eigen::Matrix2d smooth_signal_transition(double dt);
Eigen::Matrix2d smooth_signal_covariance(double dt, double sigma2);

LinearStateSpace smooth_signal_model(const SmoothSignalParams& p);

// lower[k] <= value_k <= upper[k] on the smooth-signal state, written as
// B_k = [[0, 1], [0, -1]] and b_k = (upper[k], -lower[k]).
AffineConstraints smooth_signal_bounds(const std::vector<double>& lower,
                                       const std::vector<double>& upper);

// kExplicit evaluates the drift at x_{k-1}. kUpdated first advances x_1 and
// then solves x2' = x2 + (mu (1 - x1'^2) x2' - x1') dt for the new x_2; it
// stays bounded for mu dt < 1 where the explicit step blows up.
enum class VanDerPolScheme { kExplicit, kUpdated };

struct VanDerPolParams {
  double mu = 2.0;
  VanDerPolScheme scheme = VanDerPolScheme::kUpdated;
  int N = 80;
  double dt = 30.0 / 80.0;
  double Q1 = 0.1;
  double Q = 0.01;
  Eigen::Vector2d x0{0.0, -0.5};
  Eigen::Vector2d initial_mean{0.1, -0.4};
  double R = 1.0;
};

VanDerPolParams vanderpol_simple_params();  // N = 80, dt = 30/N
VanDerPolParams vanderpol_robust_params();  // N = 164, dt = 16/N

// Euler step of the Van der Pol oscillator and its Jacobian.
Eigen::Vector2d vanderpol_step(double mu, double dt, const Eigen::Vector2d& x,
                               VanDerPolScheme scheme = VanDerPolScheme::kExplicit);
Eigen::Matrix2d vanderpol_step_jacobian(double mu, double dt, const Eigen::Vector2d& x,
                                        VanDerPolScheme scheme = VanDerPolScheme::kExplicit);

NonlinearStateSpace vanderpol_model(const VanDerPolParams& p);

// Ship tracking near a sinusoidal shoreline. State is
// (vel_x, pos_x, vel_y, pos_y); two range measurements from stations at
// (0, 0) and (2 pi, 0); constraint 1.25 - sin(pos_x) - pos_y <= 0.
struct ShipParams {
  int N = 40;
  double dt = 2.0 * 3.14159265358979323846 / 40.0;
  double sigma2 = 0.05;  // measurement variance
};

Eigen::Vector4d ship_truth(double t);
Eigen::Matrix4d ship_transition(double dt);
Eigen::Matrix4d ship_process_covariance(double dt);
Eigen::Vector2d ship_ranges(const Eigen::Vector4d& x);
double ship_constraint(const Eigen::Vector4d& x);

std::pair<NonlinearStateSpace, NonlinearConstraints> ship_model(
    const ShipParams& p);

}  // namespace ksmooth

#endif  // KSMOOTH_MODEL_HPP_
