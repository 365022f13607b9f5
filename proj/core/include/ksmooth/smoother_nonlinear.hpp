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

#ifndef KSMOOTH_SMOOTHER_NONLINEAR_HPP_
#define KSMOOTH_SMOOTHER_NONLINEAR_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/smoother_linear.hpp"

namespace ksmooth {

struct GNOptions {
  int max_iter = 100;
  double lambda = 0.5;     // backtracking factor
  double kappa = 1e-3;     // sufficient-decrease constant
  double tol = -1.0;       // stop when |model decrease| <= tol; <= 0 selects 1e-8 (1 + f(x0))
  int max_backtracks = 52;

  void validate() const;
};

struct GNIteration {
  double objective = 0.0;       // f(x^nu)
  double model_decrease = 0.0;  // f~(d^nu) - f(x^nu)
  double step = 0.0;            // gamma^nu (0 for the terminating iteration)
  int backtracks = 0;
  int inner_iterations = 0;
};

struct GNTrace {
  std::vector<GNIteration> iterations;
  SolveStatus status = SolveStatus::kConverged;
};

struct GNDirection {
  BlockVector d;
  double model_decrease = 0.0;
  int inner_iterations = 0;
};

using TrajectoryFunction = std::function<double(const BlockVector&)>;
using DirectionFunction = std::function<GNDirection(const BlockVector&)>;

struct ArmijoResult {
  double step = 1.0;
  int backtracks = 0;
  double objective = 0.0;  // f(x + step d)
};

// Backtracking: the smallest s with
//   f(x + lambda^s d) <= f(x) + kappa lambda^s delta.
// Requires delta < 0. Throws LineSearchFailed after opts.max_backtracks.
ArmijoResult armijo_search(const TrajectoryFunction& f, const BlockVector& x,
                           const BlockVector& d, double delta, double fx,
                           const GNOptions& opts);

// Gauss-Newton for a convex-composite objective: `direction` returns the
// minimizer of the convexified model and its decrease f~(d) - f(x).
std::pair<SmootherSolution, GNTrace> gauss_newton(const TrajectoryFunction& f,
                                                  const DirectionFunction& direction,
                                                  BlockVector x, const GNOptions& opts);

// 1/2 |g(x) - w|^2_{Q^{-1}} + 1/2 |h(x) - z|^2_{R^{-1}}.
double nlls_objective(const NonlinearStateSpace& model, const BlockVector& x);

GNDirection gn_direction(const NonlinearStateSpace& model, const BlockVector& x);

// x_0 = initial mean, x_k = g_k(x_{k-1}).
BlockVector default_initial_trajectory(const NonlinearStateSpace& model);

std::pair<SmootherSolution, GNTrace> smooth_nonlinear(
    const NonlinearStateSpace& model, std::optional<BlockVector> x_init = std::nullopt,
    const GNOptions& opts = {});

}  // namespace ksmooth

#endif  // KSMOOTH_SMOOTHER_NONLINEAR_HPP_
