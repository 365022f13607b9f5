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

#include "ksmooth/smoother_nonlinear.hpp"

#include <cmath>
#include <string>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {
constexpr const char* kModule = "smoother_nonlinear";
}  // namespace

void GNOptions::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParameter(kModule, "lambda must be in (0,1)");
  if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidParameter(kModule, "kappa must be in (0,1)");
  if (max_iter < 1) throw InvalidParameter(kModule, "max_iter must be positive");
  if (max_backtracks < 0) throw InvalidParameter(kModule, "max_backtracks must be nonnegative");
}

ArmijoResult armijo_search(const TrajectoryFunction& f, const BlockVector& x,
                           const BlockVector& d, double delta, double fx,
                           const GNOptions& opts) {
  if (!(delta < 0.0)) {
    throw InvalidParameter(kModule, "line search needs a negative model decrease");
  }
  double step = 1.0;
  BlockVector trial = x;
  for (int s = 0; s <= opts.max_backtracks; ++s) {
    trial.data() = x.data() + step * d.data();
    const double ft = f(trial);
    if (std::isfinite(ft) && ft <= fx + opts.kappa * step * delta) {
      return {step, s, ft};
    }
    step *= opts.lambda;
  }
  throw LineSearchFailed(kModule, "no Armijo step after " +
                                      std::to_string(opts.max_backtracks) + " backtracks");
}

std::pair<SmootherSolution, GNTrace> gauss_newton(const TrajectoryFunction& f,
                                                  const DirectionFunction& direction,
                                                  BlockVector x, const GNOptions& opts) {
  opts.validate();
  SmootherSolution sol;
  GNTrace trace;
  double fx = f(x);
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-8 * (1.0 + std::abs(fx));
  trace.status = SolveStatus::kMaxIterReached;
  for (int it = 0; it < opts.max_iter; ++it) {
    const GNDirection dir = direction(x);
    GNIteration rec;
    rec.objective = fx;
    rec.model_decrease = dir.model_decrease;
    rec.inner_iterations = dir.inner_iterations;
    sol.objective_trace.push_back(fx);
    sol.residual_trace.push_back(std::abs(dir.model_decrease));
    sol.inner_iterations.push_back(dir.inner_iterations);
    if (std::abs(dir.model_decrease) <= tol || dir.model_decrease >= 0.0) {
      trace.iterations.push_back(rec);
      trace.status = SolveStatus::kConverged;
      sol.residual_norm = std::abs(dir.model_decrease);
      break;
    }
    const ArmijoResult ls = armijo_search(f, x, dir.d, dir.model_decrease, fx, opts);
    rec.step = ls.step;
    rec.backtracks = ls.backtracks;
    trace.iterations.push_back(rec);
    x.data() += ls.step * dir.d.data();
    fx = ls.objective;
    sol.residual_norm = std::abs(dir.model_decrease);
  }
  sol.x = std::move(x);
  sol.objective = fx;
  sol.iterations = static_cast<int>(trace.iterations.size());
  sol.status = trace.status;
  return {std::move(sol), std::move(trace)};
}

double nlls_objective(const NonlinearStateSpace& model, const BlockVector& x) {
  const StackedEval ev = eval_stacked(model, x);
  double f = 0.0;
  for (int k = 0; k < model.N; ++k) {
    const Eigen::VectorXd rw = ev.g.block(k) - (k == 0 ? model.initial_mean
                                                       : Eigen::VectorXd::Zero(model.n));
    f += 0.5 * rw.dot(model.Q[k].llt().solve(rw));
    if (model.z[k].size() > 0) {
      const Eigen::VectorXd rv = ev.h[k] - model.z[k];
      f += 0.5 * rv.dot(model.R[k].llt().solve(rv));
    }
  }
  return f;
}

GNDirection gn_direction(const NonlinearStateSpace& model, const BlockVector& x) {
  const LinearStateSpace sub = linearize(model, x);
  GNDirection out;
  out.d = smooth(sub).x;
  // The linearized objective at d = 0 equals f(x).
  out.model_decrease = objective(sub, out.d) - objective(sub, BlockVector(model.n, model.N));
  out.inner_iterations = 1;
  return out;
}

BlockVector default_initial_trajectory(const NonlinearStateSpace& model) {
  BlockVector x(model.n, model.N);
  x.block(0) = model.initial_mean;
  for (int k = 1; k < model.N; ++k) x.block(k) = model.process(k, x.block(k - 1));
  return x;
}

std::pair<SmootherSolution, GNTrace> smooth_nonlinear(const NonlinearStateSpace& model,
                                                      std::optional<BlockVector> x_init,
                                                      const GNOptions& opts) {
  model.validate();
  BlockVector x = x_init ? std::move(*x_init) : default_initial_trajectory(model);
  if (x.block_size() != model.n || x.num_blocks() != model.N) {
    throw ShapeMismatch(kModule, "initial trajectory shape does not match model");
  }
  return gauss_newton([&model](const BlockVector& y) { return nlls_objective(model, y); },
                      [&model](const BlockVector& y) { return gn_direction(model, y); },
                      std::move(x), opts);
}

}  // namespace ksmooth
