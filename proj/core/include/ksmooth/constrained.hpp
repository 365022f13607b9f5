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

#ifndef KSMOOTH_CONSTRAINED_HPP_
#define KSMOOTH_CONSTRAINED_HPP_

#include <optional>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/smoother_linear.hpp"
#include "ksmooth/smoother_nonlinear.hpp"

namespace ksmooth {

struct IPOptions {
  int max_iter = 100;
  double mu0 = -1.0;                  // <= 0: start at u^T s / len
  double kkt_tol = 1e-9;              // stationarity and primal residual tolerance
  double complementarity_tol = 1e-10; // max_i u_i s_i at termination
  double fraction_to_boundary = 0.995;

  void validate() const;
};

// Primal-dual iterate for  min 1/2 x^T C x - c^T x  s.t.  B x + s = b, s >= 0.
struct IPState {
  BlockVector x;
  Eigen::VectorXd u;
  Eigen::VectorXd s;
  double mu = 1.0;
  int iteration = 0;  // drives the mu schedule
};

// Components of the relaxed KKT map F_mu.
struct IPResidual {
  Eigen::VectorXd primal;        // s + B x - b
  Eigen::VectorXd complementarity;  // s .* u - mu
  BlockVector stationarity;      // C x + B^T u - c

  double norm_inf() const;
};

// Stacked operators for per-step block-diagonal B.
Eigen::VectorXd apply_constraints(const AffineConstraints& con, const BlockVector& x);
BlockVector apply_constraints_transpose(const AffineConstraints& con,
                                        const Eigen::VectorXd& v, int n);
Eigen::VectorXd stacked_bounds(const AffineConstraints& con);

IPResidual ip_residual(const IPState& state, const NormalSystem& sys,
                       const AffineConstraints& con, double mu);

// Newton matrix of the eliminated system, C + B^T S^{-1} U B. It has the
// same block pattern as C.
BlockTriMatrix ip_newton_matrix(const IPState& state, const NormalSystem& sys,
                                const AffineConstraints& con);

struct IPDirection {
  BlockVector dx;
  Eigen::VectorXd du;
  Eigen::VectorXd ds;
};

// Newton direction for F_mu at the current state (mu = state.mu).
IPDirection ip_direction(const IPState& state, const NormalSystem& sys,
                         const AffineConstraints& con);

// One damped Newton step followed by the mu update (mu / 10 on two of every
// three iterations).
IPState ip_step(const IPState& state, const NormalSystem& sys,
                const AffineConstraints& con, const IPOptions& opts = {});

struct ConstrainedSolution {
  SmootherSolution solution;
  Eigen::VectorXd u;  // multipliers of B x <= b, stacked by step
  Eigen::VectorXd s;  // slacks
};

// Throws Infeasible when the iteration diverges with a nonzero primal
// residual and MaxIterReached otherwise.
ConstrainedSolution solve_qp_constrained(const NormalSystem& sys,
                                         const AffineConstraints& con,
                                         const IPOptions& opts = {});

struct ConstrainedGNOptions {
  GNOptions gn;
  IPOptions ip;
  double feasibility_tol = 1e-6;
};

// Gauss-Newton for  min f(x)  s.t.  xi(x) <= b, with each direction from the
// linearized constrained subproblem and an exact-penalty merit function
// f(x) + pi * sum max(xi(x) - b, 0) for the line search. pi is kept above
// twice the largest subproblem multiplier.
SmootherSolution smooth_constrained_nonlinear(const NonlinearStateSpace& model,
                                              const NonlinearConstraints& con,
                                              std::optional<BlockVector> x_init = std::nullopt,
                                              const ConstrainedGNOptions& opts = {});

}  // namespace ksmooth

#endif  // KSMOOTH_CONSTRAINED_HPP_
