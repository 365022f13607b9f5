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

#ifndef KSMOOTH_ROBUST_L1_HPP_
#define KSMOOTH_ROBUST_L1_HPP_

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/constrained.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/smoother_linear.hpp"
#include "ksmooth/smoother_nonlinear.hpp"

namespace ksmooth {

// min_d 1/2 d^T C d + c^T d + sqrt(2) |B d + b|_1 + offset
//
// with C = G^T Q^{-1} G, c = -G^T Q^{-1} w, B = R^{-1/2} H, b = -R^{-1/2} z
// (R^{-1/2} is the inverse lower Cholesky factor). B is block diagonal.
struct L1QP {
  BlockTriMatrix C;
  BlockVector c;
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::VectorXd> b;
  double offset = 0.0;

  int total_measurements() const;
  Eigen::VectorXd residual(const BlockVector& d) const;  // B d + b, stacked
  double value(const BlockVector& d) const;
};

L1QP build_l1_qp(const LinearStateSpace& model);

// Iterate of the interior-point method on the split form
//   B d + b = p+ - p-,  p+, p- >= 0
// with multipliers s+, s- of the sign constraints.
struct L1IPState {
  Eigen::VectorXd p_plus, p_minus, s_plus, s_minus;
  BlockVector d;
  double mu = 1.0;
  int iteration = 0;
};

struct L1Residual {
  Eigen::VectorXd split;      // p+ - p- - b - B d
  Eigen::VectorXd comp_minus; // p- .* s- - mu
  Eigen::VectorXd sum;        // s+ + s- - 2 sqrt(2)
  Eigen::VectorXd comp_plus;  // p+ .* s+ - mu
  BlockVector stationarity;   // C d + c + B^T (s- - s+) / 2

  double norm_inf() const;
};

L1Residual l1_residual(const L1IPState& st, const L1QP& qp, double mu);

struct L1Direction {
  Eigen::VectorXd dp_plus, dp_minus, ds_plus, ds_minus;
  BlockVector dd;
};

// Newton direction for F_mu, reduced to a block-tridiagonal solve with
// C + B^T T^{-1} B, T = diag(p+ / s+ + p- / s-).
L1Direction l1_direction(const L1IPState& st, const L1QP& qp);

// The reduced matrix C + B^T T^{-1} B at the given state.
BlockTriMatrix l1_newton_matrix(const L1IPState& st, const L1QP& qp);

L1IPState l1_initial_state(const L1QP& qp);

struct L1QPSolution {
  BlockVector d;
  L1IPState state;
  int iterations = 0;
  double kkt_residual = 0.0;
};

// Interior point with the same mu schedule and damping as solve_qp_constrained.
L1QPSolution solve_l1_qp(const L1QP& qp, const IPOptions& opts = {});

// 1/2 |g(x) - w|^2_{Q^{-1}} + sqrt(2) |R^{-1/2}(h(x) - z)|_1.
double l1_objective(const NonlinearStateSpace& model, const BlockVector& x);

GNDirection l1_direction_gn(const NonlinearStateSpace& model, const BlockVector& x,
                            const IPOptions& ip = {});

struct RobustOptions {
  GNOptions gn;
  IPOptions ip;
};

std::pair<SmootherSolution, GNTrace> smooth_l1_laplace(
    const NonlinearStateSpace& model, std::optional<BlockVector> x_init = std::nullopt,
    const RobustOptions& opts = {});

// Affine models: a single subproblem solve.
SmootherSolution smooth_l1_laplace(const LinearStateSpace& model, const IPOptions& opts = {});

}  // namespace ksmooth

#endif  // KSMOOTH_ROBUST_L1_HPP_
