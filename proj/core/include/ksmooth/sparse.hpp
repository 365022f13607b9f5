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

#ifndef KSMOOTH_SPARSE_HPP_
#define KSMOOTH_SPARSE_HPP_

#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/constrained.hpp"
#include "ksmooth/smoother_linear.hpp"

namespace ksmooth {

// Diagonal weights W (one per state entry, stacked by step), and either a
// penalty weight lambda or an l1 radius tau.
struct SparsePenaltySpec {
  Eigen::VectorXd w;
  double lambda = 0.0;
  double tau = 0.0;

  void validate(Eigen::Index size) const;
};

// Weight 1 on the listed state components at every step, 0 elsewhere.
Eigen::VectorXd component_weights(int n, int N, const std::vector<int>& components,
                                  double weight = 1.0);

// sign(v) max(|v| - t w, 0), componentwise.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double t);

// 1/2 x^T C x - c^T x + lambda |W x|_1 (the NormalSystem offset is included).
double sparse_objective(const NormalSystem& sys, const SparsePenaltySpec& spec,
                        const BlockVector& x);

// |x - prox(x - (C x - c))|_inf: zero exactly at the penalized minimizer.
double prox_gradient_residual(const NormalSystem& sys, const SparsePenaltySpec& spec,
                              const BlockVector& x);

// Interior point state for
//   min 1/2 x^T C x - c^T x + lambda 1^T y  s.t.  -y <= W x <= y
// with slacks s = y - W x, r = y + W x and multipliers q, p.
struct SparseIPState {
  BlockVector x;
  Eigen::VectorXd y, s, r, q, p;
  double mu = 0.0;
  int iteration = 0;
};

// Diagonal of W Phi^{-1} (Phi^2 - Psi^2) W with Phi = q/s + p/r, Psi = q/s - p/r.
// Phi^2 - Psi^2 is formed explicitly here; the solver uses 4 q p / (s r).
Eigen::VectorXd sparse_reduced_diagonal(const SparseIPState& st, const Eigen::VectorXd& w);

SparseIPState sparse_initial_state(const NormalSystem& sys, const SparsePenaltySpec& spec);

SmootherSolution sparse_smooth_penalized(const NormalSystem& sys, const SparsePenaltySpec& spec,
                                         const IPOptions& opts = {});

// argmin |v' - v|_2 s.t. |W v'|_1 <= tau. Sort-based; entries with w_i = 0 pass through.
Eigen::VectorXd project_weighted_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                    double tau);

struct LassoOptions {
  int max_iter = 20000;
  double tol = 1e-6;         // projected-gradient norm relative to 1 + |c|
  int window = 10;           // nonmonotone reference length
  double sufficient = 1e-4;  // Armijo constant
  double step_min = 1e-10;
  double step_max = 1e10;

  void validate() const;
};

// objective_trace holds the value of every accepted iterate.
SmootherSolution sparse_smooth_lasso(const NormalSystem& sys, const SparsePenaltySpec& spec,
                                     const LassoOptions& opts = {});

// Multiplier of the l1-ball constraint at a LASSO solution: the lambda for
// which x also solves the penalized problem.
double lasso_multiplier(const NormalSystem& sys, const SparsePenaltySpec& spec,
                        const BlockVector& x);

}  // namespace ksmooth

#endif  // KSMOOTH_SPARSE_HPP_
