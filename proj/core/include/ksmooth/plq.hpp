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

#ifndef KSMOOTH_PLQ_HPP_
#define KSMOOTH_PLQ_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/constrained.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/smoother_linear.hpp"

namespace ksmooth {

// rho(y) = sup_{u in U} <u, b + B y> - 1/2 <u, M u>,  U = {u : A^T u <= a}.
//
// Catalog entries are scalar penalties (y in R) or componentwise stacks of
// them, and keep `kind`/`param`/`scale` so they can be evaluated in closed
// form. `scale` multiplies B.
struct PLQPenalty {
  enum class Kind { kGeneral, kL2, kL1, kHuber, kVapnik };

  Kind kind = Kind::kGeneral;
  double param = 0.0;  // K for Huber, epsilon for Vapnik
  double scale = 1.0;

  Eigen::MatrixXd A;  // m x l
  Eigen::VectorXd a;  // l
  Eigen::MatrixXd M;  // m x m
  Eigen::VectorXd b;  // m
  Eigen::MatrixXd B;  // m x r

  int dual_dim() const { return static_cast<int>(M.rows()); }
  int num_constraints() const { return static_cast<int>(a.size()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  bool in_catalog() const { return kind != Kind::kGeneral; }

  // Throws ShapeMismatch or InvalidParameter (M not PSD, B not injective).
  void validate() const;
};

std::string to_string(PLQPenalty::Kind kind);

PLQPenalty plq_l2(double scale = 1.0);
PLQPenalty plq_l1(double scale = 1.0);
PLQPenalty plq_huber(double K, double scale = 1.0);
PLQPenalty plq_vapnik(double eps, double scale = 1.0);
PLQPenalty plq_general(Eigen::MatrixXd A, Eigen::VectorXd a, Eigen::MatrixXd M,
                       Eigen::VectorXd b, Eigen::MatrixXd B);

// Applies a scalar penalty to each of d components (block-diagonal stacking).
PLQPenalty componentwise(const PLQPenalty& scalar, int d);

// "l2", "l1", "huber(K)", "vapnik(eps)". Throws InvalidParameter.
PLQPenalty parse_penalty(const std::string& spec);

// Closed form for catalog entries, dual interior point otherwise.
// Throws Unbounded when the supremum is infinite.
double eval_plq(const PLQPenalty& rho, const Eigen::VectorXd& y);
double eval_plq(const PLQPenalty& rho, double y);

// Evaluates through the supremum definition even for catalog entries.
double eval_plq_sup(const PLQPenalty& rho, const Eigen::VectorXd& y);

// Maximizing dual vector of the supremum (any maximizer when not unique).
Eigen::VectorXd plq_dual_point(const PLQPenalty& rho, const Eigen::VectorXd& y);

// Throws NotInCatalog for general penalties.
bool check_coercivity_catalog(const PLQPenalty& rho);

// One penalty term rho(Kc x_k + Kp x_{k-1} + offset). Kp is empty for terms
// that only involve x_k.
struct PLQTerm {
  int k = 0;
  Eigen::MatrixXd Kc;
  Eigen::MatrixXd Kp;
  Eigen::VectorXd offset;
  PLQPenalty penalty;

  bool has_prev() const { return Kp.size() > 0; }
};

struct PLQProblem {
  int n = 0;
  int N = 0;
  std::vector<PLQTerm> terms;

  double value(const BlockVector& x) const;
  // Argument of term j's penalty at x.
  Eigen::VectorXd term_input(int j, const BlockVector& x) const;
};

// Process terms rho^w_k(Q_k^{-1/2}(x_k - G_k x_{k-1} - w_k)) and measurement
// terms rho^v_k(R_k^{-1/2}(H_k x_k - z_k)), with Q^{-1/2}, R^{-1/2} the inverse
// lower Cholesky factors. Penalties must have input dimension n (resp. m_k).
PLQProblem build_plq_problem(const LinearStateSpace& model,
                             const std::vector<PLQPenalty>& w_penalty,
                             const std::vector<PLQPenalty>& v_penalty);

struct PLQIPState {
  BlockVector x;
  std::vector<Eigen::VectorXd> u, q, s;  // per term
  double mu = 0.0;
  int iteration = 0;
};

struct PLQResidual {
  std::vector<Eigen::VectorXd> r1;  // A^T u + s - a
  std::vector<Eigen::VectorXd> r2;  // q .* s - mu
  std::vector<Eigen::VectorXd> r3;  // b + B y - M u - A q
  BlockVector r4;                   // sum_j K_j^T B_j^T u_j

  double linear_norm_inf() const;
  double complementarity_max() const;
};

PLQResidual plq_residual(const PLQIPState& st, const PLQProblem& prob, double mu);

// Reduced matrix sum_j K_j^T T_j^{-1} K_j with T_j = M_j + A_j S_j^{-1} Q_j A_j^T.
BlockTriMatrix plq_newton_matrix(const PLQIPState& st, const PLQProblem& prob);

struct PLQDirection {
  BlockVector dx;
  std::vector<Eigen::VectorXd> du, dq, ds;
};

PLQDirection plq_direction(const PLQIPState& st, const PLQProblem& prob);

PLQIPState plq_initial_state(const PLQProblem& prob, const BlockVector& x0);

SmootherSolution solve_plq(const PLQProblem& prob, const BlockVector& x0,
                           const IPOptions& opts = {});

SmootherSolution smooth_plq(const LinearStateSpace& model,
                            const std::vector<PLQPenalty>& w_penalty,
                            const std::vector<PLQPenalty>& v_penalty,
                            const IPOptions& opts = {});

// Scalar penalties applied componentwise at every step.
SmootherSolution smooth_plq(const LinearStateSpace& model, const PLQPenalty& w_scalar,
                            const PLQPenalty& v_scalar, const IPOptions& opts = {});

}  // namespace ksmooth

#endif  // KSMOOTH_PLQ_HPP_
