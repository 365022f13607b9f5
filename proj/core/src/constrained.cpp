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

#include "ksmooth/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "constrained";

// Largest alpha in (0, 1] with v + alpha dv >= (1 - tau) v.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -tau * v(i) / dv(i));
  }
  return alpha;
}

double positive_part_sum(const Eigen::VectorXd& v) {
  return v.cwiseMax(0.0).sum();
}

}  // namespace

void IPOptions::validate() const {
  if (max_iter < 1) throw InvalidParameter(kModule, "max_iter must be positive");
  if (!(kkt_tol > 0.0) || !(complementarity_tol > 0.0)) {
    throw InvalidParameter(kModule, "tolerances must be positive");
  }
  if (!(fraction_to_boundary > 0.0 && fraction_to_boundary < 1.0)) {
    throw InvalidParameter(kModule, "fraction_to_boundary must be in (0,1)");
  }
}

double IPResidual::norm_inf() const {
  double r = stationarity.data().size() ? stationarity.data().lpNorm<Eigen::Infinity>() : 0.0;
  if (primal.size()) r = std::max(r, primal.lpNorm<Eigen::Infinity>());
  if (complementarity.size()) r = std::max(r, complementarity.lpNorm<Eigen::Infinity>());
  return r;
}

Eigen::VectorXd apply_constraints(const AffineConstraints& con, const BlockVector& x) {
  Eigen::VectorXd out(con.total());
  Eigen::Index off = 0;
  for (int k = 0; k < x.num_blocks(); ++k) {
    const auto l = con.b[k].size();
    if (l == 0) continue;
    out.segment(off, l) = con.B[k] * x.block(k);
    off += l;
  }
  return out;
}

BlockVector apply_constraints_transpose(const AffineConstraints& con,
                                        const Eigen::VectorXd& v, int n) {
  const int N = static_cast<int>(con.b.size());
  BlockVector out(n, N);
  Eigen::Index off = 0;
  for (int k = 0; k < N; ++k) {
    const auto l = con.b[k].size();
    if (l == 0) continue;
    out.block(k) = con.B[k].transpose() * v.segment(off, l);
    off += l;
  }
  return out;
}

Eigen::VectorXd stacked_bounds(const AffineConstraints& con) {
  Eigen::VectorXd out(con.total());
  Eigen::Index off = 0;
  for (const auto& bk : con.b) {
    out.segment(off, bk.size()) = bk;
    off += bk.size();
  }
  return out;
}

IPResidual ip_residual(const IPState& st, const NormalSystem& sys,
                       const AffineConstraints& con, double mu) {
  IPResidual r;
  r.primal = st.s + apply_constraints(con, st.x) - stacked_bounds(con);
  r.complementarity = (st.s.array() * st.u.array() - mu).matrix();
  r.stationarity = sys.gradient(st.x);
  r.stationarity.data() += apply_constraints_transpose(con, st.u, st.x.block_size()).data();
  return r;
}

BlockTriMatrix ip_newton_matrix(const IPState& st, const NormalSystem& sys,
                                const AffineConstraints& con) {
  const int N = sys.C.num_blocks();
  std::vector<Eigen::MatrixXd> extra(N);
  Eigen::Index off = 0;
  for (int k = 0; k < N; ++k) {
    const auto l = con.b[k].size();
    if (l == 0) continue;
    const Eigen::VectorXd ratio =
        (st.u.segment(off, l).array() / st.s.segment(off, l).array()).matrix();
    extra[k] = con.B[k].transpose() * ratio.asDiagonal() * con.B[k];
    off += l;
  }
  return add_to_diagonal(sys.C, extra);
}

IPDirection ip_direction(const IPState& st, const NormalSystem& sys,
                         const AffineConstraints& con) {
  const IPResidual r = ip_residual(st, sys, con, st.mu);
  const int n = st.x.block_size();
  // Eliminate ds = -r_p - B dx and du = (-r_c - u ds) / s.
  const Eigen::VectorXd t =
      ((-r.complementarity.array() + st.u.array() * r.primal.array()) / st.s.array()).matrix();
  BlockVector rhs = r.stationarity;
  rhs.data() += apply_constraints_transpose(con, t, n).data();
  rhs.data() = -rhs.data();

  IPDirection dir;
  dir.dx = solve(ip_newton_matrix(st, sys, con), rhs).e;
  dir.ds = -r.primal - apply_constraints(con, dir.dx);
  dir.du = ((-r.complementarity.array() - st.u.array() * dir.ds.array()) / st.s.array()).matrix();
  return dir;
}

IPState ip_step(const IPState& st, const NormalSystem& sys, const AffineConstraints& con,
                const IPOptions& opts) {
  const IPDirection dir = ip_direction(st, sys, con);
  const double tau = opts.fraction_to_boundary;
  const double alpha = std::min(max_step(st.s, dir.ds, tau), max_step(st.u, dir.du, tau));
  IPState next = st;
  next.x.data() += alpha * dir.dx.data();
  next.u += alpha * dir.du;
  next.s += alpha * dir.ds;
  next.iteration = st.iteration + 1;
  if (next.iteration % 3 != 0) next.mu = st.mu / 10.0;
  return next;
}

ConstrainedSolution solve_qp_constrained(const NormalSystem& sys,
                                         const AffineConstraints& con,
                                         const IPOptions& opts) {
  opts.validate();
  const int n = sys.c.block_size();
  const int N = sys.c.num_blocks();
  if (static_cast<int>(con.b.size()) != N || con.B.size() != con.b.size()) {
    throw ShapeMismatch(kModule, "constraints must have one block per step");
  }
  for (int k = 0; k < N; ++k) {
    if (con.b[k].size() > 0 && (con.B[k].rows() != con.b[k].size() || con.B[k].cols() != n)) {
      throw ShapeMismatch(kModule, "constraint block has wrong shape at step " + std::to_string(k));
    }
  }

  IPState st;
  st.x = solve(sys.C, sys.c).e;
  const int L = con.total();
  const Eigen::VectorXd b = stacked_bounds(con);
  st.s = (b - apply_constraints(con, st.x)).cwiseMax(1.0);
  st.u = Eigen::VectorXd::Ones(L);
  st.mu = opts.mu0 > 0.0 ? opts.mu0 : (L > 0 ? st.u.dot(st.s) / L : 0.0);

  ConstrainedSolution out;
  SmootherSolution& sol = out.solution;
  const double stat_scale = 1.0 + sys.c.data().lpNorm<Eigen::Infinity>();
  const double primal_scale = 1.0 + (L > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0);

  bool converged = false;
  double resid = 0.0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const IPResidual r = ip_residual(st, sys, con, 0.0);
    const double stat = r.stationarity.data().lpNorm<Eigen::Infinity>();
    const double primal = L > 0 ? r.primal.lpNorm<Eigen::Infinity>() : 0.0;
    const double comp = L > 0 ? r.complementarity.maxCoeff() : 0.0;
    resid = std::max({stat, primal, comp});
    sol.residual_trace.push_back(resid);
    sol.objective_trace.push_back(sys.value(st.x));
    if (stat <= opts.kkt_tol * stat_scale && primal <= opts.kkt_tol * primal_scale &&
        comp <= opts.complementarity_tol) {
      converged = true;
      sol.iterations = it;
      break;
    }
    if (it == opts.max_iter) break;
    if (L > 0 && st.u.lpNorm<Eigen::Infinity>() > 1e12 && primal > opts.kkt_tol * primal_scale) {
      throw Infeasible(kModule, "multipliers diverge with nonzero primal residual");
    }
    st = ip_step(st, sys, con, opts);
  }
  if (!converged) {
    throw MaxIterReached(kModule,
                         "interior point did not converge, KKT residual " + std::to_string(resid),
                         resid);
  }
  sol.x = st.x;
  sol.objective = sys.value(st.x);
  sol.residual_norm = resid;
  sol.status = SolveStatus::kConverged;
  out.u = st.u;
  out.s = st.s;
  return out;
}

SmootherSolution smooth_constrained_nonlinear(const NonlinearStateSpace& model,
                                              const NonlinearConstraints& con,
                                              std::optional<BlockVector> x_init,
                                              const ConstrainedGNOptions& opts) {
  model.validate();
  opts.gn.validate();
  BlockVector x = x_init ? std::move(*x_init) : default_initial_trajectory(model);
  if (x.block_size() != model.n || x.num_blocks() != model.N) {
    throw ShapeMismatch(kModule, "initial trajectory shape does not match model");
  }
  auto violation_sum = [&con](const BlockVector& y) {
    double v = 0.0;
    for (int k = 0; k < y.num_blocks(); ++k) {
      if (con.b[k].size() == 0) continue;
      v += positive_part_sum(con.xi(k, y.block(k)) - con.b[k]);
    }
    return v;
  };

  double penalty = 1.0;
  const double f0 = nlls_objective(model, x);
  const double tol = opts.gn.tol > 0.0 ? opts.gn.tol : 1e-8 * (1.0 + std::abs(f0));
  SmootherSolution sol;
  sol.status = SolveStatus::kMaxIterReached;
  for (int it = 0; it < opts.gn.max_iter; ++it) {
    const LinearStateSpace sub = linearize(model, x);
    const NormalSystem sys = assemble(sub);
    const AffineConstraints lc = linearize(con, x);
    ConstrainedSolution qp;
    try {
      qp = solve_qp_constrained(sys, lc, opts.ip);
    } catch (const Infeasible& e) {
      throw SubproblemInfeasible(kModule, e.what());
    }
    const BlockVector& d = qp.solution.x;
    if (qp.u.size() > 0) penalty = std::max(penalty, 2.0 * qp.u.lpNorm<Eigen::Infinity>());

    const double fx = nlls_objective(model, x);
    const double viol = violation_sum(x);
    const double lin_viol =
        lc.total() > 0 ? positive_part_sum(apply_constraints(lc, d) - stacked_bounds(lc)) : 0.0;
    const double delta = (qp.solution.objective - fx) + penalty * (lin_viol - viol);
    const double merit_x = fx + penalty * viol;

    sol.objective_trace.push_back(fx);
    sol.residual_trace.push_back(std::abs(delta));
    sol.inner_iterations.push_back(qp.solution.iterations);
    const double max_viol = max_violation(con, x);
    if ((std::abs(delta) <= tol || delta >= 0.0) && max_viol <= opts.feasibility_tol) {
      sol.status = SolveStatus::kConverged;
      sol.residual_norm = std::abs(delta);
      break;
    }
    if (!(delta < 0.0)) {
      throw LineSearchFailed(kModule, "constrained direction is not a merit descent direction");
    }
    const double pen = penalty;
    const ArmijoResult ls = armijo_search(
        [&](const BlockVector& y) { return nlls_objective(model, y) + pen * violation_sum(y); },
        x, d, delta, merit_x, opts.gn);
    x.data() += ls.step * d.data();
    sol.residual_norm = std::abs(delta);
  }
  sol.x = std::move(x);
  sol.objective = nlls_objective(model, sol.x);
  sol.iterations = static_cast<int>(sol.objective_trace.size());
  return sol;
}

}  // namespace ksmooth
