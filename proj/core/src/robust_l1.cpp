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

#include "ksmooth/robust_l1.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "robust_l1";
constexpr double kSqrt2 = std::numbers::sqrt2;

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -tau * v(i) / dv(i));
  }
  return alpha;
}

// B^T v for stacked v.
BlockVector apply_bt(const L1QP& qp, const Eigen::VectorXd& v) {
  const int n = qp.c.block_size();
  const int N = qp.c.num_blocks();
  BlockVector out(n, N);
  Eigen::Index off = 0;
  for (int k = 0; k < N; ++k) {
    const auto m = qp.b[k].size();
    if (m == 0) continue;
    out.block(k) = qp.B[k].transpose() * v.segment(off, m);
    off += m;
  }
  return out;
}

Eigen::VectorXd apply_b(const L1QP& qp, const BlockVector& d) {
  Eigen::VectorXd out(qp.total_measurements());
  Eigen::Index off = 0;
  for (int k = 0; k < d.num_blocks(); ++k) {
    const auto m = qp.b[k].size();
    if (m == 0) continue;
    out.segment(off, m) = qp.B[k] * d.block(k);
    off += m;
  }
  return out;
}

Eigen::VectorXd stacked_b(const L1QP& qp) {
  Eigen::VectorXd out(qp.total_measurements());
  Eigen::Index off = 0;
  for (const auto& bk : qp.b) {
    out.segment(off, bk.size()) = bk;
    off += bk.size();
  }
  return out;
}

}  // namespace

int L1QP::total_measurements() const {
  int m = 0;
  for (const auto& bk : b) m += static_cast<int>(bk.size());
  return m;
}

Eigen::VectorXd L1QP::residual(const BlockVector& d) const {
  return apply_b(*this, d) + stacked_b(*this);
}

double L1QP::value(const BlockVector& d) const {
  const BlockVector Cd = multiply(C, d);
  return 0.5 * d.data().dot(Cd.data()) + c.data().dot(d.data()) +
         kSqrt2 * residual(d).lpNorm<1>() + offset;
}

L1QP build_l1_qp(const LinearStateSpace& model) {
  model.validate();
  const int n = model.state_dim();
  const int N = model.num_steps();
  const auto Qinv = spd_inverses(model.Q, "Q");
  L1QP qp;
  qp.C = process_normal_matrix(model.G, Qinv);
  BlockVector Qw(n, N);
  for (int k = 0; k < N; ++k) {
    Qw.block(k) = Qinv[k] * model.w.block(k);
    qp.offset += 0.5 * model.w.block(k).dot(Qw.block(k));
  }
  qp.c = apply_process_transpose(model.G, Qw);
  qp.c.data() = -qp.c.data();
  qp.B.resize(N);
  qp.b.resize(N);
  for (int k = 0; k < N; ++k) {
    if (model.measurement_dim(k) == 0) {
      qp.B[k] = Eigen::MatrixXd(0, n);
      qp.b[k] = Eigen::VectorXd(0);
      continue;
    }
    const Eigen::MatrixXd L = model.R[k].llt().matrixL();
    const auto Linv = L.triangularView<Eigen::Lower>();
    qp.B[k] = Linv.solve(model.H[k]);
    qp.b[k] = -Linv.solve(model.z[k]);
  }
  return qp;
}

double L1Residual::norm_inf() const {
  double r = stationarity.data().size() ? stationarity.data().lpNorm<Eigen::Infinity>() : 0.0;
  for (const auto* v : {&split, &comp_minus, &sum, &comp_plus}) {
    if (v->size()) r = std::max(r, v->lpNorm<Eigen::Infinity>());
  }
  return r;
}

L1Residual l1_residual(const L1IPState& st, const L1QP& qp, double mu) {
  L1Residual r;
  r.split = st.p_plus - st.p_minus - qp.residual(st.d);
  r.comp_minus = (st.p_minus.array() * st.s_minus.array() - mu).matrix();
  r.sum = (st.s_plus.array() + st.s_minus.array() - 2.0 * kSqrt2).matrix();
  r.comp_plus = (st.p_plus.array() * st.s_plus.array() - mu).matrix();
  r.stationarity = multiply(qp.C, st.d);
  r.stationarity.data() += qp.c.data();
  r.stationarity.data() += apply_bt(qp, 0.5 * (st.s_minus - st.s_plus)).data();
  return r;
}

BlockTriMatrix l1_newton_matrix(const L1IPState& st, const L1QP& qp) {
  const int N = qp.C.num_blocks();
  const Eigen::VectorXd t =
      (st.p_plus.array() / st.s_plus.array() + st.p_minus.array() / st.s_minus.array()).matrix();
  std::vector<Eigen::MatrixXd> extra(N);
  Eigen::Index off = 0;
  for (int k = 0; k < N; ++k) {
    const auto m = qp.b[k].size();
    if (m == 0) continue;
    const Eigen::VectorXd tinv = t.segment(off, m).cwiseInverse();
    extra[k] = qp.B[k].transpose() * tinv.asDiagonal() * qp.B[k];
    off += m;
  }
  return add_to_diagonal(qp.C, extra);
}

L1Direction l1_direction(const L1IPState& st, const L1QP& qp) {
  const L1Residual r = l1_residual(st, qp, st.mu);
  const Eigen::ArrayXd pp = st.p_plus.array(), pm = st.p_minus.array();
  const Eigen::ArrayXd sp = st.s_plus.array(), sm = st.s_minus.array();
  const Eigen::ArrayXd t = pp / sp + pm / sm;

  // With dp- = (-r2 - p- ds-) / s-, ds+ = -r3 - ds-,
  // dp+ = (-r4 + p+ r3 + p+ ds-) / s+, the split equation gives
  // T ds- = B dd - fbar.
  const Eigen::VectorXd fbar =
      (r.split.array() + (-r.comp_plus.array() + pp * r.sum.array()) / sp +
       r.comp_minus.array() / sm)
          .matrix();
  BlockVector rhs = r.stationarity;
  rhs.data() += apply_bt(qp, 0.5 * r.sum).data();
  rhs.data() -= apply_bt(qp, (fbar.array() / t).matrix()).data();
  rhs.data() = -rhs.data();

  L1Direction dir;
  dir.dd = solve(l1_newton_matrix(st, qp), rhs).e;
  dir.ds_minus = ((apply_b(qp, dir.dd) - fbar).array() / t).matrix();
  dir.ds_plus = -r.sum - dir.ds_minus;
  dir.dp_minus = ((-r.comp_minus.array() - pm * dir.ds_minus.array()) / sm).matrix();
  dir.dp_plus = ((-r.comp_plus.array() - pp * dir.ds_plus.array()) / sp).matrix();
  return dir;
}

L1IPState l1_initial_state(const L1QP& qp) {
  const int M = qp.total_measurements();
  L1IPState st;
  st.d = BlockVector(qp.c.block_size(), qp.c.num_blocks());
  const Eigen::VectorXd y = qp.residual(st.d);
  st.p_plus = (y.cwiseMax(0.0).array() + 1.0).matrix();
  st.p_minus = ((-y).cwiseMax(0.0).array() + 1.0).matrix();
  st.s_plus = Eigen::VectorXd::Constant(M, kSqrt2);
  st.s_minus = Eigen::VectorXd::Constant(M, kSqrt2);
  st.mu = M > 0 ? (st.p_plus.dot(st.s_plus) + st.p_minus.dot(st.s_minus)) / (2.0 * M) : 0.0;
  return st;
}

L1QPSolution solve_l1_qp(const L1QP& qp, const IPOptions& opts) {
  opts.validate();
  const int M = qp.total_measurements();
  L1IPState st = l1_initial_state(qp);
  L1QPSolution out;
  if (M == 0) {
    // Pure quadratic: C d = -c.
    BlockVector rhs = qp.c;
    rhs.data() = -rhs.data();
    st.d = solve(qp.C, rhs).e;
    out.d = st.d;
    out.state = st;
    return out;
  }
  const double scale = 1.0 + qp.c.data().lpNorm<Eigen::Infinity>() +
                       stacked_b(qp).lpNorm<Eigen::Infinity>();
  const double tau = opts.fraction_to_boundary;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const L1Residual r = l1_residual(st, qp, 0.0);
    const double lin = std::max({r.stationarity.data().lpNorm<Eigen::Infinity>(),
                                 r.split.lpNorm<Eigen::Infinity>(),
                                 r.sum.lpNorm<Eigen::Infinity>()});
    const double comp = std::max(r.comp_plus.maxCoeff(), r.comp_minus.maxCoeff());
    out.kkt_residual = std::max(lin, comp);
    if (lin <= opts.kkt_tol * scale && comp <= opts.complementarity_tol) {
      out.iterations = it;
      out.d = st.d;
      out.state = st;
      return out;
    }
    if (it == opts.max_iter) break;
    const L1Direction dir = l1_direction(st, qp);
    const double alpha = std::min({max_step(st.p_plus, dir.dp_plus, tau),
                                   max_step(st.p_minus, dir.dp_minus, tau),
                                   max_step(st.s_plus, dir.ds_plus, tau),
                                   max_step(st.s_minus, dir.ds_minus, tau)});
    st.p_plus += alpha * dir.dp_plus;
    st.p_minus += alpha * dir.dp_minus;
    st.s_plus += alpha * dir.ds_plus;
    st.s_minus += alpha * dir.ds_minus;
    st.d.data() += alpha * dir.dd.data();
    st.iteration += 1;
    if (st.iteration % 3 != 0) st.mu /= 10.0;
  }
  throw MaxIterReached(kModule,
                       "l1 interior point did not converge, KKT residual " +
                           std::to_string(out.kkt_residual),
                       out.kkt_residual);
}

double l1_objective(const NonlinearStateSpace& model, const BlockVector& x) {
  const StackedEval ev = eval_stacked(model, x);
  double f = 0.0;
  for (int k = 0; k < model.N; ++k) {
    const Eigen::VectorXd rw =
        ev.g.block(k) - (k == 0 ? model.initial_mean : Eigen::VectorXd::Zero(model.n));
    f += 0.5 * rw.dot(model.Q[k].llt().solve(rw));
    if (model.z[k].size() > 0) {
      const Eigen::MatrixXd L = model.R[k].llt().matrixL();
      f += kSqrt2 * L.triangularView<Eigen::Lower>().solve(ev.h[k] - model.z[k]).lpNorm<1>();
    }
  }
  return f;
}

GNDirection l1_direction_gn(const NonlinearStateSpace& model, const BlockVector& x,
                            const IPOptions& ip) {
  const L1QP qp = build_l1_qp(linearize(model, x));
  const L1QPSolution sol = solve_l1_qp(qp, ip);
  GNDirection out;
  out.d = sol.d;
  out.model_decrease = qp.value(sol.d) - qp.value(BlockVector(model.n, model.N));
  out.inner_iterations = sol.iterations;
  return out;
}

std::pair<SmootherSolution, GNTrace> smooth_l1_laplace(const NonlinearStateSpace& model,
                                                       std::optional<BlockVector> x_init,
                                                       const RobustOptions& opts) {
  model.validate();
  BlockVector x = x_init ? std::move(*x_init) : default_initial_trajectory(model);
  if (x.block_size() != model.n || x.num_blocks() != model.N) {
    throw ShapeMismatch(kModule, "initial trajectory shape does not match model");
  }
  return gauss_newton([&model](const BlockVector& y) { return l1_objective(model, y); },
                      [&model, &opts](const BlockVector& y) {
                        return l1_direction_gn(model, y, opts.ip);
                      },
                      std::move(x), opts.gn);
}

SmootherSolution smooth_l1_laplace(const LinearStateSpace& model, const IPOptions& opts) {
  const L1QP qp = build_l1_qp(model);
  const L1QPSolution s = solve_l1_qp(qp, opts);
  SmootherSolution out;
  out.x = s.d;
  out.objective = qp.value(s.d);
  out.residual_norm = s.kkt_residual;
  out.iterations = s.iterations;
  out.objective_trace = {out.objective};
  return out;
}

}  // namespace ksmooth
