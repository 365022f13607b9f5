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

#include "ksmooth/plq.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "plq";

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -tau * v(i) / dv(i));
  }
  return alpha;
}

double scalar_closed_form(const PLQPenalty& rho, double y) {
  const double t = rho.scale * y;
  switch (rho.kind) {
    case PLQPenalty::Kind::kL2:
      return 0.5 * t * t;
    case PLQPenalty::Kind::kL1:
      return std::abs(t);
    case PLQPenalty::Kind::kHuber: {
      const double K = rho.param;
      return std::abs(t) <= K ? 0.5 * t * t : K * std::abs(t) - 0.5 * K * K;
    }
    case PLQPenalty::Kind::kVapnik:
      return std::max(t - rho.param, 0.0) + std::max(-t - rho.param, 0.0);
    case PLQPenalty::Kind::kGeneral:
      break;
  }
  throw NotInCatalog(kModule, "closed form requested for a general penalty");
}

PLQPenalty make_entry(PLQPenalty::Kind kind, double param, double scale, Eigen::MatrixXd A,
                      Eigen::VectorXd a, Eigen::MatrixXd M, Eigen::VectorXd b,
                      Eigen::MatrixXd B) {
  PLQPenalty p;
  p.kind = kind;
  p.param = param;
  p.scale = scale;
  p.A = std::move(A);
  p.a = std::move(a);
  p.M = std::move(M);
  p.b = std::move(b);
  p.B = std::move(B);
  p.validate();
  return p;
}

struct DualResult {
  Eigen::VectorXd u;
  double value = 0.0;
};

// max g^T u - 1/2 u^T M u  s.t.  A^T u <= a, by a primal-dual interior point
// on the equivalent minimization.
DualResult solve_dual(const PLQPenalty& rho, const Eigen::VectorXd& g) {
  const int m = rho.dual_dim();
  const int l = rho.num_constraints();
  DualResult out;
  if (l == 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rho.M);
    out.u = cod.solve(g);
    const Eigen::VectorXd ray = g - rho.M * out.u;
    if (ray.norm() > 1e-10 * (1.0 + g.norm())) {
      throw Unbounded(kModule, "supremum is infinite along a null direction of M");
    }
    out.value = g.dot(out.u) - 0.5 * out.u.dot(rho.M * out.u);
    return out;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd s = rho.a.cwiseMax(1.0);
  Eigen::VectorXd q = Eigen::VectorXd::Ones(l);
  double mu = q.dot(s) / l;
  const double scale = 1.0 + g.lpNorm<Eigen::Infinity>() + rho.a.lpNorm<Eigen::Infinity>();
  const double reg = 1e-14 * (1.0 + rho.M.lpNorm<Eigen::Infinity>());
  constexpr int kMaxIter = 200;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd r1 = rho.A.transpose() * u + s - rho.a;
    const Eigen::VectorXd r3 = rho.M * u - g + rho.A * q;
    const double comp = (q.array() * s.array()).maxCoeff();
    if (std::max(r1.lpNorm<Eigen::Infinity>(), r3.lpNorm<Eigen::Infinity>()) <= 1e-13 * scale &&
        comp <= 1e-15 * scale) {
      break;
    }
    if (u.norm() > 1e8 * scale) {
      const Eigen::VectorXd v = u.normalized();
      if ((rho.A.transpose() * v).maxCoeff() <= 1e-6 && (rho.M * v).norm() <= 1e-6 &&
          g.dot(v) > 0.0) {
        throw Unbounded(kModule, "supremum is infinite along an improving ray of U");
      }
    }
    const Eigen::VectorXd r2 = (q.array() * s.array() - mu).matrix();
    const Eigen::VectorXd qs = (q.array() / s.array()).matrix();
    Eigen::MatrixXd T = rho.M + rho.A * qs.asDiagonal() * rho.A.transpose();
    T.diagonal().array() += reg;
    const Eigen::VectorXd rhs =
        -r3 - rho.A * ((-r2.array() + q.array() * r1.array()) / s.array()).matrix();
    const Eigen::VectorXd du = T.ldlt().solve(rhs);
    const Eigen::VectorXd ds = -r1 - rho.A.transpose() * du;
    const Eigen::VectorXd dq = ((-r2.array() - q.array() * ds.array()) / s.array()).matrix();
    const double alpha = std::min(max_step(s, ds, 0.995), max_step(q, dq, 0.995));
    u += alpha * du;
    s += alpha * ds;
    q += alpha * dq;
    if ((it + 1) % 3 != 0) mu /= 10.0;
  }
  out.u = u;
  out.value = g.dot(u) - 0.5 * u.dot(rho.M * u);
  return out;
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& X, int d) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows() * d, X.cols() * d);
  for (int i = 0; i < d; ++i) out.block(i * X.rows(), i * X.cols(), X.rows(), X.cols()) = X;
  return out;
}

Eigen::VectorXd tile(const Eigen::VectorXd& v, int d) { return v.replicate(d, 1); }

Eigen::VectorXd stack_offsets(const std::vector<Eigen::VectorXd>& v) {
  Eigen::Index len = 0;
  for (const auto& x : v) len += x.size();
  Eigen::VectorXd out(len);
  Eigen::Index off = 0;
  for (const auto& x : v) {
    out.segment(off, x.size()) = x;
    off += x.size();
  }
  return out;
}

}  // namespace

std::string to_string(PLQPenalty::Kind kind) {
  switch (kind) {
    case PLQPenalty::Kind::kL2: return "l2";
    case PLQPenalty::Kind::kL1: return "l1";
    case PLQPenalty::Kind::kHuber: return "huber";
    case PLQPenalty::Kind::kVapnik: return "vapnik";
    case PLQPenalty::Kind::kGeneral: break;
  }
  return "general";
}

void PLQPenalty::validate() const {
  const auto m = M.rows();
  if (M.cols() != m || b.size() != m || B.rows() != m) {
    throw ShapeMismatch(kModule, "M, b and B must agree on the dual dimension");
  }
  if (A.rows() != m || A.cols() != a.size()) {
    throw ShapeMismatch(kModule, "A must be m x l with l = size(a)");
  }
  if (m > 0) {
    if (!M.isApprox(M.transpose(), 1e-12) && (M - M.transpose()).norm() > 1e-12) {
      throw InvalidParameter(kModule, "M must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
      throw InvalidParameter(kModule, "M must be positive semidefinite");
    }
  }
  if (B.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    if (qr.rank() != B.cols()) throw InvalidParameter(kModule, "B must be injective");
  }
  if (kind == Kind::kHuber && !(param > 0.0)) {
    throw InvalidParameter(kModule, "Huber threshold K must be positive");
  }
  if (kind == Kind::kVapnik && !(param >= 0.0)) {
    throw InvalidParameter(kModule, "Vapnik epsilon must be nonnegative");
  }
  if (in_catalog() && !(scale > 0.0)) {
    throw InvalidParameter(kModule, "penalty scale must be positive");
  }
}

PLQPenalty plq_l2(double scale) {
  return make_entry(PLQPenalty::Kind::kL2, 0.0, scale, Eigen::MatrixXd(1, 0),
                    Eigen::VectorXd(0), Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1),
                    Eigen::MatrixXd::Constant(1, 1, scale));
}

PLQPenalty plq_l1(double scale) {
  Eigen::MatrixXd A(1, 2);
  A << 1.0, -1.0;
  return make_entry(PLQPenalty::Kind::kL1, 0.0, scale, A, Eigen::VectorXd::Ones(2),
                    Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1),
                    Eigen::MatrixXd::Constant(1, 1, scale));
}

PLQPenalty plq_huber(double K, double scale) {
  if (!(K > 0.0)) throw InvalidParameter(kModule, "Huber threshold K must be positive");
  Eigen::MatrixXd A(1, 2);
  A << 1.0, -1.0;
  return make_entry(PLQPenalty::Kind::kHuber, K, scale, A, Eigen::VectorXd::Constant(2, K),
                    Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1),
                    Eigen::MatrixXd::Constant(1, 1, scale));
}

PLQPenalty plq_vapnik(double eps, double scale) {
  if (!(eps >= 0.0)) throw InvalidParameter(kModule, "Vapnik epsilon must be nonnegative");
  Eigen::MatrixXd A(2, 4);
  A << 1.0, 0.0, -1.0, 0.0,
       0.0, 1.0, 0.0, -1.0;
  Eigen::VectorXd a(4);
  a << 1.0, 1.0, 0.0, 0.0;
  Eigen::MatrixXd B(2, 1);
  B << scale, -scale;
  return make_entry(PLQPenalty::Kind::kVapnik, eps, scale, A, a, Eigen::MatrixXd::Zero(2, 2),
                    Eigen::VectorXd::Constant(2, -eps), B);
}

PLQPenalty plq_general(Eigen::MatrixXd A, Eigen::VectorXd a, Eigen::MatrixXd M,
                       Eigen::VectorXd b, Eigen::MatrixXd B) {
  return make_entry(PLQPenalty::Kind::kGeneral, 0.0, 1.0, std::move(A), std::move(a),
                    std::move(M), std::move(b), std::move(B));
}

PLQPenalty componentwise(const PLQPenalty& scalar, int d) {
  if (d < 0) throw InvalidParameter(kModule, "component count must be nonnegative");
  if (scalar.input_dim() != 1) {
    throw ShapeMismatch(kModule, "componentwise stacking needs a scalar penalty");
  }
  PLQPenalty p = scalar;
  p.A = kron_identity(scalar.A, d);
  p.a = tile(scalar.a, d);
  p.M = kron_identity(scalar.M, d);
  p.b = tile(scalar.b, d);
  p.B = kron_identity(scalar.B, d);
  return p;
}

PLQPenalty parse_penalty(const std::string& spec) {
  static const std::regex kParam(R"(^\s*(huber|vapnik)\s*\(\s*([^)\s]+)\s*\)\s*$)");
  static const std::regex kPlain(R"(^\s*(l1|l2)\s*$)");
  std::smatch m;
  if (std::regex_match(spec, m, kPlain)) return m[1] == "l1" ? plq_l1() : plq_l2();
  if (std::regex_match(spec, m, kParam)) {
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(m[2].str(), &used);
      if (used != m[2].str().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidParameter(kModule, "bad penalty parameter in '" + spec + "'");
    }
    return m[1] == "huber" ? plq_huber(v) : plq_vapnik(v);
  }
  throw InvalidParameter(kModule,
                         "unknown penalty '" + spec + "'; expected l2 | l1 | huber(K) | vapnik(eps)");
}

double eval_plq_sup(const PLQPenalty& rho, const Eigen::VectorXd& y) {
  if (y.size() != rho.input_dim()) throw ShapeMismatch(kModule, "penalty input size mismatch");
  return solve_dual(rho, rho.b + rho.B * y).value;
}

Eigen::VectorXd plq_dual_point(const PLQPenalty& rho, const Eigen::VectorXd& y) {
  if (y.size() != rho.input_dim()) throw ShapeMismatch(kModule, "penalty input size mismatch");
  return solve_dual(rho, rho.b + rho.B * y).u;
}

double eval_plq(const PLQPenalty& rho, const Eigen::VectorXd& y) {
  if (y.size() != rho.input_dim()) throw ShapeMismatch(kModule, "penalty input size mismatch");
  if (!rho.in_catalog()) return eval_plq_sup(rho, y);
  double v = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) v += scalar_closed_form(rho, y(i));
  return v;
}

double eval_plq(const PLQPenalty& rho, double y) {
  return eval_plq(rho, Eigen::VectorXd::Constant(1, y));
}

bool check_coercivity_catalog(const PLQPenalty& rho) {
  switch (rho.kind) {
    case PLQPenalty::Kind::kL2:
      // M has full rank.
      return Eigen::FullPivLU<Eigen::MatrixXd>(rho.M).rank() == rho.M.rows();
    case PLQPenalty::Kind::kL1:
    case PLQPenalty::Kind::kHuber:
    case PLQPenalty::Kind::kVapnik:
      // U is a bounded box.
      return true;
    case PLQPenalty::Kind::kGeneral:
      break;
  }
  throw NotInCatalog(kModule, "coercivity check is only available for catalog penalties");
}

Eigen::VectorXd PLQProblem::term_input(int j, const BlockVector& x) const {
  const PLQTerm& t = terms[j];
  Eigen::VectorXd y = t.Kc * x.block(t.k) + t.offset;
  if (t.has_prev()) y += t.Kp * x.block(t.k - 1);
  return y;
}

double PLQProblem::value(const BlockVector& x) const {
  double v = 0.0;
  for (int j = 0; j < static_cast<int>(terms.size()); ++j) {
    v += eval_plq(terms[j].penalty, term_input(j, x));
  }
  return v;
}

PLQProblem build_plq_problem(const LinearStateSpace& model,
                             const std::vector<PLQPenalty>& w_penalty,
                             const std::vector<PLQPenalty>& v_penalty) {
  model.validate();
  const int n = model.state_dim();
  const int N = model.num_steps();
  if (static_cast<int>(w_penalty.size()) != N || static_cast<int>(v_penalty.size()) != N) {
    throw ShapeMismatch(kModule, "need one process and one measurement penalty per step");
  }
  PLQProblem prob;
  prob.n = n;
  prob.N = N;
  for (int k = 0; k < N; ++k) {
    w_penalty[k].validate();
    if (w_penalty[k].input_dim() != n) {
      throw ShapeMismatch(kModule, "process penalty input must have the state dimension");
    }
    const Eigen::MatrixXd L = model.Q[k].llt().matrixL();
    const Eigen::MatrixXd Linv =
        L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    PLQTerm t;
    t.k = k;
    t.Kc = Linv;
    if (k > 0) t.Kp = -Linv * model.G[k];
    t.offset = -Linv * model.w.block(k);
    t.penalty = w_penalty[k];
    prob.terms.push_back(std::move(t));
  }
  for (int k = 0; k < N; ++k) {
    const int m = model.measurement_dim(k);
    if (m == 0) continue;
    v_penalty[k].validate();
    if (v_penalty[k].input_dim() != m) {
      throw ShapeMismatch(kModule, "measurement penalty input must match m_k");
    }
    const Eigen::MatrixXd L = model.R[k].llt().matrixL();
    const auto Lt = L.triangularView<Eigen::Lower>();
    PLQTerm t;
    t.k = k;
    t.Kc = Lt.solve(model.H[k]);
    t.offset = -Lt.solve(model.z[k]);
    t.penalty = v_penalty[k];
    prob.terms.push_back(std::move(t));
  }
  return prob;
}

double PLQResidual::linear_norm_inf() const {
  double r = r4.size() ? r4.data().lpNorm<Eigen::Infinity>() : 0.0;
  for (const auto* group : {&r1, &r3}) {
    for (const auto& v : *group) {
      if (v.size()) r = std::max(r, v.lpNorm<Eigen::Infinity>());
    }
  }
  return r;
}

double PLQResidual::complementarity_max() const {
  double r = 0.0;
  for (const auto& v : r2) {
    if (v.size()) r = std::max(r, v.maxCoeff());
  }
  return r;
}

PLQResidual plq_residual(const PLQIPState& st, const PLQProblem& prob, double mu) {
  const auto J = prob.terms.size();
  PLQResidual r;
  r.r1.resize(J);
  r.r2.resize(J);
  r.r3.resize(J);
  r.r4 = BlockVector(prob.n, prob.N);
  for (std::size_t j = 0; j < J; ++j) {
    const PLQTerm& t = prob.terms[j];
    const PLQPenalty& p = t.penalty;
    r.r1[j] = p.A.transpose() * st.u[j] + st.s[j] - p.a;
    r.r2[j] = (st.q[j].array() * st.s[j].array() - mu).matrix();
    r.r3[j] = p.b + p.B * prob.term_input(static_cast<int>(j), st.x) - p.M * st.u[j] -
              p.A * st.q[j];
    const Eigen::VectorXd Btu = p.B.transpose() * st.u[j];
    r.r4.block(t.k) += t.Kc.transpose() * Btu;
    if (t.has_prev()) r.r4.block(t.k - 1) += t.Kp.transpose() * Btu;
  }
  return r;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> term_factor(const PLQIPState& st, const PLQTerm& t, std::size_t j) {
  const PLQPenalty& p = t.penalty;
  Eigen::MatrixXd T = p.M;
  if (p.num_constraints() > 0) {
    const Eigen::VectorXd qs = (st.q[j].array() / st.s[j].array()).matrix();
    T += p.A * qs.asDiagonal() * p.A.transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(T);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(kModule, "penalty block M + A S^-1 Q A^T is singular", t.k);
  }
  return llt;
}

}  // namespace

BlockTriMatrix plq_newton_matrix(const PLQIPState& st, const PLQProblem& prob) {
  const int n = prob.n;
  std::vector<Eigen::MatrixXd> diag(prob.N, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> sub(prob.N > 0 ? prob.N - 1 : 0, Eigen::MatrixXd::Zero(n, n));
  for (std::size_t j = 0; j < prob.terms.size(); ++j) {
    const PLQTerm& t = prob.terms[j];
    const auto llt = term_factor(st, t, j);
    const Eigen::MatrixXd Ec = t.penalty.B * t.Kc;
    const Eigen::MatrixXd TEc = llt.solve(Ec);
    diag[t.k] += Ec.transpose() * TEc;
    if (t.has_prev()) {
      const Eigen::MatrixXd Ep = t.penalty.B * t.Kp;
      diag[t.k - 1] += Ep.transpose() * llt.solve(Ep);
      sub[t.k - 1] += TEc.transpose() * Ep;
    }
  }
  return BlockTriMatrix(std::move(diag), std::move(sub));
}

PLQDirection plq_direction(const PLQIPState& st, const PLQProblem& prob) {
  const PLQResidual r = plq_residual(st, prob, st.mu);
  const auto J = prob.terms.size();
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
  std::vector<Eigen::VectorXd> Tg(J);
  factors.reserve(J);
  BlockVector rhs = r.r4;
  rhs.data() = -rhs.data();
  for (std::size_t j = 0; j < J; ++j) {
    const PLQTerm& t = prob.terms[j];
    const PLQPenalty& p = t.penalty;
    factors.push_back(term_factor(st, t, j));
    Eigen::VectorXd g = r.r3[j];
    if (p.num_constraints() > 0) {
      g += p.A * ((r.r2[j].array() - st.q[j].array() * r.r1[j].array()) / st.s[j].array())
                     .matrix();
    }
    Tg[j] = factors[j].solve(g);
    const Eigen::VectorXd BtTg = p.B.transpose() * Tg[j];
    rhs.block(t.k) -= t.Kc.transpose() * BtTg;
    if (t.has_prev()) rhs.block(t.k - 1) -= t.Kp.transpose() * BtTg;
  }

  PLQDirection dir;
  dir.dx = solve(plq_newton_matrix(st, prob), rhs).e;
  dir.du.resize(J);
  dir.dq.resize(J);
  dir.ds.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const PLQTerm& t = prob.terms[j];
    const PLQPenalty& p = t.penalty;
    Eigen::VectorXd Kdx = t.Kc * dir.dx.block(t.k);
    if (t.has_prev()) Kdx += t.Kp * dir.dx.block(t.k - 1);
    dir.du[j] = factors[j].solve(p.B * Kdx) + Tg[j];
    dir.ds[j] = -r.r1[j] - p.A.transpose() * dir.du[j];
    dir.dq[j] = ((-r.r2[j].array() - st.q[j].array() * dir.ds[j].array()) / st.s[j].array())
                    .matrix();
  }
  return dir;
}

PLQIPState plq_initial_state(const PLQProblem& prob, const BlockVector& x0) {
  if (x0.block_size() != prob.n || x0.num_blocks() != prob.N) {
    throw ShapeMismatch(kModule, "initial trajectory shape does not match problem");
  }
  PLQIPState st;
  st.x = x0;
  double total = 0.0;
  int count = 0;
  for (const PLQTerm& t : prob.terms) {
    const PLQPenalty& p = t.penalty;
    st.u.push_back(Eigen::VectorXd::Zero(p.dual_dim()));
    st.s.push_back(p.a.cwiseMax(1.0));
    st.q.push_back(Eigen::VectorXd::Ones(p.num_constraints()));
    total += st.s.back().sum();
    count += p.num_constraints();
  }
  st.mu = count > 0 ? total / count : 0.0;
  return st;
}

SmootherSolution solve_plq(const PLQProblem& prob, const BlockVector& x0, const IPOptions& opts) {
  opts.validate();
  PLQIPState st = plq_initial_state(prob, x0);
  const auto J = prob.terms.size();
  std::vector<Eigen::VectorXd> shifts(J);
  for (std::size_t j = 0; j < J; ++j) {
    shifts[j] = prob.terms[j].penalty.b + prob.terms[j].penalty.B * prob.terms[j].offset;
  }
  const double scale = 1.0 + (J ? stack_offsets(shifts).lpNorm<Eigen::Infinity>() : 0.0);
  const double tau = opts.fraction_to_boundary;

  SmootherSolution out;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const PLQResidual r = plq_residual(st, prob, 0.0);
    const double lin = r.linear_norm_inf();
    const double comp = r.complementarity_max();
    out.residual_norm = std::max(lin, comp);
    out.residual_trace.push_back(out.residual_norm);
    if (lin <= opts.kkt_tol * scale && comp <= opts.complementarity_tol) {
      out.x = st.x;
      out.iterations = it;
      out.objective = prob.value(st.x);
      out.objective_trace = {out.objective};
      return out;
    }
    if (it == opts.max_iter) break;
    const PLQDirection dir = plq_direction(st, prob);
    double alpha = 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      alpha = std::min({alpha, max_step(st.s[j], dir.ds[j], tau), max_step(st.q[j], dir.dq[j], tau)});
    }
    st.x.data() += alpha * dir.dx.data();
    for (std::size_t j = 0; j < J; ++j) {
      st.u[j] += alpha * dir.du[j];
      st.s[j] += alpha * dir.ds[j];
      st.q[j] += alpha * dir.dq[j];
    }
    st.iteration += 1;
    if (st.iteration % 3 != 0) st.mu /= 10.0;
  }
  throw MaxIterReached(kModule,
                       "PLQ interior point did not converge, KKT residual " +
                           std::to_string(out.residual_norm),
                       out.residual_norm);
}

SmootherSolution smooth_plq(const LinearStateSpace& model,
                            const std::vector<PLQPenalty>& w_penalty,
                            const std::vector<PLQPenalty>& v_penalty, const IPOptions& opts) {
  const PLQProblem prob = build_plq_problem(model, w_penalty, v_penalty);
  return solve_plq(prob, smooth(model).x, opts);
}

SmootherSolution smooth_plq(const LinearStateSpace& model, const PLQPenalty& w_scalar,
                            const PLQPenalty& v_scalar, const IPOptions& opts) {
  const int N = model.num_steps();
  std::vector<PLQPenalty> w(N, componentwise(w_scalar, model.state_dim()));
  std::vector<PLQPenalty> v;
  v.reserve(N);
  for (int k = 0; k < N; ++k) v.push_back(componentwise(v_scalar, model.measurement_dim(k)));
  return smooth_plq(model, w, v, opts);
}

}  // namespace ksmooth
