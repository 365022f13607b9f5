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

#include "ksmooth/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "sparse";

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -tau * v(i) / dv(i));
  }
  return alpha;
}

BlockVector unconstrained(const NormalSystem& sys) { return solve(sys.C, sys.c).e; }

BlockTriMatrix add_diagonal_entries(const BlockTriMatrix& C, const Eigen::VectorXd& dvec) {
  const int n = C.block_size();
  std::vector<Eigen::MatrixXd> extra(C.num_blocks());
  for (int k = 0; k < C.num_blocks(); ++k) {
    extra[k] = dvec.segment(Eigen::Index(k) * n, n).asDiagonal();
  }
  return add_to_diagonal(C, extra);
}

}  // namespace

void SparsePenaltySpec::validate(Eigen::Index size) const {
  if (w.size() != size) throw ShapeMismatch(kModule, "weight vector must match the state size");
  if (w.size() > 0 && w.minCoeff() < 0.0) {
    throw InvalidParameter(kModule, "weights must be nonnegative");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParameter(kModule, "lambda must be finite and nonnegative");
  }
  if (!std::isfinite(tau) || tau < 0.0) {
    throw InvalidParameter(kModule, "tau must be finite and nonnegative");
  }
}

Eigen::VectorXd component_weights(int n, int N, const std::vector<int>& components,
                                  double weight) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Eigen::Index(n) * N);
  for (int i : components) {
    if (i < 0 || i >= n) throw InvalidParameter(kModule, "state component index out of range");
    for (int k = 0; k < N; ++k) w(Eigen::Index(k) * n + i) = weight;
  }
  return w;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double t) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v(i)) - t * w(i), 0.0);
    out(i) = std::copysign(m, v(i));
  }
  return out;
}

double sparse_objective(const NormalSystem& sys, const SparsePenaltySpec& spec,
                        const BlockVector& x) {
  return sys.value(x) + spec.lambda * spec.w.cwiseProduct(x.data()).lpNorm<1>();
}

double prox_gradient_residual(const NormalSystem& sys, const SparsePenaltySpec& spec,
                              const BlockVector& x) {
  const Eigen::VectorXd step = x.data() - sys.gradient(x).data();
  return (x.data() - soft_threshold(step, spec.w, spec.lambda)).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd sparse_reduced_diagonal(const SparseIPState& st, const Eigen::VectorXd& w) {
  const Eigen::ArrayXd qs = st.q.array() / st.s.array();
  const Eigen::ArrayXd pr = st.p.array() / st.r.array();
  const Eigen::ArrayXd phi = qs + pr;
  const Eigen::ArrayXd psi = qs - pr;
  return (w.array().square() * (phi.square() - psi.square()) / phi).matrix();
}

SparseIPState sparse_initial_state(const NormalSystem& sys, const SparsePenaltySpec& spec) {
  SparseIPState st;
  st.x = unconstrained(sys);
  const Eigen::VectorXd Wx = spec.w.cwiseProduct(st.x.data());
  st.y = (Wx.cwiseAbs().array() + 1.0).matrix();
  st.s = st.y - Wx;
  st.r = st.y + Wx;
  st.q = Eigen::VectorXd::Constant(Wx.size(), 0.5 * spec.lambda);
  st.p = st.q;
  st.mu = Wx.size() ? (st.q.dot(st.s) + st.p.dot(st.r)) / (2.0 * Wx.size()) : 0.0;
  return st;
}

SmootherSolution sparse_smooth_penalized(const NormalSystem& sys, const SparsePenaltySpec& spec,
                                         const IPOptions& opts) {
  opts.validate();
  const Eigen::Index m = sys.c.size();
  spec.validate(m);
  if (!(spec.lambda > 0.0)) throw InvalidParameter(kModule, "lambda must be positive");
  const Eigen::VectorXd& w = spec.w;
  const double lam = spec.lambda;
  const double scale = 1.0 + sys.c.data().lpNorm<Eigen::Infinity>() + lam;
  const double comp_tol = opts.complementarity_tol * std::max(1.0, lam);
  const double tau = opts.fraction_to_boundary;

  SparseIPState st = sparse_initial_state(sys, spec);
  SmootherSolution out;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd Wx = w.cwiseProduct(st.x.data());
    const Eigen::VectorXd f1 = st.s + Wx - st.y;
    const Eigen::VectorXd f2 = st.r - Wx - st.y;
    const Eigen::VectorXd f5 = (lam - st.q.array() - st.p.array()).matrix();
    BlockVector f6 = sys.gradient(st.x);
    f6.data() += w.cwiseProduct(st.q - st.p);
    const double lin = std::max({f1.lpNorm<Eigen::Infinity>(), f2.lpNorm<Eigen::Infinity>(),
                                 f5.lpNorm<Eigen::Infinity>(),
                                 f6.data().lpNorm<Eigen::Infinity>()});
    const double comp = std::max((st.q.array() * st.s.array()).maxCoeff(),
                                 (st.p.array() * st.r.array()).maxCoeff());
    out.residual_trace.push_back(std::max(lin, comp));
    // Small weights turn tiny slacks into large errors in x, so the
    // proximal-gradient residual is required as well.
    if (lin <= opts.kkt_tol * scale && comp <= comp_tol &&
        prox_gradient_residual(sys, spec, st.x) <= opts.kkt_tol * scale) {
      out.x = st.x;
      out.iterations = it;
      out.objective = sparse_objective(sys, spec, st.x);
      out.objective_trace = {out.objective};
      out.residual_norm = prox_gradient_residual(sys, spec, st.x);
      return out;
    }
    if (it == opts.max_iter) break;

    const Eigen::ArrayXd qs = st.q.array() / st.s.array();
    const Eigen::ArrayXd pr = st.p.array() / st.r.array();
    const Eigen::ArrayXd phi = qs + pr;
    const Eigen::ArrayXd psi = qs - pr;
    const Eigen::ArrayXd f3 = st.q.array() * st.s.array() - st.mu;
    const Eigen::ArrayXd f4 = st.p.array() * st.r.array() - st.mu;
    const Eigen::ArrayXd aq = (-f3 + st.q.array() * f1.array()) / st.s.array();
    const Eigen::ArrayXd ap = (-f4 + st.p.array() * f2.array()) / st.r.array();
    const Eigen::ArrayXd dvec = w.array().square() * 4.0 * qs * pr / phi;

    const Eigen::VectorXd check = sparse_reduced_diagonal(st, w);
    // Phi^2 - Psi^2 cancels, so its error scales with w^2 Phi rather than the result.
    const Eigen::ArrayXd slack = 1e-10 * (1.0 + w.array().square() * phi);
    if (((check.array() - dvec).abs() > slack).any()) {
      throw Error("InternalError", kModule, "reduced diagonal disagrees with Phi^2 - Psi^2");
    }

    const Eigen::ArrayXd ysum = (aq + ap - f5.array()) / phi;
    BlockVector rhs = f6;
    rhs.data() += (w.array() * (aq - ap - psi * ysum)).matrix();
    rhs.data() = -rhs.data();
    const BlockVector dx = solve(add_diagonal_entries(sys.C, dvec.matrix()), rhs).e;

    const Eigen::ArrayXd Wdx = w.array() * dx.data().array();
    const Eigen::VectorXd dy = (ysum + psi * Wdx / phi).matrix();
    const Eigen::VectorXd ds = (-f1.array() - Wdx + dy.array()).matrix();
    const Eigen::VectorXd dr = (-f2.array() + Wdx + dy.array()).matrix();
    const Eigen::VectorXd dq = (aq + qs * (Wdx - dy.array())).matrix();
    const Eigen::VectorXd dp = (ap - pr * (Wdx + dy.array())).matrix();

    const double alpha = std::min({max_step(st.s, ds, tau), max_step(st.r, dr, tau),
                                   max_step(st.q, dq, tau), max_step(st.p, dp, tau)});
    st.x.data() += alpha * dx.data();
    st.y += alpha * dy;
    st.s += alpha * ds;
    st.r += alpha * dr;
    st.q += alpha * dq;
    st.p += alpha * dp;
    st.iteration += 1;
    if (st.iteration % 3 != 0) st.mu /= 10.0;
  }
  const double res = out.residual_trace.back();
  throw MaxIterReached(kModule,
                       "sparse interior point did not converge, KKT residual " + std::to_string(res),
                       res);
}

Eigen::VectorXd project_weighted_l1(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                    double tau) {
  if (v.size() != w.size()) throw ShapeMismatch(kModule, "projection weights size mismatch");
  if (!(tau >= 0.0)) throw InvalidParameter(kModule, "tau must be nonnegative");
  if (w.cwiseProduct(v).lpNorm<1>() <= tau) return v;

  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (w(i) > 0.0) idx.push_back(i);
  }
  auto ratio = [&](Eigen::Index i) { return std::abs(v(i)) / w(i); };
  std::sort(idx.begin(), idx.end(),
            [&](Eigen::Index i, Eigen::Index j) { return ratio(i) > ratio(j); });

  double theta = 0.0;
  double csum = 0.0;
  double wsum = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Eigen::Index i = idx[j];
    csum += w(i) * std::abs(v(i));
    wsum += w(i) * w(i);
    const double t = (csum - tau) / wsum;
    if (j + 1 == idx.size() || ratio(idx[j + 1]) <= t) {
      theta = t;
      break;
    }
  }
  Eigen::VectorXd out = soft_threshold(v, w, theta);
  if (tau == 0.0) {
    for (Eigen::Index i : idx) out(i) = 0.0;
  }
  return out;
}

void LassoOptions::validate() const {
  if (max_iter < 1) throw InvalidParameter(kModule, "max_iter must be positive");
  if (!(tol > 0.0)) throw InvalidParameter(kModule, "tol must be positive");
  if (window < 1) throw InvalidParameter(kModule, "window must be positive");
  if (!(sufficient > 0.0 && sufficient < 1.0)) {
    throw InvalidParameter(kModule, "sufficient decrease constant must lie in (0, 1)");
  }
  if (!(step_min > 0.0 && step_max >= step_min)) {
    throw InvalidParameter(kModule, "need 0 < step_min <= step_max");
  }
}

SmootherSolution sparse_smooth_lasso(const NormalSystem& sys, const SparsePenaltySpec& spec,
                                     const LassoOptions& opts) {
  opts.validate();
  const Eigen::Index m = sys.c.size();
  spec.validate(m);
  const int n = sys.c.block_size();
  const int N = sys.c.num_blocks();
  auto project = [&](const Eigen::VectorXd& v) {
    return BlockVector(n, N, project_weighted_l1(v, spec.w, spec.tau));
  };
  const double stop = opts.tol * (1.0 + sys.c.data().norm());

  BlockVector x = project(unconstrained(sys).data());
  double f = sys.value(x);
  BlockVector g = sys.gradient(x);
  std::deque<double> recent{f};
  SmootherSolution out;
  out.objective_trace.push_back(f);

  double pg = (project(x.data() - g.data()).data() - x.data()).norm();
  double alpha = std::clamp(1.0 / std::max(pg, 1e-300), opts.step_min, opts.step_max);
  for (int it = 0; it < opts.max_iter; ++it) {
    out.residual_trace.push_back(pg);
    if (pg <= stop) {
      out.x = x;
      out.iterations = it;
      out.objective = f;
      out.residual_norm = pg;
      return out;
    }
    const Eigen::VectorXd d = project(x.data() - alpha * g.data()).data() - x.data();
    const double gd = g.data().dot(d);
    const Eigen::VectorXd Cd = multiply(sys.C, BlockVector(n, N, d)).data();
    const double dCd = d.dot(Cd);
    const double fref = *std::max_element(recent.begin(), recent.end());

    // The objective is quadratic along d, so trial values are exact.
    double lam = 1.0;
    double ftrial = f + gd + 0.5 * dCd;
    int guard = 0;
    while (ftrial > fref + opts.sufficient * lam * gd) {
      const double denom = ftrial - f - lam * gd;
      double next = denom > 0.0 ? -0.5 * lam * lam * gd / denom : 0.5 * lam;
      next = std::clamp(next, 0.1 * lam, 0.5 * lam);
      lam = next;
      ftrial = f + lam * gd + 0.5 * lam * lam * dCd;
      if (++guard > 60) break;
    }
    const Eigen::VectorXd sstep = lam * d;
    const Eigen::VectorXd ystep = lam * Cd;
    x.data() += sstep;
    g.data() += ystep;
    f = sys.value(x);
    out.objective_trace.push_back(f);
    recent.push_back(f);
    if (static_cast<int>(recent.size()) > opts.window) recent.pop_front();

    const double sy = sstep.dot(ystep);
    alpha = sy <= 0.0 ? opts.step_max
                      : std::clamp(sstep.squaredNorm() / sy, opts.step_min, opts.step_max);
    pg = (project(x.data() - g.data()).data() - x.data()).norm();
  }
  throw MaxIterReached(kModule,
                       "spectral projected gradient did not converge, projected gradient " +
                           std::to_string(pg),
                       pg);
}

double lasso_multiplier(const NormalSystem& sys, const SparsePenaltySpec& spec,
                        const BlockVector& x) {
  spec.validate(x.size());
  const Eigen::VectorXd resid = -sys.gradient(x).data();
  double theta = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    if (spec.w(i) > 0.0) theta = std::max(theta, std::abs(resid(i)) / spec.w(i));
  }
  return theta;
}

}  // namespace ksmooth
