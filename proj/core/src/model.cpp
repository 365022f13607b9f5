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

#include "ksmooth/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {

constexpr const char* kModule = "model";

void require_spd(const Eigen::MatrixXd& M, const std::string& what, int k) {
  if (M.rows() != M.cols()) {
    throw ShapeMismatch(kModule, what + " is not square at step " + std::to_string(k));
  }
  if (M.rows() == 0) return;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(kModule, what + " is not positive definite at step " +
                                           std::to_string(k), k);
  }
}

}  // namespace

int LinearStateSpace::total_measurements() const {
  int m = 0;
  for (const auto& zk : z) m += static_cast<int>(zk.size());
  return m;
}

void LinearStateSpace::validate() const {
  const int n = state_dim();
  const int N = num_steps();
  if (N == 0 || w.num_blocks() != N) {
    throw ShapeMismatch(kModule, "prior vector w must have one block per step");
  }
  if (static_cast<int>(G.size()) != N || static_cast<int>(H.size()) != N ||
      static_cast<int>(R.size()) != N || static_cast<int>(z.size()) != N) {
    throw ShapeMismatch(kModule, "G, Q, H, R, z must all have N entries");
  }
  for (int k = 0; k < N; ++k) {
    if (G[k].rows() != n || G[k].cols() != n) {
      throw ShapeMismatch(kModule, "G is not n x n at step " + std::to_string(k));
    }
    if (Q[k].rows() != n) {
      throw ShapeMismatch(kModule, "Q is not n x n at step " + std::to_string(k));
    }
    const auto m = z[k].size();
    if (H[k].rows() != m || (m > 0 && H[k].cols() != n)) {
      throw ShapeMismatch(kModule, "H does not match z at step " + std::to_string(k));
    }
    if (R[k].rows() != m) {
      throw ShapeMismatch(kModule, "R does not match z at step " + std::to_string(k));
    }
    require_spd(Q[k], "Q", k);
    require_spd(R[k], "R", k);
  }
}

LinearStateSpace make_linear_model(std::vector<Eigen::MatrixXd> G,
                                   std::vector<Eigen::MatrixXd> Q,
                                   std::vector<Eigen::MatrixXd> H,
                                   std::vector<Eigen::MatrixXd> R,
                                   std::vector<Eigen::VectorXd> z,
                                   const Eigen::VectorXd& initial_mean) {
  LinearStateSpace m;
  const int n = static_cast<int>(initial_mean.size());
  const int N = static_cast<int>(Q.size());
  m.G = std::move(G);
  m.Q = std::move(Q);
  m.H = std::move(H);
  m.R = std::move(R);
  m.z = std::move(z);
  m.w = BlockVector(n, N);
  if (N > 0) m.w.block(0) = initial_mean;
  m.validate();
  return m;
}

Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + h;
    const Eigen::VectorXd fp = f(xp);
    xp(j) = x(j) - h;
    const Eigen::VectorXd fm = f(xp);
    xp(j) = x(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Eigen::MatrixXd NonlinearStateSpace::process_jac(int k, const Eigen::VectorXd& x) const {
  if (process_jacobian) return process_jacobian(k, x);
  return finite_difference_jacobian(
      [this, k](const Eigen::VectorXd& y) { return process(k, y); }, x);
}

Eigen::MatrixXd NonlinearStateSpace::measurement_jac(int k,
                                                     const Eigen::VectorXd& x) const {
  if (z[k].size() == 0) return Eigen::MatrixXd(0, n);
  if (measurement_jacobian) return measurement_jacobian(k, x);
  return finite_difference_jacobian(
      [this, k](const Eigen::VectorXd& y) { return measurement(k, y); }, x);
}

BlockVector NonlinearStateSpace::prior_vector() const {
  BlockVector w(n, N);
  w.block(0) = initial_mean;
  return w;
}

void NonlinearStateSpace::validate() const {
  if (n <= 0 || N <= 0) throw ShapeMismatch(kModule, "empty model");
  if (initial_mean.size() != n) {
    throw ShapeMismatch(kModule, "initial mean has wrong dimension");
  }
  if (!process || !measurement) {
    throw InvalidParameter(kModule, "process and measurement maps are required");
  }
  if (static_cast<int>(Q.size()) != N || static_cast<int>(R.size()) != N ||
      static_cast<int>(z.size()) != N) {
    throw ShapeMismatch(kModule, "Q, R, z must have N entries");
  }
  for (int k = 0; k < N; ++k) {
    if (Q[k].rows() != n) throw ShapeMismatch(kModule, "Q is not n x n");
    if (R[k].rows() != z[k].size()) throw ShapeMismatch(kModule, "R does not match z");
    require_spd(Q[k], "Q", k);
    require_spd(R[k], "R", k);
  }
}

NonlinearStateSpace as_nonlinear(const LinearStateSpace& lin) {
  NonlinearStateSpace m;
  m.n = lin.state_dim();
  m.N = lin.num_steps();
  m.x0 = Eigen::VectorXd::Zero(m.n);
  m.initial_mean = lin.w.block(0);
  const auto G = lin.G;
  const auto H = lin.H;
  const BlockVector w = lin.w;
  m.process = [G, w](int k, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (k == 0) return w.block(0);
    return G[k] * x + w.block(k);
  };
  m.process_jacobian = [G](int k, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return G[k];
  };
  m.measurement = [H](int k, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return H[k] * x;
  };
  m.measurement_jacobian = [H](int k, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return H[k];
  };
  m.Q = lin.Q;
  m.R = lin.R;
  m.z = lin.z;
  return m;
}

NonlinearStateSpace with_measurements(NonlinearStateSpace model,
                                      std::vector<Eigen::VectorXd> z) {
  if (static_cast<int>(z.size()) != model.N) {
    throw ShapeMismatch(kModule, "measurement sequence length != N");
  }
  for (int k = 0; k < model.N; ++k) {
    if (z[k].size() != model.R[k].rows()) {
      throw ShapeMismatch(kModule, "measurement dimension does not match R");
    }
  }
  model.z = std::move(z);
  return model;
}

LinearStateSpace with_measurements(LinearStateSpace model,
                                   std::vector<Eigen::VectorXd> z) {
  if (z.size() != model.z.size()) {
    throw ShapeMismatch(kModule, "measurement sequence length != N");
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k].size() != model.R[k].rows()) {
      throw ShapeMismatch(kModule, "measurement dimension does not match R");
    }
  }
  model.z = std::move(z);
  return model;
}

int AffineConstraints::total() const {
  int l = 0;
  for (const auto& bk : b) l += static_cast<int>(bk.size());
  return l;
}

AffineConstraints linearize(const NonlinearConstraints& c, const BlockVector& x) {
  AffineConstraints out;
  const int N = x.num_blocks();
  if (static_cast<int>(c.b.size()) != N) {
    throw ShapeMismatch(kModule, "constraint bounds must have N entries");
  }
  out.B.resize(N);
  out.b.resize(N);
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd xk = x.block(k);
    if (c.b[k].size() == 0) {
      out.B[k] = Eigen::MatrixXd(0, x.block_size());
      out.b[k] = Eigen::VectorXd(0);
      continue;
    }
    out.B[k] = c.jacobian ? c.jacobian(k, xk)
                          : finite_difference_jacobian(
                                [&c, k](const Eigen::VectorXd& y) { return c.xi(k, y); }, xk);
    out.b[k] = c.b[k] - c.xi(k, xk);
  }
  return out;
}

double max_violation(const NonlinearConstraints& c, const BlockVector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.num_blocks(); ++k) {
    if (c.b[k].size() == 0) continue;
    worst = std::max(worst, (c.xi(k, x.block(k)) - c.b[k]).maxCoeff());
  }
  return worst;
}

double max_violation(const AffineConstraints& c, const BlockVector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.num_blocks(); ++k) {
    if (c.b[k].size() == 0) continue;
    worst = std::max(worst, (c.B[k] * x.block(k) - c.b[k]).maxCoeff());
  }
  return worst;
}

StackedEval eval_stacked(const NonlinearStateSpace& model, const BlockVector& x) {
  if (x.block_size() != model.n || x.num_blocks() != model.N) {
    throw ShapeMismatch(kModule, "trajectory shape does not match model");
  }
  StackedEval out;
  out.g = BlockVector(model.n, model.N);
  out.h.resize(model.N);
  for (int k = 0; k < model.N; ++k) {
    const Eigen::VectorXd xk = x.block(k);
    out.g.block(k) = k == 0 ? xk : Eigen::VectorXd(xk - model.process(k, x.block(k - 1)));
    out.h[k] = model.z[k].size() == 0 ? Eigen::VectorXd(0) : model.measurement(k, xk);
  }
  return out;
}

LinearStateSpace linearize(const NonlinearStateSpace& model, const BlockVector& x) {
  const StackedEval ev = eval_stacked(model, x);
  LinearStateSpace sub;
  const int N = model.N;
  sub.G.resize(N);
  sub.H.resize(N);
  sub.z.resize(N);
  sub.Q = model.Q;
  sub.R = model.R;
  sub.G[0] = Eigen::MatrixXd::Zero(model.n, model.n);
  for (int k = 0; k < N; ++k) {
    if (k > 0) sub.G[k] = model.process_jac(k, x.block(k - 1));
    sub.H[k] = model.measurement_jac(k, x.block(k));
    sub.z[k] = model.z[k] - ev.h[k];
  }
  sub.w = model.prior_vector();
  sub.w.data() -= ev.g.data();
  return sub;
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d smooth_signal_transition(double dt) {
  Eigen::Matrix2d G;
  G << 1.0, 0.0, dt, 1.0;
  return G;
}

Eigen::Matrix2d smooth_signal_covariance(double dt, double sigma2) {
  Eigen::Matrix2d Q;
  Q << dt, dt * dt / 2.0, dt * dt / 2.0, dt * dt * dt / 3.0;
  return sigma2 * Q;
}

LinearStateSpace smooth_signal_model(const SmoothSignalParams& p) {
  if (!(p.dt > 0.0)) throw InvalidParameter(kModule, "dt must be positive");
  if (!(p.sigma2 > 0.0)) throw InvalidParameter(kModule, "sigma2 must be positive");
  if (!(p.R > 0.0)) throw InvalidParameter(kModule, "R must be positive");
  if (p.N < 1) throw InvalidParameter(kModule, "N must be at least 1");
  const Eigen::MatrixXd G = smooth_signal_transition(p.dt);
  const Eigen::MatrixXd Q = smooth_signal_covariance(p.dt, p.sigma2);
  Eigen::MatrixXd H(1, 2);
  H << 0.0, 1.0;
  std::vector<Eigen::MatrixXd> Qs(p.N, Q);
  if (p.initial_var > 0.0) Qs[0] = p.initial_var * Eigen::MatrixXd::Identity(2, 2);
  return make_linear_model(std::vector<Eigen::MatrixXd>(p.N, G), std::move(Qs),
                           std::vector<Eigen::MatrixXd>(p.N, H),
                           std::vector<Eigen::MatrixXd>(p.N, Eigen::MatrixXd::Constant(1, 1, p.R)),
                           std::vector<Eigen::VectorXd>(p.N, Eigen::VectorXd::Zero(1)),
                           p.initial_mean);
}

AffineConstraints smooth_signal_bounds(const std::vector<double>& lower,
                                       const std::vector<double>& upper) {
  if (lower.size() != upper.size()) {
    throw ShapeMismatch(kModule, "lower and upper bounds differ in length");
  }
  Eigen::MatrixXd B(2, 2);
  B << 0.0, 1.0, 0.0, -1.0;
  AffineConstraints con;
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!(lower[k] < upper[k])) {
      throw InvalidParameter(kModule, "empty box at step " + std::to_string(k));
    }
    con.B.push_back(B);
    con.b.push_back(Eigen::Vector2d(upper[k], -lower[k]));
  }
  return con;
}

VanDerPolParams vanderpol_simple_params() {
  VanDerPolParams p;
  p.N = 80;
  p.dt = 30.0 / p.N;
  return p;
}

VanDerPolParams vanderpol_robust_params() {
  VanDerPolParams p;
  p.N = 164;
  p.dt = 16.0 / p.N;
  return p;
}

Eigen::Vector2d vanderpol_step(double mu, double dt, const Eigen::Vector2d& x,
                               VanDerPolScheme scheme) {
  if (scheme == VanDerPolScheme::kExplicit) {
    return {x(0) + x(1) * dt, x(1) + (mu * (1.0 - x(0) * x(0)) * x(1) - x(0)) * dt};
  }
  const double x1 = x(0) + x(1) * dt;
  const double den = 1.0 - mu * (1.0 - x1 * x1) * dt;
  return {x1, (x(1) - x1 * dt) / den};
}

Eigen::Matrix2d vanderpol_step_jacobian(double mu, double dt, const Eigen::Vector2d& x,
                                        VanDerPolScheme scheme) {
  Eigen::Matrix2d J;
  if (scheme == VanDerPolScheme::kExplicit) {
    J << 1.0, dt,
        (-2.0 * mu * x(0) * x(1) - 1.0) * dt, 1.0 + mu * (1.0 - x(0) * x(0)) * dt;
    return J;
  }
  const double x1 = x(0) + x(1) * dt;
  const double den = 1.0 - mu * (1.0 - x1 * x1) * dt;
  const double x2 = (x(1) - x1 * dt) / den;
  const double dden = 2.0 * mu * dt * x1;  // d den / d x1'
  J(0, 0) = 1.0;
  J(0, 1) = dt;
  J(1, 0) = (-dt - x2 * dden) / den;
  J(1, 1) = (1.0 - dt * dt - x2 * dden * dt) / den;
  return J;
}

NonlinearStateSpace vanderpol_model(const VanDerPolParams& p) {
  if (!(p.dt >= 0.0)) throw InvalidParameter(kModule, "dt must be nonnegative");
  if (p.N < 1) throw InvalidParameter(kModule, "N must be at least 1");
  if (p.scheme == VanDerPolScheme::kUpdated && !(p.mu * p.dt < 1.0)) {
    throw InvalidParameter(kModule, "the updated-state step needs mu * dt < 1");
  }
  if (!(p.Q1 > 0.0) || !(p.Q > 0.0) || !(p.R > 0.0)) {
    throw InvalidParameter(kModule, "variances must be positive");
  }
  NonlinearStateSpace m;
  m.n = 2;
  m.N = p.N;
  m.x0 = p.x0;
  m.initial_mean = p.initial_mean;
  const double mu = p.mu;
  const double dt = p.dt;
  const VanDerPolScheme scheme = p.scheme;
  m.process = [mu, dt, scheme](int, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return vanderpol_step(mu, dt, x, scheme);
  };
  m.process_jacobian = [mu, dt, scheme](int, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return vanderpol_step_jacobian(mu, dt, x, scheme);
  };
  m.measurement = [](int, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x.head(1);
  };
  m.measurement_jacobian = [](int, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd J(1, 2);
    J << 1.0, 0.0;
    return J;
  };
  m.Q.assign(p.N, p.Q * Eigen::MatrixXd::Identity(2, 2));
  m.Q[0] = p.Q1 * Eigen::MatrixXd::Identity(2, 2);
  m.R.assign(p.N, Eigen::MatrixXd::Constant(1, 1, p.R));
  m.z.assign(p.N, Eigen::VectorXd::Zero(1));
  return m;
}

Eigen::Vector4d ship_truth(double t) {
  return {1.0, t, -std::cos(t), 1.3 - std::sin(t)};
}

// Two stacked smooth-signal blocks. The (4,4) entry is 1 so the y position
// integrates its velocity like the x position does.
Eigen::Matrix4d ship_transition(double dt) {
  Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
  G.block<2, 2>(0, 0) = smooth_signal_transition(dt);
  G.block<2, 2>(2, 2) = smooth_signal_transition(dt);
  return G;
}

Eigen::Matrix4d ship_process_covariance(double dt) {
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  Q.block<2, 2>(0, 0) = smooth_signal_covariance(dt, 1.0);
  Q.block<2, 2>(2, 2) = smooth_signal_covariance(dt, 1.0);
  return Q;
}

Eigen::Vector2d ship_ranges(const Eigen::Vector4d& x) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {std::hypot(x(1), x(3)), std::hypot(x(1) - two_pi, x(3))};
}

double ship_constraint(const Eigen::Vector4d& x) {
  return 1.25 - std::sin(x(1)) - x(3);
}

std::pair<NonlinearStateSpace, NonlinearConstraints> ship_model(const ShipParams& p) {
  if (!(p.dt > 0.0)) throw InvalidParameter(kModule, "dt must be positive");
  if (!(p.sigma2 > 0.0)) throw InvalidParameter(kModule, "sigma2 must be positive");
  if (p.N < 1) throw InvalidParameter(kModule, "N must be at least 1");
  NonlinearStateSpace m;
  m.n = 4;
  m.N = p.N;
  m.x0 = ship_truth(0.0);
  m.initial_mean = ship_truth(p.dt);
  const Eigen::Matrix4d G = ship_transition(p.dt);
  m.process = [G](int, const Eigen::VectorXd& x) -> Eigen::VectorXd { return G * x; };
  m.process_jacobian = [G](int, const Eigen::VectorXd&) -> Eigen::MatrixXd { return G; };
  m.measurement = [](int, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return ship_ranges(x);
  };
  m.measurement_jacobian = [](int, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double two_pi = 2.0 * std::numbers::pi;
    const double r1 = std::hypot(x(1), x(3));
    const double r2 = std::hypot(x(1) - two_pi, x(3));
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 4);
    J(0, 1) = x(1) / r1;
    J(0, 3) = x(3) / r1;
    J(1, 1) = (x(1) - two_pi) / r2;
    J(1, 3) = x(3) / r2;
    return J;
  };
  m.Q.assign(p.N, ship_process_covariance(p.dt));
  m.Q[0] = 100.0 * Eigen::MatrixXd::Identity(4, 4);
  m.R.assign(p.N, p.sigma2 * Eigen::MatrixXd::Identity(2, 2));
  m.z.assign(p.N, Eigen::VectorXd::Zero(2));

  NonlinearConstraints c;
  c.xi = [](int, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, ship_constraint(x));
  };
  c.jacobian = [](int, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1, 4);
    J(0, 1) = -std::cos(x(1));
    J(0, 3) = -1.0;
    return J;
  };
  c.b.assign(p.N, Eigen::VectorXd::Zero(1));
  return {std::move(m), std::move(c)};
}

}  // namespace ksmooth
