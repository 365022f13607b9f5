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


// Independent reference implementations used by the tests. Everything here
// works on dense matrices and shares no code with the library solvers.

#ifndef KSMOOTH_TESTS_ORACLES_HPP_
#define KSMOOTH_TESTS_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/model.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = nd(rng);
  return M;
}

inline VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale);
}

inline MatrixXd random_spd(std::mt19937_64& rng, int n, double floor = 0.5) {
  const MatrixXd X = random_matrix(rng, n, n);
  return X * X.transpose() / n + floor * MatrixXd::Identity(n, n);
}

// Block diagonally dominant, hence SPD.
inline ksmooth::BlockTriMatrix random_blocktri(std::mt19937_64& rng, int n, int N) {
  std::vector<MatrixXd> sub;
  for (int k = 1; k < N; ++k) sub.push_back(random_matrix(rng, n, n));
  std::vector<MatrixXd> diag;
  for (int k = 0; k < N; ++k) {
    double off = 0.0;
    if (k > 0) off += sub[k - 1].norm();
    if (k + 1 < N) off += sub[k].norm();
    diag.push_back(random_spd(rng, n) + (off + 0.1) * MatrixXd::Identity(n, n));
  }
  return ksmooth::BlockTriMatrix(diag, sub);
}

inline ksmooth::BlockVector random_block_vector(std::mt19937_64& rng, int n, int N) {
  return ksmooth::BlockVector(n, N, random_vector(rng, n * N));
}

// Random linear-Gaussian model; measurement dimension varies in [0, m_max].
inline ksmooth::LinearStateSpace random_linear_model(std::mt19937_64& rng, int n, int N,
                                                     int m_max, bool allow_missing = true) {
  std::uniform_int_distribution<int> md(allow_missing ? 0 : 1, m_max);
  std::vector<MatrixXd> G, Q, H, R;
  std::vector<VectorXd> z;
  for (int k = 0; k < N; ++k) {
    G.push_back(MatrixXd::Identity(n, n) + random_matrix(rng, n, n, 0.3));
    Q.push_back(random_spd(rng, n));
    const int m = md(rng);
    H.push_back(random_matrix(rng, m, n));
    R.push_back(random_spd(rng, m));
    z.push_back(random_vector(rng, m));
  }
  return ksmooth::make_linear_model(G, Q, H, R, z, random_vector(rng, n));
}

// Stacked process operator: rows of block k are x_k - G_k x_{k-1}.
inline MatrixXd dense_process(const ksmooth::LinearStateSpace& m) {
  const int n = m.state_dim(), N = m.num_steps();
  MatrixXd G = MatrixXd::Identity(n * N, n * N);
  for (int k = 1; k < N; ++k) G.block(k * n, (k - 1) * n, n, n) = -m.G[k];
  return G;
}

struct DenseLS {
  MatrixXd G, H, Qinv, Rinv;
  VectorXd w, z;
};

inline DenseLS dense_least_squares(const ksmooth::LinearStateSpace& m) {
  const int n = m.state_dim(), N = m.num_steps();
  const int M = m.total_measurements();
  DenseLS d;
  d.G = dense_process(m);
  d.H = MatrixXd::Zero(M, n * N);
  d.Qinv = MatrixXd::Zero(n * N, n * N);
  d.Rinv = MatrixXd::Zero(M, M);
  d.w = m.w.data();
  d.z = VectorXd::Zero(M);
  int row = 0;
  for (int k = 0; k < N; ++k) {
    d.Qinv.block(k * n, k * n, n, n) = m.Q[k].inverse();
    const int mk = m.measurement_dim(k);
    if (mk == 0) continue;
    d.H.block(row, k * n, mk, n) = m.H[k];
    d.Rinv.block(row, row, mk, mk) = m.R[k].inverse();
    d.z.segment(row, mk) = m.z[k];
    row += mk;
  }
  return d;
}

inline VectorXd dense_smoother(const ksmooth::LinearStateSpace& m) {
  const DenseLS d = dense_least_squares(m);
  const MatrixXd C = d.H.transpose() * d.Rinv * d.H + d.G.transpose() * d.Qinv * d.G;
  const VectorXd c = d.H.transpose() * d.Rinv * d.z + d.G.transpose() * d.Qinv * d.w;
  return C.ldlt().solve(c);
}

// Covariance-form Kalman filter followed by the Rauch-Tung-Striebel pass.
struct KalmanRTS {
  std::vector<VectorXd> filtered;
  std::vector<MatrixXd> filtered_cov;
  std::vector<VectorXd> smoothed;
};

inline KalmanRTS kalman_rts(const ksmooth::LinearStateSpace& m) {
  const int N = m.num_steps();
  KalmanRTS out;
  std::vector<VectorXd> pred(N);
  std::vector<MatrixXd> pred_cov(N);
  VectorXd x;
  MatrixXd P;
  for (int k = 0; k < N; ++k) {
    if (k == 0) {
      x = m.w.block(0);
      P = m.Q[0];
    } else {
      x = m.G[k] * x + m.w.block(k);
      P = m.G[k] * P * m.G[k].transpose() + m.Q[k];
    }
    pred[k] = x;
    pred_cov[k] = P;
    if (m.measurement_dim(k) > 0) {
      const MatrixXd S = m.H[k] * P * m.H[k].transpose() + m.R[k];
      const MatrixXd K = P * m.H[k].transpose() * S.inverse();
      x = x + K * (m.z[k] - m.H[k] * x);
      P = P - K * m.H[k] * P;
    }
    out.filtered.push_back(x);
    out.filtered_cov.push_back(P);
  }
  out.smoothed.assign(N, VectorXd());
  out.smoothed[N - 1] = out.filtered[N - 1];
  for (int k = N - 2; k >= 0; --k) {
    const MatrixXd J = out.filtered_cov[k] * m.G[k + 1].transpose() * pred_cov[k + 1].inverse();
    out.smoothed[k] = out.filtered[k] + J * (out.smoothed[k + 1] - pred[k + 1]);
  }
  return out;
}

// min 1/2 x^T P x + q^T x  s.t.  A x <= b, by enumerating active sets. Only
// for tiny problems; P may be singular as long as the optimum is a vertex or
// the reduced KKT system is nonsingular.
struct QPResult {
  VectorXd x;
  VectorXd lambda;
  double value = std::numeric_limits<double>::infinity();
  bool found = false;
};

inline QPResult enumerate_qp(const MatrixXd& P, const VectorXd& q, const MatrixXd& A,
                             const VectorXd& b, double tol = 1e-9) {
  const int n = static_cast<int>(P.rows());
  const int m = static_cast<int>(A.rows());
  QPResult best;
  for (long mask = 0; mask < (1L << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (mask & (1L << i)) act.push_back(i);
    const int a = static_cast<int>(act.size());
    if (a > n) continue;
    MatrixXd K = MatrixXd::Zero(n + a, n + a);
    VectorXd rhs(n + a);
    K.topLeftCorner(n, n) = P;
    rhs.head(n) = -q;
    for (int j = 0; j < a; ++j) {
      K.block(0, n + j, n, 1) = A.row(act[j]).transpose();
      K.block(n + j, 0, 1, n) = A.row(act[j]);
      rhs(n + j) = b(act[j]);
    }
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd x = sol.head(n);
    const VectorXd lam = sol.tail(a);
    if (a > 0 && lam.minCoeff() < -tol) continue;
    if (m > 0 && (A * x - b).maxCoeff() > tol * (1.0 + b.cwiseAbs().maxCoeff())) continue;
    const double v = 0.5 * x.dot(P * x) + q.dot(x);
    if (v < best.value - 1e-12) {
      best.value = v;
      best.x = x;
      best.lambda = VectorXd::Zero(m);
      for (int j = 0; j < a; ++j) best.lambda(act[j]) = lam(j);
      best.found = true;
    }
  }
  return best;
}

// Euclidean projection onto {v' : sum w_i |v'_i| <= tau} by bisection on the
// threshold theta: v'_i = sign(v_i) max(|v_i| - theta w_i, 0).
inline VectorXd bisection_projection(const VectorXd& v, const VectorXd& w, double tau) {
  auto shrink = [&](double theta) {
    VectorXd out = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::max(std::abs(v(i)) - theta * w(i), 0.0);
      out(i) = std::copysign(mag, v(i));
    }
    return out;
  };
  auto norm = [&](const VectorXd& x) { return w.cwiseProduct(x.cwiseAbs()).sum(); };
  if (norm(v) <= tau) return v;
  double lo = 0.0, hi = 1.0;
  while (norm(shrink(hi)) > tau) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (norm(shrink(mid)) > tau ? lo : hi) = mid;
  }
  return shrink(hi);
}

inline double central_difference(const std::function<double(double)>& f, double h = 1e-6) {
  return (f(h) - f(-h)) / (2.0 * h);
}

inline double max_abs(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle

#endif  // KSMOOTH_TESTS_ORACLES_HPP_
