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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ksmooth/errors.hpp"
#include "ksmooth/experiments.hpp"
#include "oracles.hpp"

namespace ksmooth {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
constexpr double kSqrt2 = std::numbers::sqrt2;

MatrixXd dense_b(const L1QP& qp) {
  const int n = qp.c.block_size();
  MatrixXd B = MatrixXd::Zero(qp.total_measurements(), n * qp.c.num_blocks());
  int row = 0;
  for (int k = 0; k < qp.c.num_blocks(); ++k) {
    const auto m = qp.b[k].size();
    if (m == 0) continue;
    B.block(row, k * n, m, n) = qp.B[k];
    row += static_cast<int>(m);
  }
  return B;
}

VectorXd stacked(const std::vector<VectorXd>& v) {
  int m = 0;
  for (const auto& x : v) m += static_cast<int>(x.size());
  VectorXd out(m);
  int off = 0;
  for (const auto& x : v) {
    out.segment(off, x.size()) = x;
    off += static_cast<int>(x.size());
  }
  return out;
}

// Minimizer of 1/2 d'Cd + c'd + sqrt2 |Bd + b|_1 through its dual
//   min_u 1/2 (c + B'u)' C^{-1} (c + B'u) - b'u,  |u_i| <= sqrt2.
VectorXd dual_oracle(const L1QP& qp) {
  const MatrixXd C = assemble_dense(qp.C);
  const MatrixXd B = dense_b(qp);
  const VectorXd b = stacked(qp.b);
  const VectorXd c = qp.c.data();
  const MatrixXd Cinv = C.inverse();
  const int M = static_cast<int>(B.rows());
  MatrixXd A(2 * M, M);
  A << MatrixXd::Identity(M, M), -MatrixXd::Identity(M, M);
  const oracle::QPResult r = oracle::enumerate_qp(B * Cinv * B.transpose(), B * Cinv * c - b, A,
                                                  VectorXd::Constant(2 * M, kSqrt2));
  EXPECT_TRUE(r.found);
  return -Cinv * (c + B.transpose() * r.x);
}

TEST(L1QP, ScalarToy) {
  L1QP qp;
  qp.C = BlockTriMatrix({MatrixXd::Identity(1, 1)}, {});
  qp.c = BlockVector(1, 1);
  qp.B = {MatrixXd::Identity(1, 1)};
  qp.b = {VectorXd::Constant(1, -1.0)};
  const L1QPSolution sol = solve_l1_qp(qp);
  EXPECT_NEAR(sol.d.data()(0), 1.0, 1e-8);
}

// c = -G' Q^{-1} w so that the quadratic part equals 1/2 |G d - w|^2_{Q^{-1}}.
TEST(L1QP, LinearTermSignMatchesObjective) {
  std::mt19937_64 rng(3);
  const LinearStateSpace m = oracle::random_linear_model(rng, 2, 5, 2);
  const L1QP qp = build_l1_qp(m);
  const oracle::DenseLS d = oracle::dense_least_squares(m);
  const VectorXd c = -d.G.transpose() * d.Qinv * d.w;
  EXPECT_LT((qp.c.data() - c).norm(), 1e-12);
  for (int trial = 0; trial < 5; ++trial) {
    const BlockVector x = oracle::random_block_vector(rng, 2, 5);
    const VectorXd rw = d.G * x.data() - d.w;
    double l1 = 0.0;
    for (int k = 0; k < 5; ++k) {
      if (m.measurement_dim(k) == 0) continue;
      const MatrixXd L = m.R[k].llt().matrixL();
      l1 += (L.inverse() * (m.H[k] * x.block(k) - m.z[k])).lpNorm<1>();
    }
    const double direct = 0.5 * rw.dot(d.Qinv * rw) + kSqrt2 * l1;
    EXPECT_NEAR(qp.value(x), direct, 1e-10 * (1.0 + direct));
  }
}

TEST(L1QP, ZeroResidualFit) {
  std::mt19937_64 rng(9);
  LinearStateSpace m = oracle::random_linear_model(rng, 2, 6, 2, false);
  const BlockVector xhat = oracle::random_block_vector(rng, 2, 6);
  m.w.data() = oracle::dense_process(m) * xhat.data();
  for (int k = 0; k < 6; ++k) m.z[k] = m.H[k] * xhat.block(k);
  const SmootherSolution sol = smooth_l1_laplace(m);
  EXPECT_LT((sol.x.data() - xhat.data()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(sol.objective, 1e-6);
}

TEST(L1QP, MatchesDualOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const LinearStateSpace m = oracle::random_linear_model(rng, 2, 3, 2);
    const L1QP qp = build_l1_qp(m);
    if (qp.total_measurements() == 0) continue;
    const L1QPSolution sol = solve_l1_qp(qp);
    const VectorXd ref = dual_oracle(qp);
    EXPECT_LT((sol.d.data() - ref).cwiseAbs().maxCoeff(), 1e-5) << trial;
    EXPECT_NEAR(qp.value(sol.d), qp.value(BlockVector(2, 3, ref)), 1e-5);
  }
}

TEST(L1QP, SplitFormEquivalence) {
  std::mt19937_64 rng(14);
  const LinearStateSpace m = oracle::random_linear_model(rng, 3, 10, 2);
  const L1QP qp = build_l1_qp(m);
  const L1QPSolution sol = solve_l1_qp(qp);
  const L1IPState& st = sol.state;
  EXPECT_LT((st.p_plus - st.p_minus - qp.residual(sol.d)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(st.p_plus.cwiseProduct(st.p_minus).maxCoeff(), 1e-8);
  const BlockVector Cd = multiply(qp.C, sol.d);
  const double split_value = 0.5 * sol.d.data().dot(Cd.data()) + qp.c.data().dot(sol.d.data()) +
                             kSqrt2 * (st.p_plus + st.p_minus).sum() + qp.offset;
  EXPECT_NEAR(split_value, qp.value(sol.d), 1e-8);
  EXPECT_LT((st.s_plus + st.s_minus).array().maxCoeff() - 2 * kSqrt2, 1e-8);
  EXPECT_LE(sol.kkt_residual, 1e-6);
}

TEST(L1Step, EliminationSolvesFullNewtonSystem) {
  std::mt19937_64 rng(16);
  const LinearStateSpace m = oracle::random_linear_model(rng, 2, 4, 2, false);
  const L1QP qp = build_l1_qp(m);
  const int M = qp.total_measurements();
  const int nx = 8;
  L1IPState st;
  st.d = oracle::random_block_vector(rng, 2, 4);
  auto pos = [&] { return VectorXd(oracle::random_vector(rng, M).cwiseAbs().array() + 0.2); };
  st.p_plus = pos();
  st.p_minus = pos();
  st.s_plus = pos();
  st.s_minus = pos();
  st.mu = 0.2;
  const L1Direction dir = l1_direction(st, qp);
  const L1Residual r = l1_residual(st, qp, st.mu);
  const MatrixXd B = dense_b(qp);
  const MatrixXd I = MatrixXd::Identity(M, M);
  // Unknown order: dp+, dp-, ds+, ds-, dd.
  const int S = 4 * M + nx;
  MatrixXd K = MatrixXd::Zero(S, S);
  VectorXd rhs(S), step(S);
  K.block(0, 0, M, M) = I;
  K.block(0, M, M, M) = -I;
  K.block(0, 4 * M, M, nx) = -B;
  K.block(M, M, M, M) = st.s_minus.asDiagonal();
  K.block(M, 3 * M, M, M) = st.p_minus.asDiagonal();
  K.block(2 * M, 2 * M, M, M) = I;
  K.block(2 * M, 3 * M, M, M) = I;
  K.block(3 * M, 0, M, M) = st.s_plus.asDiagonal();
  K.block(3 * M, 2 * M, M, M) = st.p_plus.asDiagonal();
  K.block(4 * M, 2 * M, nx, M) = -0.5 * B.transpose();
  K.block(4 * M, 3 * M, nx, M) = 0.5 * B.transpose();
  K.block(4 * M, 4 * M, nx, nx) = assemble_dense(qp.C);
  rhs << -r.split, -r.comp_minus, -r.sum, -r.comp_plus, -r.stationarity.data();
  step << dir.dp_plus, dir.dp_minus, dir.ds_plus, dir.ds_minus, dir.dd.data();
  EXPECT_LT((K * step - rhs).norm(), 1e-9 * (1.0 + rhs.norm()));
}

TEST(L1Step, InitialStateIsInterior) {
  std::mt19937_64 rng(17);
  const L1QP qp = build_l1_qp(oracle::random_linear_model(rng, 2, 6, 2));
  const L1IPState st = l1_initial_state(qp);
  EXPECT_GT(st.p_plus.minCoeff(), 0.0);
  EXPECT_GT(st.p_minus.minCoeff(), 0.0);
  EXPECT_LT((st.s_plus + st.s_minus).array().abs().maxCoeff() - 2 * kSqrt2, 1e-15);
  EXPECT_LT((st.p_plus - st.p_minus - qp.residual(st.d)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(L1Objective, PerfectFitAndUnitResidual) {
  std::mt19937_64 rng(18);
  LinearStateSpace lin = oracle::random_linear_model(rng, 2, 4, 2, false);
  for (int k = 1; k < 4; ++k) lin.w.block(k).setZero();
  NonlinearStateSpace m = as_nonlinear(lin);
  BlockVector x = default_initial_trajectory(m);
  for (int k = 0; k < 4; ++k) m.z[k] = m.measurement(k, x.block(k));
  EXPECT_NEAR(l1_objective(m, x), 0.0, 1e-12);
  const MatrixXd L = m.R[2].llt().matrixL();
  m.z[2] -= L.col(0);
  EXPECT_NEAR(l1_objective(m, x), kSqrt2, 1e-12);
}

TEST(L1Objective, MatchesComponentwiseSum) {
  const Scenario sc = make_scenario("robust-vanderpol", {}, 5);
  std::mt19937_64 rng(19);
  const BlockVector x = oracle::random_block_vector(rng, 2, sc.model.N);
  double f = 0.0;
  for (int k = 0; k < sc.model.N; ++k) {
    const VectorXd mean = k == 0 ? sc.model.initial_mean
                                 : VectorXd(sc.model.process(k, x.block(k - 1)));
    const VectorXd rw = x.block(k) - mean;
    f += 0.5 * rw.dot(sc.model.Q[k].inverse() * rw);
    f += kSqrt2 * std::abs(x.block(k)(0) - sc.model.z[k](0)) / std::sqrt(sc.model.R[k](0, 0));
  }
  EXPECT_NEAR(l1_objective(sc.model, x), f, 1e-9 * f);
}

TEST(L1Smoother, AffineModelNeedsOneIteration) {
  const Scenario sc = make_scenario("robust-linear", {}, 3);
  auto [sol, trace] = smooth_l1_laplace(sc.model, BlockVector(2, sc.model.N));
  int steps = 0;
  for (const auto& it : trace.iterations) steps += it.step > 0.0;
  EXPECT_EQ(steps, 1);
  const SmootherSolution direct = smooth_l1_laplace(*sc.linear);
  EXPECT_LT((sol.x.data() - direct.x.data()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(L1Smoother, DownweightsGrossOutlier) {
  Scenario sc = make_scenario("sine", {}, 8);
  LinearStateSpace m = *sc.linear;
  m.z[50](0) += 100.0;
  const double gauss = smooth(m).x.block(50)(1);
  const double robust = smooth_l1_laplace(m).x.block(50)(1);
  EXPECT_LT(std::abs(robust - sc.truth.block(50)(1)), 0.5);
  EXPECT_GT(std::abs(gauss - sc.truth.block(50)(1)), 1.0);
}

TEST(L1Smoother, MaxIterReported) {
  std::mt19937_64 rng(2);
  const L1QP qp = build_l1_qp(oracle::random_linear_model(rng, 2, 10, 2, false));
  IPOptions o;
  o.max_iter = 2;
  try {
    solve_l1_qp(qp, o);
    FAIL();
  } catch (const MaxIterReached& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(L1SmootherProperty, VanDerPolContaminationRobustness) {
  RobustVdpTableSpec spec;
  spec.replications = 100;
  spec.seed = 11;
  spec.cells = {{0.0, 0.0}, {0.2, 1000.0}};
  const MSEReport rep = run_robust_vdp_table(spec);
  const double ils = rep.cell(0.2, 1000.0).method("ILS").median;
  const double igs = rep.cell(0.2, 1000.0).method("IGS").median;
  const double nominal = rep.cell(0.0, 0.0).method("ILS").median;
  EXPECT_LT(ils, igs);
  EXPECT_LE(ils, 2.0 * nominal);
}

}  // namespace
}  // namespace ksmooth
