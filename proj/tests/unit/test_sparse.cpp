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
#include <random>

#include <gtest/gtest.h>

#include "ksmooth/errors.hpp"
#include "oracles.hpp"

namespace ksmooth {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

NormalSystem random_system(std::mt19937_64& rng, int n, int N) {
  NormalSystem sys;
  sys.C = oracle::random_blocktri(rng, n, N);
  sys.c = oracle::random_block_vector(rng, n, N);
  return sys;
}

NormalSystem identity_system(const VectorXd& c, int n) {
  const int N = static_cast<int>(c.size()) / n;
  std::vector<MatrixXd> diag(N, MatrixXd::Identity(n, n));
  std::vector<MatrixXd> sub(N - 1, MatrixXd::Zero(n, n));
  return {BlockTriMatrix(diag, sub), BlockVector(n, N, c), 0.0};
}

// Penalized problem as a QP in (x, y): min 1/2 x'Cx - c'x + lambda 1'y, -y <= Wx <= y.
VectorXd dense_penalized(const NormalSystem& sys, const VectorXd& w, double lambda) {
  const MatrixXd C = assemble_dense(sys.C);
  const int m = static_cast<int>(C.rows());
  MatrixXd P = MatrixXd::Zero(2 * m, 2 * m);
  P.topLeftCorner(m, m) = C;
  P.bottomRightCorner(m, m) = 1e-12 * MatrixXd::Identity(m, m);
  VectorXd q(2 * m);
  q << -sys.c.data(), VectorXd::Constant(m, lambda);
  MatrixXd A = MatrixXd::Zero(2 * m, 2 * m);
  A.topLeftCorner(m, m) = w.asDiagonal();
  A.topRightCorner(m, m) = -MatrixXd::Identity(m, m);
  A.bottomLeftCorner(m, m) = -MatrixXd(w.asDiagonal());
  A.bottomRightCorner(m, m) = -MatrixXd::Identity(m, m);
  const oracle::QPResult r = oracle::enumerate_qp(P, q, A, VectorXd::Zero(2 * m));
  EXPECT_TRUE(r.found);
  return r.x.head(m);
}

TEST(SoftThreshold, Componentwise) {
  const VectorXd v = Eigen::Vector4d(3.0, -0.5, -2.0, 1.0);
  const VectorXd w = Eigen::Vector4d(1.0, 1.0, 0.5, 0.0);
  const VectorXd out = soft_threshold(v, w, 1.0);
  EXPECT_DOUBLE_EQ(out(0), 2.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
  EXPECT_DOUBLE_EQ(out(2), -1.5);
  EXPECT_DOUBLE_EQ(out(3), 1.0);
}

TEST(SparsePenalized, IdentitySystemIsSoftThreshold) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd c = oracle::random_vector(rng, 12, 2.0);
    const NormalSystem sys = identity_system(c, 2);
    SparsePenaltySpec spec;
    spec.w = oracle::random_vector(rng, 12).cwiseAbs();
    spec.lambda = 0.7;
    const SmootherSolution sol = sparse_smooth_penalized(sys, spec);
    EXPECT_LT((sol.x.data() - soft_threshold(c, spec.w, spec.lambda)).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(SparsePenalized, MatchesDenseOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const NormalSystem sys = random_system(rng, 2, 2);
    SparsePenaltySpec spec;
    spec.w = VectorXd::Ones(4);
    spec.w(1) = 0.0;
    spec.lambda = 0.3;
    const SmootherSolution sol = sparse_smooth_penalized(sys, spec);
    const VectorXd ref = dense_penalized(sys, spec.w, spec.lambda);
    EXPECT_LT((sol.x.data() - ref).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(prox_gradient_residual(sys, spec, sol.x), 1e-7);
  }
}

TEST(SparsePenalized, TinyLambdaIsUnconstrained) {
  std::mt19937_64 rng(3);
  const NormalSystem sys = random_system(rng, 3, 10);
  SparsePenaltySpec spec;
  spec.w = VectorXd::Ones(30);
  spec.lambda = 1e-10;
  const SmootherSolution sol = sparse_smooth_penalized(sys, spec);
  EXPECT_LT((sol.x.data() - solve(sys.C, sys.c).e.data()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(SparsePenalized, LargeLambdaGivesZero) {
  std::mt19937_64 rng(4);
  const NormalSystem sys = random_system(rng, 2, 8);
  SparsePenaltySpec spec;
  spec.w = VectorXd::Ones(16);
  spec.lambda = sys.c.data().lpNorm<Eigen::Infinity>() * 1.01;
  const SmootherSolution sol = sparse_smooth_penalized(sys, spec);
  EXPECT_LT(sol.x.data().lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SparsePenalized, ReducedDiagonalMatchesExplicitForm) {
  std::mt19937_64 rng(5);
  SparseIPState st;
  const int m = 20;
  st.s = oracle::random_vector(rng, m).cwiseAbs().array() + 0.1;
  st.r = oracle::random_vector(rng, m).cwiseAbs().array() + 0.1;
  st.q = oracle::random_vector(rng, m).cwiseAbs().array() + 0.1;
  st.p = oracle::random_vector(rng, m).cwiseAbs().array() + 0.1;
  const VectorXd w = oracle::random_vector(rng, m);
  const VectorXd d = sparse_reduced_diagonal(st, w);
  for (int i = 0; i < m; ++i) {
    const double qs = st.q(i) / st.s(i), pr = st.p(i) / st.r(i);
    EXPECT_NEAR(d(i), w(i) * w(i) * 4.0 * qs * pr / (qs + pr), 1e-10 * (1.0 + std::abs(d(i))));
  }
}

TEST(SparsePenalized, Validation) {
  std::mt19937_64 rng(6);
  const NormalSystem sys = random_system(rng, 2, 3);
  SparsePenaltySpec spec;
  spec.w = VectorXd::Ones(5);
  spec.lambda = 1.0;
  EXPECT_THROW(sparse_smooth_penalized(sys, spec), ShapeMismatch);
  spec.w = -VectorXd::Ones(6);
  EXPECT_THROW(sparse_smooth_penalized(sys, spec), InvalidParameter);
  spec.w = VectorXd::Ones(6);
  spec.lambda = 0.0;
  EXPECT_THROW(sparse_smooth_penalized(sys, spec), InvalidParameter);
}

TEST(ComponentWeights, SelectsComponents) {
  const VectorXd w = component_weights(3, 2, {0, 2}, 2.0);
  EXPECT_EQ(w, (VectorXd(6) << 2, 0, 2, 2, 0, 2).finished());
  EXPECT_THROW(component_weights(3, 2, {3}), InvalidParameter);
}

TEST(Projection, HandExample) {
  const VectorXd p = project_weighted_l1(Eigen::Vector2d(3.0, 1.0), Eigen::Vector2d::Ones(), 2.0);
  EXPECT_NEAR(p(0), 2.0, 1e-14);
  EXPECT_NEAR(p(1), 0.0, 1e-14);
}

TEST(Projection, MatchesBisection) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd v = oracle::random_vector(rng, 15, 3.0);
    VectorXd w = oracle::random_vector(rng, 15).cwiseAbs();
    w(trial % 15) = 0.0;
    const double tau = 0.1 + 0.05 * trial;
    const VectorXd p = project_weighted_l1(v, w, tau);
    EXPECT_LT((p - oracle::bisection_projection(v, w, tau)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(w.cwiseProduct(p).lpNorm<1>(), tau + 1e-10);
    EXPECT_EQ(p(trial % 15), v(trial % 15));
    EXPECT_LT((project_weighted_l1(p, w, tau) - p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Projection, InsideBallIsIdentity) {
  const VectorXd v = Eigen::Vector3d(0.1, -0.2, 0.3);
  EXPECT_EQ(project_weighted_l1(v, VectorXd::Ones(3), 1.0), v);
  EXPECT_EQ(project_weighted_l1(v, VectorXd::Ones(3), 0.0), VectorXd::Zero(3));
  EXPECT_THROW(project_weighted_l1(v, VectorXd::Ones(2), 1.0), ShapeMismatch);
  EXPECT_THROW(project_weighted_l1(v, VectorXd::Ones(3), -1.0), InvalidParameter);
}

TEST(Lasso, LargeRadiusIsUnconstrained) {
  std::mt19937_64 rng(8);
  const NormalSystem sys = random_system(rng, 2, 10);
  SparsePenaltySpec spec;
  spec.w = VectorXd::Ones(20);
  spec.tau = 1e6;
  const SmootherSolution sol = sparse_smooth_lasso(sys, spec);
  EXPECT_LT((sol.x.data() - solve(sys.C, sys.c).e.data()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lasso, ZeroRadiusZeroesWeightedEntries) {
  std::mt19937_64 rng(9);
  const NormalSystem sys = random_system(rng, 2, 10);
  SparsePenaltySpec spec;
  spec.w = component_weights(2, 10, {1});
  spec.tau = 0.0;
  const SmootherSolution sol = sparse_smooth_lasso(sys, spec);
  EXPECT_LT(spec.w.cwiseProduct(sol.x.data()).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Lasso, AgreesWithPenalizedForm) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const NormalSystem sys = random_system(rng, 2, 15);
    SparsePenaltySpec spec;
    spec.w = VectorXd::Ones(30);
    spec.lambda = 0.05 + 0.05 * trial;
    const SmootherSolution pen = sparse_smooth_penalized(sys, spec);
    spec.tau = spec.w.cwiseProduct(pen.x.data()).lpNorm<1>();
    LassoOptions lo;
    lo.tol = 1e-9;
    const SmootherSolution las = sparse_smooth_lasso(sys, spec, lo);
    EXPECT_NEAR(sys.value(las.x), sys.value(pen.x), 1e-5 * (1.0 + std::abs(sys.value(pen.x))))
        << trial;
    EXPECT_NEAR(lasso_multiplier(sys, spec, las.x), spec.lambda, 1e-4);
  }
}

TEST(Lasso, AcceptedIteratesRespectNonmonotoneReference) {
  std::mt19937_64 rng(11);
  const NormalSystem sys = random_system(rng, 3, 40);
  SparsePenaltySpec spec;
  spec.w = VectorXd::Ones(120);
  spec.tau = 1.0;
  LassoOptions lo;
  const SmootherSolution sol = sparse_smooth_lasso(sys, spec, lo);
  const auto& f = sol.objective_trace;
  ASSERT_GE(f.size(), 2u);
  for (std::size_t i = 1; i < f.size(); ++i) {
    const std::size_t lo_i = i > static_cast<std::size_t>(lo.window) ? i - lo.window : 0;
    const double ref = *std::max_element(f.begin() + static_cast<long>(lo_i),
                                         f.begin() + static_cast<long>(i));
    EXPECT_LE(f[i], ref + 1e-12 * (1.0 + std::abs(ref))) << i;
  }
  EXPECT_LT(f.back(), f.front());
}

TEST(Lasso, OptionsValidation) {
  LassoOptions lo;
  lo.window = 0;
  EXPECT_THROW(lo.validate(), InvalidParameter);
  lo = {};
  lo.sufficient = 1.0;
  EXPECT_THROW(lo.validate(), InvalidParameter);
}

}  // namespace
}  // namespace ksmooth
