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

#include "ksmooth/blocktri.hpp"

#include <string>
#include <utility>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {
constexpr const char* kModule = "blocktri";
}  // namespace

BlockVector::BlockVector(int n, int N)
    : n_(n), N_(N), data_(Eigen::VectorXd::Zero(Eigen::Index(n) * N)) {}

BlockVector::BlockVector(int n, int N, Eigen::VectorXd data)
    : n_(n), N_(N), data_(std::move(data)) {
  if (data_.size() != Eigen::Index(n) * N) {
    throw ShapeMismatch(kModule, "BlockVector data length " +
                                     std::to_string(data_.size()) +
                                     " != n*N = " + std::to_string(n * N));
  }
}

BlockTriMatrix::BlockTriMatrix(std::vector<Eigen::MatrixXd> diag,
                               std::vector<Eigen::MatrixXd> sub)
    : diag_(std::move(diag)), sub_(std::move(sub)) {
  if (diag_.empty()) throw ShapeMismatch(kModule, "no diagonal blocks");
  n_ = static_cast<int>(diag_[0].rows());
  if (sub_.size() + 1 != diag_.size()) {
    throw ShapeMismatch(kModule, "expected N-1 sub-diagonal blocks");
  }
  for (auto& c : diag_) {
    if (c.rows() != n_ || c.cols() != n_) {
      throw ShapeMismatch(kModule, "diagonal block is not n x n");
    }
    c = (0.5 * (c + c.transpose())).eval();
  }
  for (const auto& a : sub_) {
    if (a.rows() != n_ || a.cols() != n_) {
      throw ShapeMismatch(kModule, "sub-diagonal block is not n x n");
    }
  }
}

ForwardFactor factorize(const BlockTriMatrix& A, const BlockVector& r) {
  const int n = A.block_size();
  const int N = A.num_blocks();
  if (r.block_size() != n || r.num_blocks() != N) {
    throw ShapeMismatch(kModule, "right-hand side shape does not match matrix");
  }
  ForwardFactor F;
  F.d.reserve(N);
  F.chol.reserve(N);
  F.s = BlockVector(n, N);

  F.d.push_back(A.diag(0));
  F.s.block(0) = r.block(0);
  for (int k = 0; k < N; ++k) {
    F.chol.emplace_back(F.d[k]);
    if (F.chol[k].info() != Eigen::Success) {
      throw NotPositiveDefinite(
          kModule, "Cholesky of d_k failed at block " + std::to_string(k), k);
    }
    if (k + 1 == N) break;
    // Row k+1 minus l_{k+1} d_k^{-1} times row k.
    const Eigen::MatrixXd& l = A.sub(k + 1);
    const Eigen::MatrixXd dinv_lt = F.chol[k].solve(l.transpose());
    F.d.push_back(A.diag(k + 1) - l * dinv_lt);
    F.d.back() = (0.5 * (F.d.back() + F.d.back().transpose())).eval();
    F.s.block(k + 1) = r.block(k + 1) - l * F.chol[k].solve(F.s.block(k));
  }
  return F;
}

BlockVector back_substitute(const BlockTriMatrix& A, const ForwardFactor& F) {
  const int n = A.block_size();
  const int N = A.num_blocks();
  BlockVector e(n, N);
  e.block(N - 1) = F.chol[N - 1].solve(F.s.block(N - 1));
  for (int k = N - 2; k >= 0; --k) {
    e.block(k) =
        F.chol[k].solve(F.s.block(k) - A.sub(k + 1).transpose() * e.block(k + 1));
  }
  return e;
}

BlockTriSolution solve(const BlockTriMatrix& A, const BlockVector& r) {
  BlockTriSolution out;
  out.factor = factorize(A, r);
  out.e = back_substitute(A, out.factor);
  return out;
}

BlockVector multiply(const BlockTriMatrix& A, const BlockVector& x) {
  const int n = A.block_size();
  const int N = A.num_blocks();
  if (x.block_size() != n || x.num_blocks() != N) {
    throw ShapeMismatch(kModule, "vector shape does not match matrix");
  }
  BlockVector y(n, N);
  for (int k = 0; k < N; ++k) {
    y.block(k).noalias() = A.diag(k) * x.block(k);
    if (k > 0) y.block(k).noalias() += A.sub(k) * x.block(k - 1);
    if (k + 1 < N) y.block(k).noalias() += A.sub(k + 1).transpose() * x.block(k + 1);
  }
  return y;
}

Eigen::MatrixXd assemble_dense(const BlockTriMatrix& A) {
  const int n = A.block_size();
  const int N = A.num_blocks();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Eigen::Index(n) * N, Eigen::Index(n) * N);
  for (int k = 0; k < N; ++k) {
    D.block(k * n, k * n, n, n) = A.diag(k);
    if (k > 0) {
      D.block(k * n, (k - 1) * n, n, n) = A.sub(k);
      D.block((k - 1) * n, k * n, n, n) = A.sub(k).transpose();
    }
  }
  return D;
}

}  // namespace ksmooth
