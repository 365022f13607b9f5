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

#ifndef KSMOOTH_BLOCKTRI_HPP_
#define KSMOOTH_BLOCKTRI_HPP_

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace ksmooth {

// N stacked segments of length n, stored contiguously.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int n, int N);
  BlockVector(int n, int N, Eigen::VectorXd data);

  int block_size() const { return n_; }
  int num_blocks() const { return N_; }
  Eigen::Index size() const { return data_.size(); }

  auto block(int k) { return data_.segment(Eigen::Index(k) * n_, n_); }
  auto block(int k) const { return data_.segment(Eigen::Index(k) * n_, n_); }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  bool same_shape(const BlockVector& other) const {
    return n_ == other.n_ && N_ == other.N_;
  }

 private:
  int n_ = 0;
  int N_ = 0;
  Eigen::VectorXd data_;
};

// Symmetric block-tridiagonal matrix
//
//   [ c_0   l_1^T                ]
//   [ l_1   c_1   l_2^T          ]
//   [       l_2   c_2    ...     ]
//   [              ...   c_{N-1} ]
//
// `diag(k)` is c_k (k = 0..N-1) and `sub(k)` is the block l_k at block
// position (k, k-1) for k = 1..N-1. Diagonal blocks are symmetrized on
// construction.
class BlockTriMatrix {
 public:
  BlockTriMatrix() = default;
  BlockTriMatrix(std::vector<Eigen::MatrixXd> diag,
                 std::vector<Eigen::MatrixXd> sub);

  int block_size() const { return n_; }
  int num_blocks() const { return static_cast<int>(diag_.size()); }

  const Eigen::MatrixXd& diag(int k) const { return diag_[k]; }
  // Requires 1 <= k < num_blocks().
  const Eigen::MatrixXd& sub(int k) const { return sub_[k - 1]; }

  const std::vector<Eigen::MatrixXd>& diag_blocks() const { return diag_; }
  const std::vector<Eigen::MatrixXd>& sub_blocks() const { return sub_; }

 private:
  int n_ = 0;
  std::vector<Eigen::MatrixXd> diag_;
  std::vector<Eigen::MatrixXd> sub_;
};

// Forward-elimination state: d_k and s_k, plus the Cholesky factors of d_k
// used for every d_k^{-1} application.
struct ForwardFactor {
  std::vector<Eigen::MatrixXd> d;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
  BlockVector s;
};

struct BlockTriSolution {
  BlockVector e;
  ForwardFactor factor;
};

// Forward elimination followed by back substitution. O(n^3 N).
// Throws NotPositiveDefinite (with the failing block) or ShapeMismatch.
BlockTriSolution solve(const BlockTriMatrix& A, const BlockVector& r);

// Runs only the forward elimination.
ForwardFactor factorize(const BlockTriMatrix& A, const BlockVector& r);

// Back substitution from a completed forward factor.
BlockVector back_substitute(const BlockTriMatrix& A, const ForwardFactor& F);

// A x in O(n^2 N).
BlockVector multiply(const BlockTriMatrix& A, const BlockVector& x);

Eigen::MatrixXd assemble_dense(const BlockTriMatrix& A);

}  // namespace ksmooth

#endif  // KSMOOTH_BLOCKTRI_HPP_
