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

#ifndef KSMOOTH_SMOOTHER_LINEAR_HPP_
#define KSMOOTH_SMOOTHER_LINEAR_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/model.hpp"

namespace ksmooth {

enum class SolveStatus { kConverged, kMaxIterReached };

std::string to_string(SolveStatus status);

// Point estimate of the whole trajectory plus solver diagnostics. Fields that
// a solver does not produce stay empty.
struct SmootherSolution {
  BlockVector x;
  double objective = 0.0;
  double residual_norm = 0.0;       // optimality residual of the final iterate
  int iterations = 0;               // outer iterations (GN) or IP iterations
  SolveStatus status = SolveStatus::kConverged;
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;
  std::vector<int> inner_iterations;  // IP iterations per GN subproblem
};

// f(x) = 1/2 x^T C x - c^T x + offset.
struct NormalSystem {
  BlockTriMatrix C;
  BlockVector c;
  double offset = 0.0;

  double value(const BlockVector& x) const;
  BlockVector gradient(const BlockVector& x) const;  // C x - c
};

// Inverses of the per-step covariances, computed through Cholesky.
std::vector<Eigen::MatrixXd> spd_inverses(const std::vector<Eigen::MatrixXd>& M,
                                          const char* what);

// (G x)_0 = x_0, (G x)_k = x_k - G[k] x_{k-1}.
BlockVector apply_process(const std::vector<Eigen::MatrixXd>& G, const BlockVector& x);
BlockVector apply_process_transpose(const std::vector<Eigen::MatrixXd>& G,
                                    const BlockVector& y);

// G^T Q^{-1} G with per-step weights. Diagonal terms from measurements are
// added by the caller.
BlockTriMatrix process_normal_matrix(const std::vector<Eigen::MatrixXd>& G,
                                     const std::vector<Eigen::MatrixXd>& Qinv);

// Returns A with `extra[k]` added to each diagonal block.
BlockTriMatrix add_to_diagonal(const BlockTriMatrix& A,
                               const std::vector<Eigen::MatrixXd>& extra);

// C = H^T R^{-1} H + G^T Q^{-1} G, c = H^T R^{-1} z + G^T Q^{-1} w.
NormalSystem assemble(const LinearStateSpace& model);

SmootherSolution smooth(const LinearStateSpace& model);

struct FilterEstimates {
  BlockVector x;                              // x_{k|k}
  std::vector<Eigen::MatrixXd> information;   // P_{k|k}^{-1}
};

// Filtered estimates read off the forward elimination of the smoothing
// system: P_{k|k}^{-1} = d_k - G_{k+1}^T Q_{k+1}^{-1} G_{k+1}, a_{k|k} = s_k.
FilterEstimates filter_estimates(const LinearStateSpace& model);

// 1/2 |Hx - z|^2_{R^{-1}} + 1/2 |Gx - w|^2_{Q^{-1}}.
double objective(const LinearStateSpace& model, const BlockVector& x);

}  // namespace ksmooth

#endif  // KSMOOTH_SMOOTHER_LINEAR_HPP_
