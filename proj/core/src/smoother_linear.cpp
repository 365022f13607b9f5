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

#include "ksmooth/smoother_linear.hpp"

#include <Eigen/Cholesky>

#include "ksmooth/errors.hpp"

namespace ksmooth {

namespace {
constexpr const char* kModule = "smoother_linear";

double weighted_sq(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& r) {
  return r.dot(llt.solve(r));
}
}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterReached:
      return "max_iter_reached";
  }
  return "unknown";
}

double NormalSystem::value(const BlockVector& x) const {
  const BlockVector Cx = multiply(C, x);
  return 0.5 * x.data().dot(Cx.data()) - c.data().dot(x.data()) + offset;
}

BlockVector NormalSystem::gradient(const BlockVector& x) const {
  BlockVector g = multiply(C, x);
  g.data() -= c.data();
  return g;
}

std::vector<Eigen::MatrixXd> spd_inverses(const std::vector<Eigen::MatrixXd>& M,
                                          const char* what) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(M.size());
  for (std::size_t k = 0; k < M.size(); ++k) {
    if (M[k].rows() == 0) {
      out.emplace_back(0, 0);
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M[k]);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite(kModule, std::string(what) + " not positive definite at step " +
                                             std::to_string(k),
                                static_cast<int>(k));
    }
    out.push_back(llt.solve(Eigen::MatrixXd::Identity(M[k].rows(), M[k].cols())));
  }
  return out;
}

BlockVector apply_process(const std::vector<Eigen::MatrixXd>& G, const BlockVector& x) {
  BlockVector y = x;
  for (int k = 1; k < x.num_blocks(); ++k) y.block(k) -= G[k] * x.block(k - 1);
  return y;
}

BlockVector apply_process_transpose(const std::vector<Eigen::MatrixXd>& G,
                                    const BlockVector& y) {
  BlockVector x = y;
  for (int k = 0; k + 1 < y.num_blocks(); ++k) {
    x.block(k) -= G[k + 1].transpose() * y.block(k + 1);
  }
  return x;
}

BlockTriMatrix process_normal_matrix(const std::vector<Eigen::MatrixXd>& G,
                                     const std::vector<Eigen::MatrixXd>& Qinv) {
  const int N = static_cast<int>(Qinv.size());
  std::vector<Eigen::MatrixXd> diag(N);
  std::vector<Eigen::MatrixXd> sub(N > 0 ? N - 1 : 0);
  for (int k = 0; k < N; ++k) {
    diag[k] = Qinv[k];
    if (k + 1 < N) diag[k] += G[k + 1].transpose() * Qinv[k + 1] * G[k + 1];
    if (k > 0) sub[k - 1] = -Qinv[k] * G[k];
  }
  return BlockTriMatrix(std::move(diag), std::move(sub));
}

BlockTriMatrix add_to_diagonal(const BlockTriMatrix& A,
                               const std::vector<Eigen::MatrixXd>& extra) {
  std::vector<Eigen::MatrixXd> diag = A.diag_blocks();
  for (std::size_t k = 0; k < diag.size(); ++k) {
    if (extra[k].size() != 0) diag[k] += extra[k];
  }
  return BlockTriMatrix(std::move(diag), A.sub_blocks());
}

NormalSystem assemble(const LinearStateSpace& model) {
  model.validate();
  const int n = model.state_dim();
  const int N = model.num_steps();
  const auto Qinv = spd_inverses(model.Q, "Q");
  const auto Rinv = spd_inverses(model.R, "R");

  std::vector<Eigen::MatrixXd> meas(N);
  BlockVector c(n, N);
  double offset = 0.0;
  for (int k = 0; k < N; ++k) {
    if (model.measurement_dim(k) == 0) {
      meas[k] = Eigen::MatrixXd::Zero(n, n);
      continue;
    }
    const Eigen::MatrixXd HtRinv = model.H[k].transpose() * Rinv[k];
    meas[k] = HtRinv * model.H[k];
    c.block(k) = HtRinv * model.z[k];
    offset += 0.5 * model.z[k].dot(Rinv[k] * model.z[k]);
  }
  BlockVector Qw(n, N);
  for (int k = 0; k < N; ++k) {
    Qw.block(k) = Qinv[k] * model.w.block(k);
    offset += 0.5 * model.w.block(k).dot(Qw.block(k));
  }
  c.data() += apply_process_transpose(model.G, Qw).data();

  NormalSystem sys{add_to_diagonal(process_normal_matrix(model.G, Qinv), meas),
                   std::move(c), offset};
  return sys;
}

SmootherSolution smooth(const LinearStateSpace& model) {
  const NormalSystem sys = assemble(model);
  SmootherSolution out;
  out.x = solve(sys.C, sys.c).e;
  out.objective = objective(model, out.x);
  out.residual_norm = sys.gradient(out.x).data().norm();
  out.iterations = 1;
  out.objective_trace = {out.objective};
  return out;
}

FilterEstimates filter_estimates(const LinearStateSpace& model) {
  const NormalSystem sys = assemble(model);
  const ForwardFactor F = factorize(sys.C, sys.c);
  const int n = model.state_dim();
  const int N = model.num_steps();
  const auto Qinv = spd_inverses(model.Q, "Q");
  FilterEstimates out;
  out.x = BlockVector(n, N);
  out.information.resize(N);
  for (int k = 0; k < N; ++k) {
    Eigen::MatrixXd info = F.d[k];
    if (k + 1 < N) info -= model.G[k + 1].transpose() * Qinv[k + 1] * model.G[k + 1];
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite(kModule, "filter information matrix not positive definite", k);
    }
    out.x.block(k) = llt.solve(F.s.block(k));
    out.information[k] = std::move(info);
  }
  return out;
}

double objective(const LinearStateSpace& model, const BlockVector& x) {
  if (x.block_size() != model.state_dim() || x.num_blocks() != model.num_steps()) {
    throw ShapeMismatch(kModule, "trajectory shape does not match model");
  }
  const BlockVector r = apply_process(model.G, x);
  double f = 0.0;
  for (int k = 0; k < model.num_steps(); ++k) {
    f += 0.5 * weighted_sq(Eigen::LLT<Eigen::MatrixXd>(model.Q[k]),
                           r.block(k) - model.w.block(k));
    if (model.measurement_dim(k) > 0) {
      f += 0.5 * weighted_sq(Eigen::LLT<Eigen::MatrixXd>(model.R[k]),
                             model.H[k] * x.block(k) - model.z[k]);
    }
  }
  return f;
}

}  // namespace ksmooth
