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


// Runs every acceptance check at its stated scale and prints one line per
// criterion. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/constrained.hpp"
#include "ksmooth/errors.hpp"
#include "ksmooth/experiments.hpp"
#include "ksmooth/model.hpp"
#include "ksmooth/plq.hpp"
#include "ksmooth/robust_l1.hpp"
#include "ksmooth/smoother_linear.hpp"
#include "ksmooth/smoother_nonlinear.hpp"
#include "ksmooth/sparse.hpp"
#include "oracles.hpp"

namespace {

using namespace ksmooth;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome rts_equivalence() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int N = 1 + static_cast<int>(rng() % 15);
    const LinearStateSpace m = oracle::random_linear_model(rng, n, N, 3);
    const oracle::KalmanRTS ref = oracle::kalman_rts(m);
    const SmootherSolution s = smooth(m);
    const FilterEstimates f = filter_estimates(m);
    for (int k = 0; k < N; ++k) {
      worst = std::max(worst, oracle::max_abs(s.x.block(k) - ref.smoothed[k]));
      worst = std::max(worst, oracle::max_abs(f.x.block(k) - ref.filtered[k]));
    }
  }
  return {worst <= 1e-8, "max abs error " + fmt("%.2e", worst) + " over 50 models"};
}

Outcome dense_equivalence() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int N = 1 + static_cast<int>(rng() % 30);
    const BlockTriMatrix A = oracle::random_blocktri(rng, n, N);
    const BlockVector r = oracle::random_block_vector(rng, n, N);
    const BlockVector x = solve(A, r).e;
    const MatrixXd D = assemble_dense(A);
    const VectorXd xd = D.llt().solve(r.data());
    worst = std::max(worst, (D * x.data() - r.data()).norm() / r.data().norm());
    worst = std::max(worst, (x.data() - xd).norm() / (1.0 + xd.norm()));
  }
  return {worst <= 1e-10, "max relative residual " + fmt("%.2e", worst) + " over 100 systems"};
}

double time_solve(int n, int N, std::mt19937_64& rng) {
  const BlockTriMatrix A = oracle::random_blocktri(rng, n, N);
  const BlockVector r = oracle::random_block_vector(rng, n, N);
  double best = 1e300;
  for (int rep = 0; rep < 25; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const BlockTriSolution s = solve(A, r);
    const auto t1 = std::chrono::steady_clock::now();
    if (s.e.size() == 0) std::abort();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

Outcome linear_scaling() {
  std::mt19937_64 rng(303);
  time_solve(3, 1000, rng);  // warm-up
  const double t1 = time_solve(3, 1000, rng);
  const double t4 = time_solve(3, 4000, rng);
  const double ratio = t4 / t1;
  return {ratio >= 3.0 && ratio <= 6.0,
          "t(4000)/t(1000) = " + fmt("%.2f", ratio) + " (" + fmt("%.3g", t1 * 1e3) + " ms, " +
              fmt("%.3g", t4 * 1e3) + " ms)"};
}

// Position and velocity from a smooth-signal fit to the first-component data.
BlockVector seeded_start(const NonlinearStateSpace& m, int N) {
  SmoothSignalParams p;
  p.N = N;
  p.dt = vanderpol_simple_params().dt;
  p.sigma2 = 10.0;
  p.R = m.R[0](0, 0);
  const SmootherSolution s = smooth(with_measurements(smooth_signal_model(p), m.z));
  BlockVector x(2, N);
  for (int k = 0; k < N; ++k) x.block(k) = Eigen::Vector2d(s.x.block(k)(1), s.x.block(k)(0));
  return x;
}

Outcome vanderpol_gn() {
  const NonlinearStateSpace base = vanderpol_model(vanderpol_simple_params());
  SimulationOptions sim_opts;
  sim_opts.truth_Q.assign(base.N, 0.01 * MatrixXd::Identity(2, 2));
  int good_mse = 0, converged = 0, monotone = 0, dirder = 0, good_seeded = 0;
  std::vector<double> mses;
  for (int seed = 1; seed <= 100; ++seed) {
    const Simulation sim = simulate(base, static_cast<std::uint64_t>(seed), sim_opts);
    const NonlinearStateSpace m = with_measurements(base, sim.z);
    struct Rec {
      BlockVector x;
      GNDirection dir;
    };
    std::vector<Rec> rec;
    auto f = [&m](const BlockVector& y) { return nlls_objective(m, y); };
    auto dirf = [&](const BlockVector& y) {
      GNDirection d = gn_direction(m, y);
      rec.push_back({y, d});
      return d;
    };
    auto [sol, trace] = gauss_newton(f, dirf, default_initial_trajectory(m), GNOptions{});
    converged += sol.status == SolveStatus::kConverged;
    bool mono = true;
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i) {
      mono = mono && sol.objective_trace[i] <= sol.objective_trace[i - 1];
    }
    monotone += mono;
    bool dd = true;
    for (const Rec& r : rec) {
      const double h = 1e-6;
      BlockVector xp = r.x, xm = r.x;
      xp.data() += h * r.dir.d.data();
      xm.data() -= h * r.dir.d.data();
      const double fd = (f(xp) - f(xm)) / (2.0 * h);
      const double tol = 1e-4 * (1.0 + std::abs(fd));
      dd = dd && fd <= r.dir.model_decrease + tol && r.dir.model_decrease <= tol;
    }
    dirder += dd;
    const double e = mse(sol.x, sim.truth);
    mses.push_back(e);
    good_mse += e < 1.0;
    good_seeded += mse(smooth_nonlinear(m, seeded_start(m, base.N)).first.x, sim.truth) < 1.0;
  }
  std::ostringstream os;
  os << "converged " << converged << "/100, monotone " << monotone << "/100, derivative check "
     << dirder << "/100, MSE < 1 on " << good_mse << "/100 (median "
     << fmt("%.3g", percentile(mses, 0.5)) << "); from a linear-smoother start MSE < 1 on "
     << good_seeded << "/100";
  return {converged == 100 && monotone == 100 && dirder == 100 && good_mse >= 90, os.str()};
}

Outcome ship_and_qp() {
  // Scenario start plus the truth pushed across the shoreline by two offsets.
  double worst_viol = 0.0, min_start = 1e300;
  int worst_inner = 0, runs = 0, converged = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario sc = make_scenario("ship", {}, seed);
    std::vector<BlockVector> starts = {*sc.x_init};
    for (double shift : {0.5, 2.0}) {
      BlockVector x = sc.truth;
      for (int k = 0; k < sc.model.N; ++k) x.block(k)(3) -= shift;
      starts.push_back(x);
    }
    for (const BlockVector& x0 : starts) {
      min_start = std::min(min_start, max_violation(*sc.constraints, x0));
      const SmootherSolution sol = smooth_constrained_nonlinear(sc.model, *sc.constraints, x0);
      ++runs;
      converged += sol.status == SolveStatus::kConverged;
      worst_viol = std::max(worst_viol, max_violation(*sc.constraints, sol.x));
      for (int it : sol.inner_iterations) worst_inner = std::max(worst_inner, it);
    }
  }

  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2, N = 3;
    const LinearStateSpace lm = oracle::random_linear_model(rng, n, N, 2, false);
    const NormalSystem sys = assemble(lm);
    AffineConstraints ac;
    for (int k = 0; k < N; ++k) {
      ac.B.push_back(oracle::random_matrix(rng, 2, n));
      ac.b.push_back(oracle::random_vector(rng, 2, 0.3).cwiseAbs());
    }
    const ConstrainedSolution ip = solve_qp_constrained(sys, ac);
    MatrixXd Bd = MatrixXd::Zero(2 * N, n * N);
    for (int k = 0; k < N; ++k) Bd.block(2 * k, n * k, 2, n) = ac.B[k];
    const oracle::QPResult ref =
        oracle::enumerate_qp(assemble_dense(sys.C), -sys.c.data(), Bd, stacked_bounds(ac));
    worst = std::max(worst, oracle::max_abs(ip.solution.x.data() - ref.x));
  }
  std::ostringstream os;
  os << "ship: " << converged << "/" << runs << " runs converged from starts with violation >= "
     << fmt("%.2f", min_start) << ", final violation <= " << fmt("%.1e", worst_viol)
     << ", max inner iterations " << worst_inner << "; affine QP vs dense oracle "
     << fmt("%.1e", worst);
  return {converged == runs && worst_viol <= 1e-6 && worst_inner <= 40 && min_start > 0.0 &&
              worst <= 1e-5,
          os.str()};
}

Outcome linear_table() {
  RobustLinearTableSpec spec;
  spec.threads = threads();
  const MSEReport r = run_robust_linear_table(spec);
  bool ok = true;
  std::ostringstream os;
  for (double phi : {4.0, 10.0, 100.0}) {
    const CellReport& c = r.cell(0.1, phi);
    const double ils = c.method("ILS").median, igs = c.method("IGS").median,
                 gkf = c.method("GKF").median;
    ok = ok && ils < igs && igs < gkf;
    os << "phi=" << phi << " ILS " << fmt("%.3f", ils) << " IGS " << fmt("%.3f", igs) << " GKF "
       << fmt("%.3f", gkf) << "; ";
  }
  const CellReport& c = r.cell(0.1, 100.0);
  ok = ok && c.method("ILS").median <= 0.15 && c.method("IGS").median >= 0.5;
  return {ok, os.str()};
}

Outcome vdp_table() {
  RobustVdpTableSpec spec;
  spec.threads = threads();
  spec.cells = {{0.1, 1000.0}, {0.2, 1000.0}, {0.3, 1000.0}};
  const MSEReport r = run_robust_vdp_table(spec);
  bool ok = true;
  std::ostringstream os;
  for (const CellReport& c : r.cells) {
    const double ils = c.method("ILS").median, igs = c.method("IGS").median;
    ok = ok && ils <= 0.15 && igs >= 0.12 && ils <= igs;
    os << "p=" << c.p << " ILS " << fmt("%.3f", ils) << " IGS " << fmt("%.3f", igs) << "; ";
  }
  return {ok, os.str()};
}

Outcome plq_catalog() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> nd(0.0, 2.0);
  const std::vector<PLQPenalty> cat = {plq_l2(), plq_l1(), plq_huber(1.0), plq_vapnik(0.5)};
  double eval_err = 0.0;
  for (const PLQPenalty& rho : cat) {
    for (int i = 0; i < 100; ++i) {
      const VectorXd y = VectorXd::Constant(1, nd(rng));
      const oracle::QPResult q =
          oracle::enumerate_qp(rho.M, -(rho.b + rho.B * y), rho.A.transpose(), rho.a);
      eval_err = std::max(eval_err, std::abs(eval_plq(rho, y) + q.value));
    }
  }
  double l2_err = 0.0, l1_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const LinearStateSpace m = oracle::random_linear_model(rng, 2, 10, 2);
    l2_err = std::max(l2_err, oracle::max_abs(smooth_plq(m, plq_l2(), plq_l2()).x.data() -
                                              smooth(m).x.data()));
    l1_err = std::max(l1_err,
                      oracle::max_abs(smooth_plq(m, plq_l2(), plq_l1(std::numbers::sqrt2)).x.data() -
                                      smooth_l1_laplace(m).x.data()));
  }
  std::ostringstream os;
  os << "closed form vs sup " << fmt("%.1e", eval_err) << ", L2/L2 vs linear "
     << fmt("%.1e", l2_err) << ", L2/L1 vs l1 smoother " << fmt("%.1e", l1_err);
  return {eval_err <= 1e-8 && l2_err <= 1e-8 && l1_err <= 1e-6, os.str()};
}

Outcome vapnik_recovery() {
  const VapnikCVResult r = run_vapnik_cv(vapnik_desk_spec());
  const double frac = double(r.support_vectors) / double(r.train_idx.size());
  std::ostringstream os;
  os << "lambda2 " << fmt("%.3g", r.best_lambda2) << ", eps " << fmt("%.3g", r.best_eps)
     << ", support vectors " << r.support_vectors << "/" << r.train_idx.size()
     << ", validation MSE Vapnik " << fmt("%.4f", r.vapnik_val_mse) << " vs Gaussian "
     << fmt("%.4f", r.gaussian_val_mse);
  // Context: how often the full check holds across other seeds.
  int held = 0;
  for (std::uint64_t seed = 2; seed <= 11; ++seed) {
    VapnikCVSpec s = vapnik_desk_spec();
    s.seed = seed;
    const VapnikCVResult q = run_vapnik_cv(s);
    held += q.best_eps > 0.0 && 2 * q.support_vectors < int(q.train_idx.size()) &&
            q.vapnik_val_mse < q.gaussian_val_mse;
  }
  os << "; seeds 2-11 satisfy all three on " << held << "/10";
  return {r.best_eps > 0.0 && frac < 0.5 && r.vapnik_val_mse < r.gaussian_val_mse, os.str()};
}

Outcome sparse_smoothers() {
  std::mt19937_64 rng(1010);
  double st_err = 0.0;
  for (int t = 0; t < 10; ++t) {
    const VectorXd c = oracle::random_vector(rng, 12, 2.0);
    NormalSystem sys{BlockTriMatrix(std::vector<MatrixXd>(6, MatrixXd::Identity(2, 2)),
                                    std::vector<MatrixXd>(5, MatrixXd::Zero(2, 2))),
                     BlockVector(2, 6, c), 0.0};
    SparsePenaltySpec spec;
    spec.w = oracle::random_vector(rng, 12).cwiseAbs();
    spec.lambda = 0.7;
    st_err = std::max(st_err, oracle::max_abs(sparse_smooth_penalized(sys, spec).x.data() -
                                              soft_threshold(c, spec.w, spec.lambda)));
  }
  double obj_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    NormalSystem sys{oracle::random_blocktri(rng, 2, 15), oracle::random_block_vector(rng, 2, 15),
                     0.0};
    SparsePenaltySpec spec;
    spec.w = VectorXd::Ones(30);
    spec.lambda = 0.05 + 0.05 * t;
    const SmootherSolution pen = sparse_smooth_penalized(sys, spec);
    spec.tau = spec.w.cwiseProduct(pen.x.data()).lpNorm<1>();
    LassoOptions lo;
    lo.tol = 1e-9;
    const SmootherSolution las = sparse_smooth_lasso(sys, spec, lo);
    obj_err = std::max(obj_err, std::abs(sys.value(las.x) - sys.value(pen.x)) /
                                    (1.0 + std::abs(sys.value(pen.x))));
  }
  double proj_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const VectorXd v = oracle::random_vector(rng, 15, 3.0);
    const VectorXd w = oracle::random_vector(rng, 15).cwiseAbs();
    const double tau = 0.1 + 0.05 * t;
    proj_err = std::max(proj_err, oracle::max_abs(project_weighted_l1(v, w, tau) -
                                                  oracle::bisection_projection(v, w, tau)));
  }
  std::ostringstream os;
  os << "soft threshold " << fmt("%.1e", st_err) << ", penalized vs LASSO objective "
     << fmt("%.1e", obj_err) << ", projection " << fmt("%.1e", proj_err);
  return {st_err <= 1e-8 && obj_err <= 1e-5 && proj_err <= 1e-8, os.str()};
}

// The four implemented conventions, checked directly.
Outcome conventions() {
  std::vector<std::string> failed;
  const double dt = 0.3;
  const Eigen::Matrix4d G = ship_transition(dt);
  Eigen::Matrix4d Gref = Eigen::Matrix4d::Zero();
  Gref.topLeftCorner<2, 2>() = smooth_signal_transition(dt);
  Gref.bottomRightCorner<2, 2>() = smooth_signal_transition(dt);
  if (G != Gref || G(3, 3) != 1.0) failed.push_back("ship transition");

  const AffineConstraints box = smooth_signal_bounds({-1.0, -2.0}, {1.0, 3.0});
  Eigen::Matrix2d Bref;
  Bref << 0.0, 1.0, 0.0, -1.0;
  if (box.B[1] != MatrixXd(Bref) || box.b[1] != Eigen::Vector2d(3.0, 2.0)) {
    failed.push_back("box rows");
  }

  std::mt19937_64 rng(1111);
  const LinearStateSpace m = oracle::random_linear_model(rng, 2, 6, 2);
  const L1QP qp = build_l1_qp(m);
  BlockVector qinv_w(2, 6);
  for (int k = 0; k < 6; ++k) qinv_w.block(k) = m.Q[k].llt().solve(m.w.block(k));
  const BlockVector cref = apply_process_transpose(m.G, qinv_w);
  if (oracle::max_abs(qp.c.data() + cref.data()) > 1e-10) failed.push_back("robust linear term");

  SparseIPState st;
  st.s = oracle::random_vector(rng, 8).cwiseAbs().array() + 0.1;
  st.r = oracle::random_vector(rng, 8).cwiseAbs().array() + 0.1;
  st.q = oracle::random_vector(rng, 8).cwiseAbs().array() + 0.1;
  st.p = oracle::random_vector(rng, 8).cwiseAbs().array() + 0.1;
  const VectorXd w = VectorXd::Ones(8);
  const VectorXd d = sparse_reduced_diagonal(st, w);
  for (int i = 0; i < 8; ++i) {
    const double qs = st.q(i) / st.s(i), pr = st.p(i) / st.r(i);
    if (std::abs(d(i) - 4.0 * qs * pr / (qs + pr)) > 1e-10 * (1.0 + d(i))) {
      failed.push_back("sparse reduced diagonal");
      break;
    }
  }
  std::string detail = "ship transition, box rows, robust linear term, sparse reduced diagonal";
  if (!failed.empty()) {
    detail = "mismatch:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace

// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> checks = {
      {1, rts_equivalence},  {2, dense_equivalence}, {3, linear_scaling}, {4, vanderpol_gn},
      {5, ship_and_qp},      {6, linear_table},      {7, vdp_table},      {8, plq_catalog},
      {9, vapnik_recovery},  {10, sparse_smoothers}, {11, conventions}};
  int failures = 0, ran = 0;
  for (const auto& [id, check] : checks) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ++ran;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
