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


#include <vector>

#include <Eigen/Core>
#include <benchmark/benchmark.h>

#include "ksmooth/blocktri.hpp"
#include "ksmooth/experiments.hpp"
#include "ksmooth/rng.hpp"
#include "ksmooth/smoother_linear.hpp"

namespace {

using ksmooth::BlockTriMatrix;
using ksmooth::BlockVector;

struct Instance {
  BlockTriMatrix A;
  BlockVector r;
};

Instance random_instance(int n, int N) {
  ksmooth::RandomStream rng({42, static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(n)});
  std::vector<Eigen::MatrixXd> diag(N), sub(N - 1);
  for (auto& s : sub) {
    s.resize(n, n);
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = 0.3 * rng.normal();
  }
  for (auto& d : diag) {
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal();
    d = a * a.transpose() + 2.0 * n * Eigen::MatrixXd::Identity(n, n);
  }
  BlockVector r(n, N);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()(i) = rng.normal();
  return {BlockTriMatrix(std::move(diag), std::move(sub)), std::move(r)};
}

// Time per solve should grow linearly in N and cubically in n.
void BM_BlockTriSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const Instance inst = random_instance(n, N);
  for (auto _ : state) {
    auto sol = ksmooth::solve(inst.A, inst.r);
    benchmark::DoNotOptimize(sol);
  }
  state.SetComplexityN(N);
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_BlockTriSolve)
    ->ArgsProduct({{3}, {1000, 2000, 4000, 8000}})
    ->Complexity(benchmark::oN);
BENCHMARK(BM_BlockTriSolve)->ArgsProduct({{1, 2, 4, 8, 16}, {1000}});

void BM_LinearSmootherSine(benchmark::State& state) {
  const auto sc = ksmooth::make_scenario(
      "sine", {{"N", static_cast<double>(state.range(0))}}, 1);
  for (auto _ : state) {
    auto sol = ksmooth::smooth(*sc.linear);
    benchmark::DoNotOptimize(sol);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LinearSmootherSine)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
