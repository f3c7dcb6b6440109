// Copyright 2026 The CFL Authors.
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

#include <benchmark/benchmark.h>

#include <vector>

#include "cfl/confidence.h"
#include "cfl/propagate.h"
#include "cfl/rng.h"

namespace cfl {
namespace {

WeightGraph Ring(std::size_t n, std::size_t k) {
  WeightGraph g{n, k, Matrix<std::uint32_t>(n, k), Matrix<double>(n, k, 1.0 / k)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < k; ++m) g.neighbors(i, m) = (i + m + 1) % n;
  }
  return g;
}

std::vector<ConfidenceBlock> Blocks(std::size_t n, const std::vector<int>& cards) {
  std::vector<ConfidenceBlock> blocks;
  RngStream rng(7);
  for (std::size_t j = 0; j < cards.size(); ++j) {
    ConfidenceBlock b{j, Matrix<double>(n, cards[j])};
    for (double& v : b.values.data()) v = rng.Uniform();
    NormalizeRows(b);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void BM_PropagateStep(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const WeightGraph g = Ring(n, 20);
  const std::vector<ConfidenceBlock> q = Blocks(n, {12, 3, 4, 3, 4});
  for (auto _ : state) {
    benchmark::DoNotOptimize(PropagateStep(g, q));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PropagateStep)->Arg(4000)->Arg(45211)->Unit(benchmark::kMillisecond);

void BM_Correct(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const std::vector<ConfidenceBlock> q = Blocks(n, {12, 3, 4, 3, 4});
  const std::vector<ConfidenceBlock> init = Blocks(n, {12, 3, 4, 3, 4});
  for (auto _ : state) {
    benchmark::DoNotOptimize(Correct(q, init));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Correct)->Arg(45211)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace cfl
