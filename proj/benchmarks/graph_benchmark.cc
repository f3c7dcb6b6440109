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

#include "cfl/graph.h"
#include "cfl/preprocess.h"
#include "cfl/rng.h"

namespace cfl {
namespace {

EncodedMatrix Points(std::size_t n, std::size_t d) {
  EncodedMatrix enc;
  enc.values = Matrix<double>(n, d);
  RngStream rng(n, d);
  for (double& v : enc.values.data()) v = rng.Uniform();
  enc.blocks.push_back({"x", CoordinateBlock::Source::kOrdinary, 0, d});
  return enc;
}

void BM_KnnSearch(benchmark::State& state) {
  const EncodedMatrix enc = Points(state.range(0), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(KnnSearch(enc, 20));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnSearch)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_SolveWeights(benchmark::State& state) {
  const EncodedMatrix enc = Points(2000, 16);
  const NeighborLists nbrs = KnnSearch(enc, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveWeights(enc, nbrs));
  }
}
BENCHMARK(BM_SolveWeights)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace cfl
