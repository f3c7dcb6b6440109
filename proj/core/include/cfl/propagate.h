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

#ifndef CFL_PROPAGATE_H_
#define CFL_PROPAGATE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfl/confidence.h"
#include "cfl/dataset.h"
#include "cfl/graph.h"
#include "cfl/preprocess.h"

namespace cfl {

enum class Method { kProposed, kComp, kIpal };
std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);

// How the second propagation round is seeded.
enum class Round2Start {
  kRestart,   // fresh initial confidences
  kContinue,  // the round-1 output
};

struct Hyperparams {
  int T = 100;
  int k = 20;
  double gamma = 0.25;
  double alpha = 0.9;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct EstimationResult {
  Method method = Method::kProposed;
  Hyperparams hyper;
  std::uint64_t seed = 0;
  std::vector<ConfidenceBlock> confidences;  // one per CF
  Matrix<int> hard_estimates;                // n x F^c, 1-based codes
  std::string input_key;                     // hex content key of the inputs
};

// Uniform over the complement of the observed value.
std::vector<ConfidenceBlock> InitMarginal(const Dataset& ds);

// Q_j <- H Q_j for every block, each row renormalized afterwards.
std::vector<ConfidenceBlock> PropagateStep(
    const WeightGraph& graph, std::span<const ConfidenceBlock> blocks);

// Row-normalized Hadamard product with the initial confidences. Zeros of the
// initial block stay exactly zero. A row whose product vanishes falls back to
// its initial row.
std::vector<ConfidenceBlock> Correct(std::span<const ConfidenceBlock> blocks,
                                     std::span<const ConfidenceBlock> init);

struct ProposedOptions {
  int T = 100;
  int k = 20;
  double gamma = 0.25;
  Round2Start round2 = Round2Start::kRestart;
  bool correct = true;
  // Which CFs to estimate; empty means all. Skipped CFs keep their initial
  // confidences, take no part in the second-round encoding, and get a
  // comp-style random hard estimate.
  std::vector<bool> estimate;
  std::uint64_t seed = 0;
  std::string graph_cache_dir;
};

// Two rounds of (propagate, correct) x T: the first on a graph over the OF
// encoding, the second on a graph over the OF encoding extended with the
// gamma-weighted round-1 confidences.
EstimationResult RunProposed(const Dataset& ds, const EncodedMatrix& enc_of,
                             const ProposedOptions& options);

// Single round on the OF graph only; exposed for sweeps and diagnostics.
std::vector<ConfidenceBlock> RunSingleRound(
    const WeightGraph& graph, std::vector<ConfidenceBlock> start,
    std::span<const ConfidenceBlock> init, int T, bool correct);

// Initial confidences; hard estimate drawn uniformly from the complement.
EstimationResult RunComp(const Dataset& ds, std::uint64_t seed);

struct IpalOptions {
  int T = 100;
  int k = 20;
  double alpha = 0.9;
  std::vector<bool> estimate;  // as in ProposedOptions
  std::uint64_t seed = 0;
  std::string graph_cache_dir;
};

// Q <- alpha * H Q + (1 - alpha) * Q0 for T steps over all instances; rows
// renormalized at the end.
EstimationResult RunIpal(const Dataset& ds, const EncodedMatrix& enc_of,
                         const IpalOptions& options);

// Propagation over the training rows only; every other row takes the hard
// estimate of its nearest training row in the OF encoding, and a one-hot
// confidence at that estimate.
EstimationResult RunIpalTransfer(const Dataset& ds, const EncodedMatrix& enc_of,
                                 std::span<const std::size_t> train,
                                 const IpalOptions& options);

// Hard estimates from confidences (argmax, lowest code on ties).
Matrix<int> HardEstimates(std::span<const ConfidenceBlock> blocks);

std::string ToJson(const EstimationResult& result, bool include_confidences);
EstimationResult EstimationFromJson(std::string_view text);

}  // namespace cfl

#endif  // CFL_PROPAGATE_H_
