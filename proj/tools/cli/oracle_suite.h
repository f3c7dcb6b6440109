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

#ifndef CFL_TOOLS_CLI_ORACLE_SUITE_H_
#define CFL_TOOLS_CLI_ORACLE_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cfl/oracle.h"

namespace cfl::cli {

struct SuiteResult {
  std::string name;
  int instances = 0;
  int passed = 0;
  int skipped = 0;  // instances flagged for infinite KL
  double worst = 0.0;  // largest violation statistic seen
  std::vector<std::string> counterexamples;  // JSON documents
  bool ok() const { return passed + skipped == instances && instances > 0; }
};

// Marginalized joint propagation against marginal propagation, correct step
// off, on random small graphs.
SuiteResult JointMarginalSuite(int instances, std::uint64_t seed);

// Mean KL trace of the ideal iteration. Half of the instances start from the
// joint initial confidences, half from random positive rows.
SuiteResult MonotoneKlSuite(int instances, std::uint64_t seed,
                            MixtureObjective objective, int T = 10);

// lhs <= rhs + 1e-9 over random joints and random label models.
SuiteResult BoundSuite(int instances, std::uint64_t seed);

// Same joints with the label model set to the true conditional.
SuiteResult BoundSuiteTrueModel(int instances, std::uint64_t seed);

// J_MI >= -1e-9 over random joints.
SuiteResult JmiSuite(int instances, std::uint64_t seed);

// The instance where Xhat equals X^c almost surely and p_theta = p*.
// Returns max(|lhs|, |rhs|).
double ZeroBoundInstance(std::uint64_t seed);

// Random weight graph with rows on the simplex and no self loops.
WeightGraph RandomGraph(RngStream& rng, std::size_t n, std::size_t k);

}  // namespace cfl::cli

#endif  // CFL_TOOLS_CLI_ORACLE_SUITE_H_
