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

#include "cfl/confidence.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfl {

double MaxRowSumError(const ConfidenceBlock& block) {
  double worst = 0.0;
  for (std::size_t i = 0; i < block.rows(); ++i) {
    const auto row = block.values.row(i);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

void NormalizeRows(ConfidenceBlock& block) {
  for (std::size_t i = 0; i < block.rows(); ++i) {
    auto row = block.values.row(i);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum <= 0.0) continue;
    for (double& v : row) v /= sum;
  }
}

std::vector<int> ArgmaxCodes(const ConfidenceBlock& block) {
  std::vector<int> codes(block.rows());
  for (std::size_t i = 0; i < block.rows(); ++i) {
    const auto row = block.values.row(i);
    codes[i] = static_cast<int>(std::max_element(row.begin(), row.end()) -
                                row.begin()) + 1;
  }
  return codes;
}

}  // namespace cfl
