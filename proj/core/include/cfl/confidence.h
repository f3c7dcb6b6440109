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

#ifndef CFL_CONFIDENCE_H_
#define CFL_CONFIDENCE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cfl/matrix.h"

namespace cfl {

// Marginal confidence of one complementary feature: row i is a distribution
// over its u_j categories (column c <-> code c + 1).
struct ConfidenceBlock {
  std::size_t cf_index = 0;
  Matrix<double> values;

  std::size_t rows() const { return values.rows(); }
  int cardinality() const { return static_cast<int>(values.cols()); }

  friend bool operator==(const ConfidenceBlock&, const ConfidenceBlock&) =
      default;
};

// max_i |sum_c values(i, c) - 1|
double MaxRowSumError(const ConfidenceBlock& block);

// Divides each row by its sum.
void NormalizeRows(ConfidenceBlock& block);

// Row-wise argmax as 1-based codes; ties go to the lowest code.
std::vector<int> ArgmaxCodes(const ConfidenceBlock& block);

}  // namespace cfl

#endif  // CFL_CONFIDENCE_H_
