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

#ifndef CFL_PREPROCESS_H_
#define CFL_PREPROCESS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfl/confidence.h"
#include "cfl/dataset.h"
#include "cfl/matrix.h"

namespace cfl {

struct CoordinateBlock {
  enum class Source { kOrdinary, kConfidence };
  std::string name;
  Source source = Source::kOrdinary;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  friend bool operator==(const CoordinateBlock&, const CoordinateBlock&) =
      default;
};

// Distance-space representation of the instances.
struct EncodedMatrix {
  Matrix<double> values;  // n x d
  std::vector<CoordinateBlock> blocks;

  std::size_t rows() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }
  std::span<const double> row(std::size_t i) const { return values.row(i); }
  // Content key over shape and bit patterns of the values.
  std::uint64_t ContentKey() const;

  friend bool operator==(const EncodedMatrix&, const EncodedMatrix&) = default;
};

// Ordinary features only: quantitative columns min-max scaled over all rows
// (a constant column becomes 0), binary columns to {0, 1}, categorical
// columns one-hot scaled by 1/sqrt(|X_j|).
EncodedMatrix EncodeOf(const Dataset& ds);

// Appends one block per confidence matrix, scaled by sqrt(gamma)/sqrt(u_j),
// so gamma = 1 with one-hot rows matches the categorical OF encoding.
EncodedMatrix EncodeWithConfidence(const EncodedMatrix& base,
                                   std::span<const ConfidenceBlock> conf,
                                   double gamma);

double SquaredDistance(std::span<const double> a, std::span<const double> b);

}  // namespace cfl

#endif  // CFL_PREPROCESS_H_
