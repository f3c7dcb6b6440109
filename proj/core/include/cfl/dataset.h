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

#ifndef CFL_DATASET_H_
#define CFL_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfl/csv.h"
#include "cfl/matrix.h"
#include "cfl/schema.h"

namespace cfl {

// Values of one ordinary feature; `real` is filled for quantitative columns,
// `codes` (1-based) for binary and categorical ones.
struct OfColumn {
  std::vector<double> real;
  std::vector<int> codes;

  friend bool operator==(const OfColumn&, const OfColumn&) = default;
};

// n instances with ordinary features, complementary observations, optional
// hidden exact values of the complementary features, and labels.
struct Dataset {
  FeatureSchema schema;
  std::size_t n = 0;
  std::vector<OfColumn> of_values;   // aligned with schema.of_columns()
  Matrix<int> cf_observed;           // n x F^c, empty until synthesized
  std::optional<Matrix<int>> cf_truth;  // n x F^c
  std::vector<int> labels;           // 1-based label codes

  bool has_observed() const { return cf_observed.rows() == n && n > 0; }
  int cf_cardinality(std::size_t j) const {
    return schema.cf(j).cardinality();
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Reads a CSV with a header row. Columns not named in the schema are ignored;
// missing schema columns raise kMissingColumn. Qualitative columns without a
// declared vocabulary get the sorted set of observed strings. Exact values of
// complementary features land in cf_truth; cf_observed stays empty.
Dataset LoadCsv(const std::string& path, FeatureSchema schema,
                CsvOptions options = {});
Dataset ReadCsv(std::istream& in, FeatureSchema schema,
                CsvOptions options = {});

// Writes the raw table (complementary columns carry their exact values) in
// schema column order, so ReadCsv(WriteCsv(ds)) reproduces ds.
void WriteCsv(const Dataset& ds, std::ostream& out);

// Observed complementary values as category strings, one column per CF.
void WriteObservedCsv(const Dataset& ds, std::ostream& out);
void ReadObservedCsv(std::istream& in, Dataset& ds);

// Replaces each exact value with a uniformly drawn different category. The
// draw for (i, j) depends only on (seed, i, j).
Dataset SynthesizeCf(const Dataset& ds, std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of [0, n); the first floor(fraction * n) go to train.
Split SplitTrainTest(std::size_t n, double fraction, std::uint64_t seed);

// Rows `indices` of ds, in the given order.
Dataset SelectRows(const Dataset& ds, std::span<const std::size_t> indices);

// Seeded uniform subsample without replacement, original order preserved.
// Returns ds unchanged when max_n >= n.
Dataset Subsample(const Dataset& ds, std::size_t max_n, std::uint64_t seed);

// Throws kInvalidArgument / kUnknownCategory when an invariant is broken.
void ValidateDataset(const Dataset& ds);

}  // namespace cfl

#endif  // CFL_DATASET_H_
