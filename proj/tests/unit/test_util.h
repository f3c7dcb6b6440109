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

#ifndef CFL_TESTS_UNIT_TEST_UTIL_H_
#define CFL_TESTS_UNIT_TEST_UTIL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cfl/dataset.h"
#include "cfl/preprocess.h"
#include "cfl/rng.h"
#include "cfl/schema.h"

namespace cfl::testing {

inline std::string DataPath(const std::string& name) {
  return std::string(CFL_TEST_DATA_DIR) + "/" + name;
}

inline ColumnSpec Column(std::string name, FeatureKind kind, FeatureRole role,
                         std::vector<std::string> vocabulary = {}) {
  ColumnSpec c;
  c.name = std::move(name);
  c.kind = kind;
  c.role = role;
  c.vocabulary = std::move(vocabulary);
  return c;
}

inline std::vector<std::string> Vocabulary(int u) {
  std::vector<std::string> v;
  for (int c = 1; c <= u; ++c) v.push_back("v" + std::to_string(c));
  return v;
}

// Random dataset with `num_of` uniform quantitative OFs, CFs of the given
// cardinalities with uniform truth and a binary label. Observed values are
// synthesized with `seed`.
inline Dataset RandomDataset(std::size_t n, std::vector<int> cards,
                             std::size_t num_of, std::uint64_t seed) {
  std::vector<ColumnSpec> cols;
  for (std::size_t t = 0; t < num_of; ++t) {
    cols.push_back(Column("x" + std::to_string(t), FeatureKind::kQuantitative,
                          FeatureRole::kOrdinary));
  }
  for (std::size_t j = 0; j < cards.size(); ++j) {
    cols.push_back(Column("c" + std::to_string(j), FeatureKind::kCategorical,
                          FeatureRole::kComplementary, Vocabulary(cards[j])));
  }
  cols.push_back(
      Column("y", FeatureKind::kBinary, FeatureRole::kLabel, {"no", "yes"}));
  Dataset ds;
  ds.schema = FeatureSchema(std::move(cols));
  ds.n = n;
  RngStream rng(seed, 77);
  ds.of_values.assign(num_of, OfColumn{});
  for (std::size_t t = 0; t < num_of; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      ds.of_values[t].real.push_back(rng.Uniform());
    }
  }
  Matrix<int> truth(n, cards.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cards.size(); ++j) {
      truth(i, j) = 1 + static_cast<int>(rng.Below(cards[j]));
    }
    ds.labels.push_back(1 + static_cast<int>(rng.Below(2)));
  }
  ds.cf_truth = truth;
  return SynthesizeCf(ds, seed);
}

inline EncodedMatrix FromRows(const std::vector<std::vector<double>>& rows) {
  EncodedMatrix enc;
  enc.values = Matrix<double>(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < rows[i].size(); ++t) enc.values(i, t) = rows[i][t];
  }
  enc.blocks.push_back({"x", CoordinateBlock::Source::kOrdinary, 0, enc.dim()});
  return enc;
}

inline EncodedMatrix RandomPoints(std::size_t n, std::size_t d,
                                  std::uint64_t seed) {
  RngStream rng(seed, 5);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (double& v : r) v = rng.Uniform();
  }
  return FromRows(rows);
}

}  // namespace cfl::testing

#endif  // CFL_TESTS_UNIT_TEST_UTIL_H_
