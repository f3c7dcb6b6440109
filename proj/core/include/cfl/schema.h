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

#ifndef CFL_SCHEMA_H_
#define CFL_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfl {

enum class FeatureKind { kQuantitative, kBinary, kCategorical };
enum class FeatureRole { kOrdinary, kComplementary, kLabel };

std::string_view KindName(FeatureKind kind);
std::string_view RoleName(FeatureRole role);

struct ColumnSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kQuantitative;
  FeatureRole role = FeatureRole::kOrdinary;
  // Category strings in code order (code c <-> vocabulary[c - 1]). Empty for
  // quantitative columns, and for qualitative columns whose vocabulary is to
  // be inferred from data.
  std::vector<std::string> vocabulary;

  int cardinality() const { return static_cast<int>(vocabulary.size()); }
  // 1-based code of `value`, or 0 when it is not in the vocabulary.
  int CodeOf(std::string_view value) const;
  const std::string& Category(int code) const { return vocabulary.at(code - 1); }

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

// Ordered column declarations: kind, role and category vocabulary.
//
// Text form, one `key = value` pair per line, `#` starts a comment:
//
//   age.kind = quantitative
//   age.role = of
//   job.kind = categorical
//   job.role = cf
//   job.vocabulary = admin.|blue-collar|entrepreneur
//   y.kind = binary
//   y.role = label
//
// The column name is everything before the last '.', so names may themselves
// contain dots. Columns are ordered by first appearance. Vocabulary entries
// are separated by '|'; when omitted they are inferred from the data.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<ColumnSpec> columns);

  static FeatureSchema Parse(std::string_view text);
  static FeatureSchema LoadFile(const std::string& path);
  std::string ToText() const;

  // Checks every invariant, including vocabulary sizes; requires all
  // qualitative vocabularies to be known.
  void Validate() const;
  bool VocabulariesComplete() const;

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec& column(std::size_t i) const { return columns_.at(i); }
  void SetVocabulary(std::size_t column, std::vector<std::string> vocabulary);

  std::optional<std::size_t> Find(std::string_view name) const;

  std::size_t label_column() const { return label_; }
  const std::vector<std::size_t>& of_columns() const { return of_; }
  const std::vector<std::size_t>& cf_columns() const { return cf_; }
  std::size_t num_of() const { return of_.size(); }
  std::size_t num_cf() const { return cf_.size(); }
  const ColumnSpec& cf(std::size_t j) const { return columns_[cf_.at(j)]; }
  const ColumnSpec& of(std::size_t j) const { return columns_[of_.at(j)]; }
  const ColumnSpec& label() const { return columns_[label_]; }

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.columns_ == b.columns_;
  }

 private:
  void Index();

  std::vector<ColumnSpec> columns_;
  std::size_t label_ = 0;
  std::vector<std::size_t> of_;
  std::vector<std::size_t> cf_;
};

}  // namespace cfl

#endif  // CFL_SCHEMA_H_
