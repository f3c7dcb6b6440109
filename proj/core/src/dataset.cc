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

#include "cfl/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cfl/error.h"
#include "cfl/rng.h"

namespace cfl {
namespace {

constexpr std::uint64_t kSynthesisStream = 0x43464f4253ULL;
constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;
constexpr std::uint64_t kSubsampleStream = 0x5355425350ULL;

double ParseReal(const std::string& cell, std::size_t line,
                 const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line) + ", column '" + column +
                    "': not a finite number: '" + cell + "'");
  }
  return value;
}

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int CodeOrThrow(const ColumnSpec& col, const std::string& cell,
                std::size_t line) {
  const int code = col.CodeOf(cell);
  if (code == 0) {
    throw Error(ErrorCode::kUnknownCategory,
                "line " + std::to_string(line) + ", column '" + col.name +
                    "': '" + cell + "' is not in the vocabulary");
  }
  return code;
}

std::vector<std::size_t> MapHeader(const std::vector<std::string>& header,
                                   const FeatureSchema& schema,
                                   bool cf_only) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);
  std::vector<std::size_t> out;
  for (const ColumnSpec& col : schema.columns()) {
    if (cf_only && col.role != FeatureRole::kComplementary) continue;
    const auto it = position.find(col.name);
    if (it == position.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "column '" + col.name + "' is not in the CSV header");
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

Dataset ReadCsv(std::istream& in, FeatureSchema schema, CsvOptions options) {
  CsvReader reader(in, options);
  std::vector<std::string> header;
  if (!reader.Next(header)) {
    throw Error(ErrorCode::kParseError, "CSV has no header row");
  }
  const std::vector<std::size_t> source = MapHeader(header, schema, false);
  const auto& columns = schema.columns();

  std::vector<std::vector<std::string>> cells(columns.size());
  std::vector<std::size_t> lines;
  std::vector<std::string> record;
  while (reader.Next(record)) {
    if (record.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(reader.line()) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(record.size()));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      cells[c].push_back(std::move(record[source[c]]));
    }
    lines.push_back(reader.line());
  }

  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].kind == FeatureKind::kQuantitative ||
        !columns[c].vocabulary.empty()) {
      continue;
    }
    std::set<std::string> distinct(cells[c].begin(), cells[c].end());
    schema.SetVocabulary(c, {distinct.begin(), distinct.end()});
  }

  Dataset ds;
  ds.n = lines.size();
  if (ds.n > 0) {
    // Vocabularies inferred above come from the data.
    try {
      schema.Validate();
    } catch (const Error& e) {
      const std::string message = e.what();
      throw Error(ErrorCode::kParseError, message.substr(message.find(": ") + 2));
    }
  }
  ds.schema = std::move(schema);
  const FeatureSchema& s = ds.schema;

  for (std::size_t c : s.of_columns()) {
    const ColumnSpec& col = s.column(c);
    OfColumn out;
    for (std::size_t i = 0; i < ds.n; ++i) {
      if (col.kind == FeatureKind::kQuantitative) {
        out.real.push_back(ParseReal(cells[c][i], lines[i], col.name));
      } else {
        out.codes.push_back(CodeOrThrow(col, cells[c][i], lines[i]));
      }
    }
    ds.of_values.push_back(std::move(out));
  }
  Matrix<int> truth(ds.n, s.num_cf());
  for (std::size_t j = 0; j < s.num_cf(); ++j) {
    const std::size_t c = s.cf_columns()[j];
    for (std::size_t i = 0; i < ds.n; ++i) {
      truth(i, j) = CodeOrThrow(s.column(c), cells[c][i], lines[i]);
    }
  }
  ds.cf_truth = std::move(truth);
  const std::size_t lc = s.label_column();
  for (std::size_t i = 0; i < ds.n; ++i) {
    ds.labels.push_back(CodeOrThrow(s.column(lc), cells[lc][i], lines[i]));
  }
  return ds;
}

Dataset LoadCsv(const std::string& path, FeatureSchema schema,
                CsvOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadCsv(in, std::move(schema), options);
}

void WriteCsv(const Dataset& ds, std::ostream& out) {
  const FeatureSchema& s = ds.schema;
  if (s.num_cf() > 0 && !ds.cf_truth) {
    throw Error(ErrorCode::kMissingTruth, "dataset has no CF ground truth");
  }
  std::vector<std::string> fields;
  for (const ColumnSpec& col : s.columns()) fields.push_back(col.name);
  WriteCsvRecord(out, fields);

  std::vector<std::size_t> of_pos(s.columns().size());
  std::vector<std::size_t> cf_pos(s.columns().size());
  for (std::size_t j = 0; j < s.num_of(); ++j) of_pos[s.of_columns()[j]] = j;
  for (std::size_t j = 0; j < s.num_cf(); ++j) cf_pos[s.cf_columns()[j]] = j;

  for (std::size_t i = 0; i < ds.n; ++i) {
    fields.clear();
    for (std::size_t c = 0; c < s.columns().size(); ++c) {
      const ColumnSpec& col = s.column(c);
      switch (col.role) {
        case FeatureRole::kOrdinary: {
          const OfColumn& v = ds.of_values[of_pos[c]];
          fields.push_back(col.kind == FeatureKind::kQuantitative
                               ? FormatReal(v.real[i])
                               : col.Category(v.codes[i]));
          break;
        }
        case FeatureRole::kComplementary:
          fields.push_back(col.Category((*ds.cf_truth)(i, cf_pos[c])));
          break;
        case FeatureRole::kLabel:
          fields.push_back(col.Category(ds.labels[i]));
          break;
      }
    }
    WriteCsvRecord(out, fields);
  }
}

void WriteObservedCsv(const Dataset& ds, std::ostream& out) {
  const FeatureSchema& s = ds.schema;
  std::vector<std::string> fields;
  for (std::size_t j = 0; j < s.num_cf(); ++j) fields.push_back(s.cf(j).name);
  WriteCsvRecord(out, fields);
  for (std::size_t i = 0; i < ds.cf_observed.rows(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j < s.num_cf(); ++j) {
      fields.push_back(s.cf(j).Category(ds.cf_observed(i, j)));
    }
    WriteCsvRecord(out, fields);
  }
}

void ReadObservedCsv(std::istream& in, Dataset& ds) {
  const FeatureSchema& s = ds.schema;
  CsvReader reader(in, CsvOptions{','});
  std::vector<std::string> header;
  if (!reader.Next(header)) {
    throw Error(ErrorCode::kParseError, "observed CSV has no header row");
  }
  const std::vector<std::size_t> source = MapHeader(header, s, true);
  Matrix<int> observed(ds.n, s.num_cf());
  std::vector<std::string> record;
  std::size_t i = 0;
  while (reader.Next(record)) {
    if (i >= ds.n || record.size() != header.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "observed CSV line " + std::to_string(reader.line()) +
                      " does not match the dataset shape");
    }
    for (std::size_t j = 0; j < s.num_cf(); ++j) {
      observed(i, j) = CodeOrThrow(s.cf(j), record[source[j]], reader.line());
    }
    ++i;
  }
  if (i != ds.n) {
    throw Error(ErrorCode::kShapeMismatch,
                "observed CSV has " + std::to_string(i) + " rows, dataset has " +
                    std::to_string(ds.n));
  }
  ds.cf_observed = std::move(observed);
  ValidateDataset(ds);
}

Dataset SynthesizeCf(const Dataset& ds, std::uint64_t seed) {
  if (!ds.cf_truth || ds.cf_truth->rows() != ds.n) {
    throw Error(ErrorCode::kMissingTruth,
                "complementary features need ground truth to be synthesized");
  }
  const CounterRng rng(seed, kSynthesisStream);
  Dataset out = ds;
  const std::size_t f = ds.schema.num_cf();
  out.cf_observed = Matrix<int>(ds.n, f);
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const int u = ds.cf_cardinality(j);
      const int truth = (*ds.cf_truth)(i, j);
      // Draw from {1..u-1} and skip over the true code.
      int v = 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(u - 1), i, j));
      if (v >= truth) ++v;
      out.cf_observed(i, j) = v;
    }
  }
  return out;
}

Split SplitTrainTest(std::size_t n, double fraction, std::uint64_t seed) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "split needs at least 2 rows");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split fraction must be in (0,1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const CounterRng rng(seed, kSplitStream);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Below(i + 1, i)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n)));
  Split split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset SelectRows(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.schema = ds.schema;
  out.n = indices.size();
  for (const OfColumn& col : ds.of_values) {
    OfColumn sel;
    for (std::size_t i : indices) {
      if (!col.real.empty()) sel.real.push_back(col.real.at(i));
      if (!col.codes.empty()) sel.codes.push_back(col.codes.at(i));
    }
    out.of_values.push_back(std::move(sel));
  }
  auto select = [&](const Matrix<int>& m) {
    Matrix<int> r(indices.size(), m.cols());
    for (std::size_t a = 0; a < indices.size(); ++a) {
      for (std::size_t j = 0; j < m.cols(); ++j) r(a, j) = m(indices[a], j);
    }
    return r;
  };
  if (ds.has_observed()) out.cf_observed = select(ds.cf_observed);
  if (ds.cf_truth) out.cf_truth = select(*ds.cf_truth);
  for (std::size_t i : indices) out.labels.push_back(ds.labels.at(i));
  return out;
}

Dataset Subsample(const Dataset& ds, std::size_t max_n, std::uint64_t seed) {
  if (max_n == 0 || ds.n <= max_n) return ds;
  std::vector<std::size_t> order(ds.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const CounterRng rng(seed, kSubsampleStream);
  for (std::size_t i = 0; i < max_n; ++i) {
    std::swap(order[i], order[i + rng.Below(ds.n - i, i)]);
  }
  order.resize(max_n);
  std::sort(order.begin(), order.end());
  return SelectRows(ds, order);
}

void ValidateDataset(const Dataset& ds) {
  const FeatureSchema& s = ds.schema;
  if (ds.n > 0) s.Validate();
  auto check_code = [](int code, const ColumnSpec& col, std::size_t i) {
    if (code < 1 || code > col.cardinality()) {
      throw Error(ErrorCode::kUnknownCategory,
                  "row " + std::to_string(i) + ", column '" + col.name +
                      "': code " + std::to_string(code) + " out of range");
    }
  };
  if (ds.of_values.size() != s.num_of() || ds.labels.size() != ds.n) {
    throw Error(ErrorCode::kShapeMismatch, "dataset columns do not match schema");
  }
  for (std::size_t j = 0; j < s.num_of(); ++j) {
    const OfColumn& col = ds.of_values[j];
    const bool quantitative = s.of(j).kind == FeatureKind::kQuantitative;
    if ((quantitative ? col.real.size() : col.codes.size()) != ds.n) {
      throw Error(ErrorCode::kShapeMismatch,
                  "column '" + s.of(j).name + "' has the wrong length");
    }
    for (std::size_t i = 0; i < col.codes.size(); ++i) {
      check_code(col.codes[i], s.of(j), i);
    }
  }
  for (std::size_t i = 0; i < ds.n; ++i) check_code(ds.labels[i], s.label(), i);
  const bool observed = ds.cf_observed.rows() > 0;
  if (observed && (ds.cf_observed.rows() != ds.n ||
                   ds.cf_observed.cols() != s.num_cf())) {
    throw Error(ErrorCode::kShapeMismatch, "observed CF matrix has the wrong shape");
  }
  if (ds.cf_truth && (ds.cf_truth->rows() != ds.n ||
                      ds.cf_truth->cols() != s.num_cf())) {
    throw Error(ErrorCode::kShapeMismatch, "CF truth matrix has the wrong shape");
  }
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < s.num_cf(); ++j) {
      if (observed) check_code(ds.cf_observed(i, j), s.cf(j), i);
      if (ds.cf_truth) check_code((*ds.cf_truth)(i, j), s.cf(j), i);
      if (observed && ds.cf_truth &&
          ds.cf_observed(i, j) == (*ds.cf_truth)(i, j)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(i) + ", column '" + s.cf(j).name +
                        "': observed value equals the exact value");
      }
    }
  }
}

}  // namespace cfl
