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

#include "cfl/preprocess.h"

#include <algorithm>
#include <cmath>

#include "cfl/error.h"
#include "cfl/hash.h"

namespace cfl {

std::uint64_t EncodedMatrix::ContentKey() const {
  ContentHash h;
  h.Update(static_cast<std::uint64_t>(rows()));
  h.Update(static_cast<std::uint64_t>(dim()));
  for (double v : values.data()) h.Update(v);
  return h.value();
}

EncodedMatrix EncodeOf(const Dataset& ds) {
  const FeatureSchema& s = ds.schema;
  EncodedMatrix enc;
  std::size_t d = 0;
  for (std::size_t j = 0; j < s.num_of(); ++j) {
    const ColumnSpec& col = s.of(j);
    const std::size_t width =
        col.kind == FeatureKind::kCategorical ? col.cardinality() : 1;
    enc.blocks.push_back({col.name, CoordinateBlock::Source::kOrdinary, d, d + width});
    d += width;
  }
  enc.values = Matrix<double>(ds.n, d, 0.0);
  for (std::size_t j = 0; j < s.num_of(); ++j) {
    const ColumnSpec& col = s.of(j);
    const OfColumn& v = ds.of_values[j];
    const std::size_t begin = enc.blocks[j].begin;
    switch (col.kind) {
      case FeatureKind::kQuantitative: {
        if (ds.n == 0) break;
        const auto [lo, hi] = std::minmax_element(v.real.begin(), v.real.end());
        const double range = *hi - *lo;
        for (std::size_t i = 0; i < ds.n; ++i) {
          enc.values(i, begin) = range > 0.0 ? (v.real[i] - *lo) / range : 0.0;
        }
        break;
      }
      case FeatureKind::kBinary:
        for (std::size_t i = 0; i < ds.n; ++i) {
          enc.values(i, begin) = v.codes[i] == 2 ? 1.0 : 0.0;
        }
        break;
      case FeatureKind::kCategorical: {
        const double scale = 1.0 / std::sqrt(static_cast<double>(col.cardinality()));
        for (std::size_t i = 0; i < ds.n; ++i) {
          enc.values(i, begin + v.codes[i] - 1) = scale;
        }
        break;
      }
    }
  }
  return enc;
}

EncodedMatrix EncodeWithConfidence(const EncodedMatrix& base,
                                   std::span<const ConfidenceBlock> conf,
                                   double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be in [0,1]");
  }
  std::size_t d = base.dim();
  for (const ConfidenceBlock& b : conf) {
    if (b.rows() != base.rows()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "confidence block has " + std::to_string(b.rows()) +
                      " rows, encoding has " + std::to_string(base.rows()));
    }
    d += b.values.cols();
  }
  EncodedMatrix enc;
  enc.blocks = base.blocks;
  enc.values = Matrix<double>(base.rows(), d, 0.0);
  for (std::size_t i = 0; i < base.rows(); ++i) {
    std::copy(base.row(i).begin(), base.row(i).end(), enc.values.row(i).begin());
  }
  std::size_t offset = base.dim();
  for (const ConfidenceBlock& b : conf) {
    const std::size_t u = b.values.cols();
    const double scale = std::sqrt(gamma) / std::sqrt(static_cast<double>(u));
    enc.blocks.push_back({"conf:" + std::to_string(b.cf_index),
                          CoordinateBlock::Source::kConfidence, offset,
                          offset + u});
    for (std::size_t i = 0; i < b.rows(); ++i) {
      for (std::size_t v = 0; v < u; ++v) {
        enc.values(i, offset + v) = scale * b.values(i, v);
      }
    }
    offset += u;
  }
  return enc;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace cfl
