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

#include "cfl/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cfl/error.h"

namespace cfl {

double Accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth lengths differ");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double MacroF1(std::span<const int> predicted, std::span<const int> truth,
               int num_classes) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth lengths differ");
  }
  if (num_classes <= 0) return 0.0;
  std::vector<double> tp(num_classes, 0.0), fp(num_classes, 0.0),
      fn(num_classes, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i] - 1;
    const int t = truth[i] - 1;
    if (p == t) {
      tp.at(t) += 1.0;
    } else {
      fp.at(p) += 1.0;
      fn.at(t) += 1.0;
    }
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
  }
  return sum / num_classes;
}

double Entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double MeanEntropy(const ConfidenceBlock& block) {
  if (block.rows() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < block.rows(); ++i) sum += Entropy(block.values.row(i));
  return sum / static_cast<double>(block.rows());
}

double CrossEntropyAtTruth(const ConfidenceBlock& block,
                           std::span<const int> truth,
                           std::size_t* clipped_rows) {
  if (truth.size() != block.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "truth length differs from block rows");
  }
  std::size_t clipped = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < block.rows(); ++i) {
    double q = block.values(i, truth[i] - 1);
    if (q < kCrossEntropyClip) {
      q = kCrossEntropyClip;
      ++clipped;
    }
    sum -= std::log(q);
  }
  if (clipped_rows != nullptr) *clipped_rows = clipped;
  return block.rows() ? sum / static_cast<double>(block.rows()) : 0.0;
}

std::vector<CfScore> ScoreCf(const EstimationResult& result, const Dataset& ds) {
  if (!ds.cf_truth) {
    throw Error(ErrorCode::kMissingTruth, "scoring needs the exact CF values");
  }
  const std::size_t f = ds.schema.num_cf();
  if (result.confidences.size() != f || result.hard_estimates.rows() != ds.n ||
      result.hard_estimates.cols() != f) {
    throw Error(ErrorCode::kShapeMismatch, "estimation does not match dataset");
  }
  std::vector<CfScore> scores;
  for (std::size_t j = 0; j < f; ++j) {
    std::vector<int> truth(ds.n), pred(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
      truth[i] = (*ds.cf_truth)(i, j);
      pred[i] = result.hard_estimates(i, j);
    }
    CfScore s;
    s.cf_index = j;
    s.name = ds.schema.cf(j).name;
    s.acc = Accuracy(pred, truth);
    s.macro_f1 = MacroF1(pred, truth, ds.cf_cardinality(j));
    s.ce = CrossEntropyAtTruth(result.confidences[j], truth, &s.clipped_rows);
    s.se = MeanEntropy(result.confidences[j]);
    scores.push_back(std::move(s));
  }
  return scores;
}

double LabelMacroF1(std::span<const double> probability,
                    std::span<const int> truth01) {
  std::vector<int> pred(probability.size());
  for (std::size_t i = 0; i < probability.size(); ++i) {
    pred[i] = probability[i] >= 0.5 ? 1 : 0;
  }
  return LabelMacroF1(pred, truth01);
}

double LabelMacroF1(std::span<const int> predicted01,
                    std::span<const int> truth01) {
  std::vector<int> p(predicted01.begin(), predicted01.end());
  std::vector<int> t(truth01.begin(), truth01.end());
  for (int& v : p) ++v;
  for (int& v : t) ++v;
  return MacroF1(p, t, 2);
}

double PositiveClassF1(std::span<const int> predicted01,
                       std::span<const int> truth01) {
  if (predicted01.size() != truth01.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth lengths differ");
  }
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < truth01.size(); ++i) {
    if (predicted01[i] == 1 && truth01[i] == 1) tp += 1.0;
    if (predicted01[i] == 1 && truth01[i] == 0) fp += 1.0;
    if (predicted01[i] == 0 && truth01[i] == 1) fn += 1.0;
  }
  const double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

MeanStd Summarize(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

std::string FormatMeanStd(const MeanStd& value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f ±%.*f", precision, value.mean,
                precision, value.std);
  return buf;
}

std::string FormatTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  // Display width counts UTF-8 code points, so "±" occupies one column.
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char ch : s) w += (ch & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = width(header[c]);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], width(row[c]));
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < widths.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : "";
      out << cell;
      if (c + 1 < widths.size()) {
        out << std::string(widths[c] - width(cell) + 2, ' ');
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t w : widths) total += w + 2;
  out << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

}  // namespace cfl
