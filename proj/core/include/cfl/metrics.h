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

#ifndef CFL_METRICS_H_
#define CFL_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfl/confidence.h"
#include "cfl/dataset.h"
#include "cfl/propagate.h"

namespace cfl {

inline constexpr double kCrossEntropyClip = 1e-12;

struct CfScore {
  std::size_t cf_index = 0;
  std::string name;
  double acc = 0.0;
  double macro_f1 = 0.0;
  double ce = 0.0;  // nats
  double se = 0.0;  // nats
  std::size_t clipped_rows = 0;
};

// Scores every CF of `result` against the exact values in ds.cf_truth.
std::vector<CfScore> ScoreCf(const EstimationResult& result,
                             const Dataset& ds);

// Unweighted mean of per-class F1 over codes 1..num_classes; a class with no
// true and no predicted instances scores 0.
double MacroF1(std::span<const int> predicted, std::span<const int> truth,
               int num_classes);

double Accuracy(std::span<const int> predicted, std::span<const int> truth);

// Mean of -ln(max(q(truth), clip)); counts clipped rows when non-null.
double CrossEntropyAtTruth(const ConfidenceBlock& block,
                           std::span<const int> truth,
                           std::size_t* clipped_rows = nullptr);

// Mean Shannon entropy of the rows, 0 ln 0 = 0.
double MeanEntropy(const ConfidenceBlock& block);
double Entropy(std::span<const double> p);

// Binary labels in {0, 1}. Probabilities are thresholded at 0.5.
double LabelMacroF1(std::span<const double> probability,
                    std::span<const int> truth01);
double LabelMacroF1(std::span<const int> predicted01,
                    std::span<const int> truth01);
// F1 of class 1 alone.
double PositiveClassF1(std::span<const int> predicted01,
                       std::span<const int> truth01);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population (ddof = 0)
};
MeanStd Summarize(std::span<const double> values);

// "0.0903 ±0.0014"
std::string FormatMeanStd(const MeanStd& value, int precision = 4);

// Aligned text table; every row must have header.size() cells.
std::string FormatTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows);

}  // namespace cfl

#endif  // CFL_METRICS_H_
