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

#ifndef CFL_PREDICTOR_H_
#define CFL_PREDICTOR_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfl/dataset.h"
#include "cfl/matrix.h"
#include "cfl/preprocess.h"
#include "cfl/propagate.h"

namespace cfl {

// What the CF columns of the design matrix carry.
enum class InputMode {
  kOrd,   // one-hot exact values
  kComp,  // initial (complement-uniform) confidences
  kSoft,  // estimated confidences
  kHard,  // one-hot hard estimates
};
std::string_view InputModeName(InputMode mode);
InputMode ParseInputMode(std::string_view name);

struct DesignMatrix {
  Matrix<double> x;
  std::vector<std::string> column_names;
};

// Columns: the OF encoding in schema order, then one block of u_j columns per
// CF in schema order. `result` is required for kSoft and kHard.
DesignMatrix Assemble(const Dataset& ds, const EncodedMatrix& enc_of,
                      InputMode mode, const EstimationResult* result = nullptr);

DesignMatrix SelectDesignRows(const DesignMatrix& design,
                              std::span<const std::size_t> rows);

void WriteDesignCsv(const DesignMatrix& design, std::span<const int> labels01,
                    std::ostream& out);

// Label codes (1..2) to {0, 1}; code 2 is the positive class.
std::vector<int> LabelsToBinary(std::span<const int> codes);

struct LrOptions {
  double l2 = 1e-4;
  int epochs = 500;
};

struct LrModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<double> loss_trace;  // objective after each epoch
};

// Mean logistic loss plus (l2 / 2) * ||w||^2 (bias unpenalized) at
// theta = (w, b). Fills `gradient` (size d + 1) when non-null.
double LogisticObjective(const Matrix<double>& x, std::span<const int> y01,
                         double l2, std::span<const double> theta,
                         std::vector<double>* gradient);

// Full-batch gradient descent from zero with backtracking (Armijo) line
// search; the objective never increases across epochs. Throws kSingleClass
// unless both classes occur, kInvalidArgument for n < 2.
LrModel TrainLogistic(const Matrix<double>& x, std::span<const int> y01,
                      const LrOptions& options = {});

std::vector<double> PredictProbability(const LrModel& model,
                                       const Matrix<double>& x);

std::string ModelToJson(const LrModel& model);

}  // namespace cfl

#endif  // CFL_PREDICTOR_H_
