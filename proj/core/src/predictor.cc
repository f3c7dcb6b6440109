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

#include "cfl/predictor.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cfl/csv.h"
#include "cfl/error.h"
#include "cfl/parallel.h"
#include "cfl/propagate.h"
#include "json.hpp"

namespace cfl {
namespace {

constexpr std::size_t kChunk = 256;

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string_view InputModeName(InputMode mode) {
  switch (mode) {
    case InputMode::kOrd: return "ord";
    case InputMode::kComp: return "comp";
    case InputMode::kSoft: return "soft";
    case InputMode::kHard: return "hard";
  }
  return "";
}

InputMode ParseInputMode(std::string_view name) {
  if (name == "ord") return InputMode::kOrd;
  if (name == "comp") return InputMode::kComp;
  if (name == "soft") return InputMode::kSoft;
  if (name == "hard") return InputMode::kHard;
  throw Error(ErrorCode::kConfig, "unknown input mode '" + std::string(name) + "'");
}

DesignMatrix Assemble(const Dataset& ds, const EncodedMatrix& enc_of,
                      InputMode mode, const EstimationResult* result) {
  const FeatureSchema& s = ds.schema;
  if (enc_of.rows() != ds.n) {
    throw Error(ErrorCode::kShapeMismatch, "encoding rows do not match dataset");
  }
  if ((mode == InputMode::kSoft || mode == InputMode::kHard) && result == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(InputModeName(mode)) + " mode needs an estimation");
  }
  if (mode == InputMode::kOrd && !ds.cf_truth) {
    throw Error(ErrorCode::kMissingTruth, "ord mode needs the exact CF values");
  }
  if (result != nullptr && (result->confidences.size() != s.num_cf() ||
                            result->hard_estimates.rows() != ds.n)) {
    throw Error(ErrorCode::kShapeMismatch, "estimation does not match dataset");
  }

  DesignMatrix design;
  for (std::size_t j = 0; j < s.num_of(); ++j) {
    const ColumnSpec& col = s.of(j);
    if (col.kind == FeatureKind::kCategorical) {
      for (const std::string& v : col.vocabulary) {
        design.column_names.push_back(col.name + "=" + v);
      }
    } else {
      design.column_names.push_back(col.name);
    }
  }
  std::size_t d = enc_of.dim();
  for (std::size_t j = 0; j < s.num_cf(); ++j) {
    for (const std::string& v : s.cf(j).vocabulary) {
      design.column_names.push_back(s.cf(j).name + "=" + v);
    }
    d += s.cf(j).cardinality();
  }

  std::vector<ConfidenceBlock> init;
  if (mode == InputMode::kComp) init = InitMarginal(ds);

  design.x = Matrix<double>(ds.n, d, 0.0);
  for (std::size_t i = 0; i < ds.n; ++i) {
    auto row = design.x.row(i);
    std::copy(enc_of.row(i).begin(), enc_of.row(i).end(), row.begin());
    std::size_t offset = enc_of.dim();
    for (std::size_t j = 0; j < s.num_cf(); ++j) {
      const std::size_t u = s.cf(j).cardinality();
      switch (mode) {
        case InputMode::kOrd:
          row[offset + (*ds.cf_truth)(i, j) - 1] = 1.0;
          break;
        case InputMode::kHard:
          row[offset + result->hard_estimates(i, j) - 1] = 1.0;
          break;
        case InputMode::kComp:
        case InputMode::kSoft: {
          const auto src = mode == InputMode::kComp
                               ? init[j].values.row(i)
                               : result->confidences[j].values.row(i);
          std::copy(src.begin(), src.end(), row.begin() + offset);
          break;
        }
      }
      offset += u;
    }
  }
  return design;
}

DesignMatrix SelectDesignRows(const DesignMatrix& design,
                              std::span<const std::size_t> rows) {
  DesignMatrix out;
  out.column_names = design.column_names;
  out.x = Matrix<double>(rows.size(), design.x.cols());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto src = design.x.row(rows[a]);
    std::copy(src.begin(), src.end(), out.x.row(a).begin());
  }
  return out;
}

void WriteDesignCsv(const DesignMatrix& design, std::span<const int> labels01,
                    std::ostream& out) {
  std::vector<std::string> fields = design.column_names;
  fields.push_back("label");
  WriteCsvRecord(out, fields);
  char buf[32];
  for (std::size_t i = 0; i < design.x.rows(); ++i) {
    fields.clear();
    for (double v : design.x.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      fields.emplace_back(buf);
    }
    fields.push_back(std::to_string(labels01[i]));
    WriteCsvRecord(out, fields);
  }
}

std::vector<int> LabelsToBinary(std::span<const int> codes) {
  std::vector<int> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] != 1 && codes[i] != 2) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be binary");
    }
    out[i] = codes[i] == 2 ? 1 : 0;
  }
  return out;
}

double LogisticObjective(const Matrix<double>& x, std::span<const int> y01,
                         double l2, std::span<const double> theta,
                         std::vector<double>* gradient) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (theta.size() != d + 1 || y01.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "logistic objective shapes");
  }
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> loss(chunks, 0.0);
  std::vector<std::vector<double>> grads(
      gradient ? chunks : 0, std::vector<double>(d + 1, 0.0));
  ParallelFor(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const auto xi = x.row(i);
      double z = theta[d];
      for (std::size_t t = 0; t < d; ++t) z += theta[t] * xi[t];
      loss[c] += Softplus(z) - (y01[i] ? z : 0.0);
      if (gradient) {
        const double r = Sigmoid(z) - y01[i];
        auto& g = grads[c];
        for (std::size_t t = 0; t < d; ++t) g[t] += r * xi[t];
        g[d] += r;
      }
    }
  });
  const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;
  double total = 0.0;
  for (double v : loss) total += v;
  total *= inv_n;
  double penalty = 0.0;
  for (std::size_t t = 0; t < d; ++t) penalty += theta[t] * theta[t];
  total += 0.5 * l2 * penalty;
  if (gradient) {
    gradient->assign(d + 1, 0.0);
    for (const auto& g : grads) {
      for (std::size_t t = 0; t <= d; ++t) (*gradient)[t] += g[t];
    }
    for (std::size_t t = 0; t <= d; ++t) (*gradient)[t] *= inv_n;
    for (std::size_t t = 0; t < d; ++t) (*gradient)[t] += l2 * theta[t];
  }
  return total;
}

LrModel TrainLogistic(const Matrix<double>& x, std::span<const int> y01,
                      const LrOptions& options) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2 || y01.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "training needs at least 2 rows");
  }
  const bool has_pos = std::find(y01.begin(), y01.end(), 1) != y01.end();
  const bool has_neg = std::find(y01.begin(), y01.end(), 0) != y01.end();
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClass, "training labels contain one class");
  }
  std::vector<double> theta(d + 1, 0.0);
  std::vector<double> grad;
  double f = LogisticObjective(x, y01, options.l2, theta, &grad);
  double step = 1.0;
  LrModel model;
  model.l2 = options.l2;
  std::vector<double> trial(d + 1);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    if (gnorm2 > 0.0) {
      step = std::min(step * 2.0, 1e6);
      while (step > 1e-20) {
        for (std::size_t t = 0; t <= d; ++t) trial[t] = theta[t] - step * grad[t];
        const double ft = LogisticObjective(x, y01, options.l2, trial, nullptr);
        if (ft <= f - 0.5 * step * gnorm2) {
          theta = trial;
          f = LogisticObjective(x, y01, options.l2, theta, &grad);
          break;
        }
        step *= 0.5;
      }
    }
    model.loss_trace.push_back(f);
  }
  model.weights.assign(theta.begin(), theta.begin() + d);
  model.bias = theta[d];
  return model;
}

std::vector<double> PredictProbability(const LrModel& model,
                                       const Matrix<double>& x) {
  if (x.cols() != model.weights.size()) {
    throw Error(ErrorCode::kShapeMismatch, "design width differs from model");
  }
  std::vector<double> p(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = model.bias;
    const auto xi = x.row(i);
    for (std::size_t t = 0; t < xi.size(); ++t) z += model.weights[t] * xi[t];
    p[i] = Sigmoid(z);
  }
  return p;
}

std::string ModelToJson(const LrModel& model) {
  nlohmann::json j;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["l2"] = model.l2;
  j["loss_trace"] = model.loss_trace;
  return j.dump();
}

}  // namespace cfl
