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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "cfl/error.h"
#include "cfl/predictor.h"
#include "cfl/propagate.h"
#include "cfl/rng.h"
#include "json.hpp"
#include "test_util.h"

namespace cfl {
namespace {

Matrix<double> RandomDesign(std::size_t n, std::size_t d, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix<double> x(n, d);
  for (double& v : x.data()) v = rng.Normal();
  return x;
}

std::vector<int> RandomLabels(const Matrix<double>& x, std::uint64_t seed) {
  RngStream rng(seed, 1);
  std::vector<int> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double z = 0.3;
    for (std::size_t t = 0; t < x.cols(); ++t) z += (t % 2 ? -1.0 : 1.0) * x(i, t);
    y[i] = rng.Uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  return y;
}

TEST(AssembleTest, HardOrdSoftCompBlocks) {
  const Dataset ds = testing::RandomDataset(30, {3, 4}, 2, 1);
  const EncodedMatrix enc = EncodeOf(ds);
  ProposedOptions o;
  o.T = 5;
  o.k = 4;
  EstimationResult r = RunProposed(ds, enc, o);
  const DesignMatrix hard = Assemble(ds, enc, InputMode::kHard, &r);
  ASSERT_EQ(hard.x.cols(), enc.dim() + 3 + 4);
  EXPECT_EQ(hard.column_names.front(), "x0");
  EXPECT_EQ(hard.column_names[2], "c0=v1");
  EXPECT_EQ(hard.column_names.back(), "c1=v4");
  for (std::size_t i = 0; i < ds.n; ++i) {
    const int e = r.hard_estimates(i, 0);
    for (int c = 1; c <= 3; ++c) EXPECT_EQ(hard.x(i, 2 + c - 1), c == e ? 1.0 : 0.0);
  }

  // ord equals hard with perfect estimates.
  EstimationResult perfect = r;
  perfect.hard_estimates = *ds.cf_truth;
  EXPECT_EQ(Assemble(ds, enc, InputMode::kOrd).x, Assemble(ds, enc, InputMode::kHard, &perfect).x);

  const DesignMatrix soft = Assemble(ds, enc, InputMode::kSoft, &r);
  for (std::size_t i = 0; i < ds.n; ++i) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t c = 2; c < 5; ++c) s0 += soft.x(i, c);
    for (std::size_t c = 5; c < 9; ++c) s1 += soft.x(i, c);
    EXPECT_NEAR(s0, 1.0, 1e-10);
    EXPECT_NEAR(s1, 1.0, 1e-10);
    for (std::size_t t = 0; t < enc.dim(); ++t) EXPECT_EQ(soft.x(i, t), enc.values(i, t));
  }

  const DesignMatrix comp = Assemble(ds, enc, InputMode::kComp);
  const auto init = InitMarginal(ds);
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(comp.x(i, 2 + c), init[0].values(i, c));
  }
}

TEST(AssembleTest, HardOneHotExample) {
  const Dataset ds = testing::RandomDataset(3, {3}, 1, 0);
  EstimationResult r = RunComp(ds, 0);
  r.hard_estimates(0, 0) = 3;
  const DesignMatrix d = Assemble(ds, EncodeOf(ds), InputMode::kHard, &r);
  EXPECT_EQ(d.x(0, 1), 0.0);
  EXPECT_EQ(d.x(0, 2), 0.0);
  EXPECT_EQ(d.x(0, 3), 1.0);
}

TEST(AssembleTest, Errors) {
  Dataset ds = testing::RandomDataset(10, {3}, 1, 0);
  const EncodedMatrix enc = EncodeOf(ds);
  EXPECT_THROW(Assemble(ds, enc, InputMode::kSoft), Error);
  EXPECT_THROW(Assemble(ds, testing::RandomPoints(3, 1, 0), InputMode::kComp), Error);
  ds.cf_truth.reset();
  EXPECT_THROW(Assemble(ds, enc, InputMode::kOrd), Error);
  EXPECT_EQ(ParseInputMode("soft"), InputMode::kSoft);
  EXPECT_THROW(ParseInputMode("dense"), Error);
}

TEST(DesignCsvTest, HeaderAndRows) {
  const Dataset ds = testing::RandomDataset(4, {3}, 1, 0);
  const DesignMatrix d = Assemble(ds, EncodeOf(ds), InputMode::kOrd);
  std::ostringstream out;
  const std::vector<int> y = LabelsToBinary(ds.labels);
  WriteDesignCsv(d, y, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "x0,c0=v1,c0=v2,c0=v3,label");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  const DesignMatrix sub = SelectDesignRows(d, std::vector<std::size_t>{3, 1});
  EXPECT_EQ(sub.x.rows(), 2u);
  EXPECT_EQ(sub.x(0, 0), d.x(3, 0));
}

TEST(LabelsToBinaryTest, MapsCodes) {
  EXPECT_EQ(LabelsToBinary(std::vector<int>{1, 2, 2, 1}), (std::vector<int>{0, 1, 1, 0}));
  EXPECT_THROW(LabelsToBinary(std::vector<int>{1, 3}), Error);
}

TEST(LogisticTest, GradientMatchesCentralDifferences) {
  const Matrix<double> x = RandomDesign(700, 6, 3);
  const std::vector<int> y = RandomLabels(x, 3);
  RngStream rng(4);
  for (int point = 0; point < 10; ++point) {
    std::vector<double> theta(7);
    for (double& v : theta) v = rng.Normal();
    std::vector<double> grad;
    LogisticObjective(x, y, 0.01, theta, &grad);
    for (std::size_t a = 0; a < theta.size(); ++a) {
      const double h = 1e-5;
      std::vector<double> up = theta;
      std::vector<double> down = theta;
      up[a] += h;
      down[a] -= h;
      const double fd = (LogisticObjective(x, y, 0.01, up, nullptr) -
                         LogisticObjective(x, y, 0.01, down, nullptr)) /
                        (2 * h);
      EXPECT_LE(std::abs(fd - grad[a]), 1e-6 * std::max(1.0, std::abs(grad[a])));
    }
  }
}

TEST(LogisticTest, SeparableTwoPointsReachLowLoss) {
  Matrix<double> x(2, 1);
  x(0, 0) = -1.0;
  x(1, 0) = 1.0;
  const LrModel m = TrainLogistic(x, std::vector<int>{0, 1}, {0.0, 500});
  EXPECT_LT(m.loss_trace.back(), 0.01);
  const auto p = PredictProbability(m, x);
  EXPECT_LT(p[0], 0.5);
  EXPECT_GT(p[1], 0.5);
}

TEST(LogisticTest, LossTraceIsNonIncreasing) {
  const Matrix<double> x = RandomDesign(400, 5, 8);
  const std::vector<int> y = RandomLabels(x, 8);
  const LrModel m = TrainLogistic(x, y, {1e-4, 300});
  ASSERT_EQ(m.loss_trace.size(), 300u);
  for (std::size_t e = 1; e < m.loss_trace.size(); ++e) {
    EXPECT_LE(m.loss_trace[e], m.loss_trace[e - 1] + 1e-9);
  }
}

TEST(LogisticTest, LargeL2ShrinksToPrior) {
  const Matrix<double> x = RandomDesign(500, 4, 1);
  std::vector<int> y = RandomLabels(x, 1);
  const LrModel m = TrainLogistic(x, y, {1e6, 500});
  for (double w : m.weights) EXPECT_NEAR(w, 0.0, 1e-5);
}

TEST(LogisticTest, UninformativeDesignFitsPrior) {
  const Matrix<double> x(400, 3);  // all zero
  std::vector<int> y = RandomLabels(RandomDesign(400, 3, 4), 4);
  const LrModel m = TrainLogistic(x, y, {1e-4, 500});
  const double prior = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  EXPECT_NEAR(m.bias, std::log(prior / (1.0 - prior)), 1e-6);
  for (double p : PredictProbability(m, x)) EXPECT_NEAR(p, prior, 1e-6);
}

TEST(LogisticTest, InvariantToRowOrder) {
  const Matrix<double> x = RandomDesign(300, 4, 2);
  const std::vector<int> y = RandomLabels(x, 2);
  Matrix<double> xr(300, 4);
  std::vector<int> yr(300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t t = 0; t < 4; ++t) xr(i, t) = x(299 - i, t);
    yr[i] = y[299 - i];
  }
  // Summation order differs, so the two descents agree up to optimization
  // error; train close to the optimum before comparing.
  const LrModel a = TrainLogistic(x, y, {1e-2, 2000});
  const LrModel b = TrainLogistic(xr, yr, {1e-2, 2000});
  EXPECT_NEAR(a.loss_trace.back(), b.loss_trace.back(), 1e-12);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(a.weights[t], b.weights[t], 1e-6);
  EXPECT_NEAR(a.bias, b.bias, 1e-6);
}

TEST(LogisticTest, Errors) {
  Matrix<double> x(3, 1);
  try {
    TrainLogistic(x, std::vector<int>{1, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
  }
  EXPECT_THROW(TrainLogistic(Matrix<double>(1, 1), std::vector<int>{1}), Error);
  LrModel m;
  m.weights = {1.0, 2.0};
  EXPECT_THROW(PredictProbability(m, x), Error);
}

TEST(PredictTest, LinkExamples) {
  Matrix<double> x(2, 2);
  x(0, 0) = 0.5;
  x(0, 1) = -1.0;
  x(1, 0) = 2.0;
  x(1, 1) = 3.0;
  LrModel zero;
  zero.weights = {0.0, 0.0};
  for (double p : PredictProbability(zero, x)) EXPECT_EQ(p, 0.5);
  LrModel big = zero;
  big.bias = 50.0;
  for (double p : PredictProbability(big, x)) EXPECT_GT(p, 1.0 - 1e-12);
  LrModel m;
  m.weights = {0.4, -0.3};
  m.bias = 0.1;
  const auto p = PredictProbability(m, x);
  // z0 = 0.2 + 0.3 + 0.1 = 0.6; z1 = 0.8 - 0.9 + 0.1 = 0.0.
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-0.6)), 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(ModelJsonTest, Fields) {
  Matrix<double> x(2, 1);
  x(0, 0) = -1.0;
  x(1, 0) = 1.0;
  const LrModel m = TrainLogistic(x, std::vector<int>{0, 1}, {0.5, 10});
  const auto j = nlohmann::json::parse(ModelToJson(m));
  EXPECT_EQ(j.at("weights").size(), 1u);
  EXPECT_EQ(j.at("l2").get<double>(), 0.5);
  EXPECT_EQ(j.at("loss_trace").size(), 10u);
  EXPECT_TRUE(j.contains("bias"));
}

}  // namespace
}  // namespace cfl
