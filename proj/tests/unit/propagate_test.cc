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

#include "cfl/error.h"
#include "cfl/graph.h"
#include "cfl/metrics.h"
#include "cfl/oracle.h"
#include "cfl/preprocess.h"
#include "cfl/propagate.h"
#include "cfl/rng.h"
#include "test_util.h"

namespace cfl {
namespace {

using testing::RandomDataset;

Dataset WithObserved(std::vector<int> cards, const std::vector<std::vector<int>>& obs) {
  Dataset ds = RandomDataset(obs.size(), cards, 1, 0);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = 0; j < cards.size(); ++j) {
      ds.cf_observed(i, j) = obs[i][j];
      // Keep truth consistent with the observation.
      (*ds.cf_truth)(i, j) = obs[i][j] == 1 ? 2 : 1;
    }
  }
  return ds;
}

WeightGraph SwapGraph() {
  WeightGraph g;
  g.n = 2;
  g.k = 1;
  g.neighbors = Matrix<std::uint32_t>(2, 1);
  g.neighbors(0, 0) = 1;
  g.neighbors(1, 0) = 0;
  g.weights = Matrix<double>(2, 1, 1.0);
  return g;
}

ConfidenceBlock RandomBlock(std::size_t n, int u, RngStream& rng) {
  ConfidenceBlock b{0, Matrix<double>(n, u)};
  for (std::size_t i = 0; i < n; ++i) rng.Dirichlet(1.0, &b.values(i, 0), u);
  return b;
}

double MaxAbsDiff(const Matrix<double>& a, const Matrix<double>& b) {
  double m = 0.0;
  for (std::size_t e = 0; e < a.data().size(); ++e) {
    m = std::max(m, std::abs(a.data()[e] - b.data()[e]));
  }
  return m;
}

TEST(InitMarginalTest, Examples) {
  const Dataset ds = WithObserved({3, 12}, {{2, 1}});
  const auto blocks = InitMarginal(ds);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].values(0, 0), 0.5);
  EXPECT_EQ(blocks[0].values(0, 1), 0.0);
  EXPECT_EQ(blocks[0].values(0, 2), 0.5);
  EXPECT_EQ(blocks[1].values(0, 0), 0.0);
  for (int v = 1; v < 12; ++v) EXPECT_EQ(blocks[1].values(0, v), 1.0 / 11.0);
  EXPECT_LE(MaxRowSumError(blocks[1]), 1e-15);
}

TEST(InitMarginalTest, NeedsObservations) {
  Dataset ds = RandomDataset(5, {3}, 1, 0);
  ds.cf_observed = Matrix<int>();
  EXPECT_THROW(InitMarginal(ds), Error);
}

TEST(PropagateStepTest, IdenticalRowsAreFixed) {
  const WeightGraph g = BuildGraph(testing::RandomPoints(30, 2, 0), 5);
  ConfidenceBlock b{0, Matrix<double>(30, 4)};
  const double v[4] = {0.1, 0.2, 0.3, 0.4};
  for (std::size_t i = 0; i < 30; ++i) {
    for (int c = 0; c < 4; ++c) b.values(i, c) = v[c];
  }
  const auto out = PropagateStep(g, std::vector{b});
  EXPECT_LE(MaxAbsDiff(out[0].values, b.values), 1e-15);
}

TEST(PropagateStepTest, SwapGraphSwapsRows) {
  ConfidenceBlock b{0, Matrix<double>(2, 3)};
  b.values(0, 0) = 1.0;
  b.values(1, 1) = 1.0;
  const auto out = PropagateStep(SwapGraph(), std::vector{b});
  EXPECT_EQ(out[0].values(0, 1), 1.0);
  EXPECT_EQ(out[0].values(1, 0), 1.0);
  EXPECT_EQ(out[0].values(0, 0), 0.0);
}

TEST(PropagateStepTest, MatchesDenseProduct) {
  RngStream rng(2);
  const WeightGraph g = BuildGraph(testing::RandomPoints(20, 3, 1), 6);
  const ConfidenceBlock b = RandomBlock(20, 4, rng);
  const auto out = PropagateStep(g, std::vector{b});
  const Matrix<double> h = ToDense(g);
  Matrix<double> oracle(20, 4);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t a = 0; a < 20; ++a) oracle(i, c) += h(i, a) * b.values(a, c);
    }
  }
  EXPECT_LE(MaxAbsDiff(out[0].values, oracle), 1e-12);
  EXPECT_LE(MaxRowSumError(out[0]), 1e-12);
}

TEST(PropagateStepTest, ShapeMismatch) {
  RngStream rng(0);
  const ConfidenceBlock b = RandomBlock(3, 3, rng);
  EXPECT_THROW(PropagateStep(SwapGraph(), std::vector{b}), Error);
}

TEST(CorrectTest, HandArithmetic) {
  ConfidenceBlock row{0, Matrix<double>(1, 3)};
  row.values(0, 0) = 0.2;
  row.values(0, 1) = 0.2;
  row.values(0, 2) = 0.6;
  const Dataset ds = WithObserved({3}, {{2}});
  const auto init = InitMarginal(ds);
  const auto out = Correct(std::vector{row}, init);
  EXPECT_DOUBLE_EQ(out[0].values(0, 0), 0.25);
  EXPECT_EQ(out[0].values(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(out[0].values(0, 2), 0.75);
}

TEST(CorrectTest, ZeroAtObservedIsIdempotent) {
  ConfidenceBlock row{0, Matrix<double>(1, 3)};
  row.values(0, 0) = 0.3;
  row.values(0, 2) = 0.7;
  const auto init = InitMarginal(WithObserved({3}, {{2}}));
  const auto out = Correct(std::vector{row}, init);
  EXPECT_DOUBLE_EQ(out[0].values(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(out[0].values(0, 2), 0.7);
}

TEST(CorrectTest, RandomRowsIdempotentAndZeroAtObserved) {
  RngStream rng(5);
  const std::size_t n = 1000;
  const Dataset ds = RandomDataset(n, {3, 7}, 1, 4);
  const auto init = InitMarginal(ds);
  std::vector<ConfidenceBlock> q = {RandomBlock(n, 3, rng), RandomBlock(n, 7, rng)};
  q[1].cf_index = 1;
  const auto once = Correct(q, init);
  const auto twice = Correct(once, init);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(MaxAbsDiff(once[j].values, twice[j].values), 1e-12);
    EXPECT_LE(MaxRowSumError(once[j]), 1e-10);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(once[j].values(i, ds.cf_observed(i, j) - 1), 0.0);
    }
  }
}

TEST(CorrectTest, AllZeroProductFallsBackToInit) {
  ConfidenceBlock row{0, Matrix<double>(1, 3)};
  row.values(0, 1) = 1.0;
  const auto init = InitMarginal(WithObserved({3}, {{2}}));
  const auto out = Correct(std::vector{row}, init);
  EXPECT_EQ(out[0].values, init[0].values);
}

TEST(CorrectTest, ShapeMismatch) {
  RngStream rng(0);
  const auto init = InitMarginal(WithObserved({3}, {{2}}));
  EXPECT_THROW(Correct(std::vector{RandomBlock(2, 3, rng)}, init), Error);
}

TEST(HardEstimatesTest, TiesGoToLowestCode) {
  ConfidenceBlock b{0, Matrix<double>(3, 4)};
  const double rows[3][4] = {{0, 0.5, 0.5, 0}, {0.25, 0.25, 0.25, 0.25}, {0.1, 0.2, 0.3, 0.4}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t c = 0; c < 4; ++c) b.values(i, c) = rows[i][c];
  }
  const Matrix<int> h = HardEstimates(std::vector{b});
  EXPECT_EQ(h(0, 0), 2);
  EXPECT_EQ(h(1, 0), 1);
  EXPECT_EQ(h(2, 0), 4);
}

ProposedOptions Options(int T, int k, double gamma, Round2Start start) {
  ProposedOptions o;
  o.T = T;
  o.k = k;
  o.gamma = gamma;
  o.round2 = start;
  return o;
}

TEST(RunProposedTest, GammaZeroRestartEqualsSingleRound) {
  const Dataset ds = RandomDataset(80, {3, 4}, 2, 1);
  const EncodedMatrix enc = EncodeOf(ds);
  const EstimationResult r = RunProposed(ds, enc, Options(7, 5, 0.0, Round2Start::kRestart));
  const auto init = InitMarginal(ds);
  const WeightGraph g = BuildGraph(enc, 5);
  const auto single = RunSingleRound(g, init, init, 7, true);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(MaxAbsDiff(r.confidences[j].values, single[j].values), 1e-15);
  }
}

TEST(RunProposedTest, GammaZeroContinueEqualsTwoTRounds) {
  const Dataset ds = RandomDataset(80, {3, 4}, 2, 2);
  const EncodedMatrix enc = EncodeOf(ds);
  const EstimationResult r =
      RunProposed(ds, enc, Options(6, 5, 0.0, Round2Start::kContinue));
  const auto init = InitMarginal(ds);
  const auto single = RunSingleRound(BuildGraph(enc, 5), init, init, 12, true);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(MaxAbsDiff(r.confidences[j].values, single[j].values), 1e-15);
  }
}

TEST(RunProposedTest, OutputInvariants) {
  const Dataset ds = RandomDataset(150, {3, 5, 12}, 3, 3);
  const EstimationResult r = RunProposed(ds, EncodeOf(ds), Options(20, 8, 0.25, Round2Start::kRestart));
  EXPECT_EQ(r.method, Method::kProposed);
  EXPECT_EQ(r.hyper.T, 20);
  EXPECT_EQ(r.hyper.k, 8);
  ASSERT_EQ(r.confidences.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_LE(MaxRowSumError(r.confidences[j]), 1e-10);
    const std::vector<int> argmax = ArgmaxCodes(r.confidences[j]);
    for (std::size_t i = 0; i < ds.n; ++i) {
      ASSERT_EQ(r.confidences[j].values(i, ds.cf_observed(i, j) - 1), 0.0);
      ASSERT_EQ(r.hard_estimates(i, j), argmax[i]);
      ASSERT_NE(r.hard_estimates(i, j), ds.cf_observed(i, j));
    }
  }
  EXPECT_FALSE(r.input_key.empty());
}

TEST(RunProposedTest, PermutationEquivariance) {
  const std::size_t n = 90;
  const Dataset ds = RandomDataset(n, {3, 4}, 2, 6);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(1);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);
  // SelectRows keeps the given order.
  const Dataset permuted = SelectRows(ds, perm);
  const ProposedOptions o = Options(15, 6, 0.25, Round2Start::kRestart);
  const EstimationResult a = RunProposed(ds, EncodeOf(ds), o);
  const EstimationResult b = RunProposed(permuted, EncodeOf(permuted), o);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(b.hard_estimates(r, j), a.hard_estimates(perm[r], j));
      for (int c = 0; c < ds.cf_cardinality(j); ++c) {
        EXPECT_NEAR(b.confidences[j].values(r, c), a.confidences[j].values(perm[r], c), 1e-10);
      }
    }
  }
}

TEST(RunProposedTest, EstimateMaskKeepsInitialConfidences) {
  const Dataset ds = RandomDataset(60, {3, 4, 5}, 2, 8);
  ProposedOptions o = Options(5, 4, 0.25, Round2Start::kRestart);
  o.estimate = {true, false, true};
  o.seed = 3;
  const EstimationResult r = RunProposed(ds, EncodeOf(ds), o);
  const auto init = InitMarginal(ds);
  EXPECT_EQ(r.confidences[1].values, init[1].values);
  EXPECT_NE(r.confidences[0].values, init[0].values);
  const EstimationResult comp = RunComp(ds, 3);
  for (std::size_t i = 0; i < ds.n; ++i) {
    EXPECT_EQ(r.hard_estimates(i, 1), comp.hard_estimates(i, 1));
  }
  o.estimate = {true, false};
  EXPECT_THROW(RunProposed(ds, EncodeOf(ds), o), Error);
}

TEST(RunProposedTest, Preconditions) {
  const Dataset ds = RandomDataset(20, {3}, 1, 0);
  const EncodedMatrix enc = EncodeOf(ds);
  EXPECT_THROW(RunProposed(ds, enc, Options(0, 5, 0.25, Round2Start::kRestart)), Error);
  EXPECT_THROW(RunProposed(ds, enc, Options(5, 0, 0.25, Round2Start::kRestart)), Error);
  EXPECT_THROW(RunProposed(ds, enc, Options(5, 5, 2.0, Round2Start::kRestart)), Error);
  EXPECT_THROW(RunProposed(ds, testing::RandomPoints(5, 1, 0), Options(5, 5, 0.25, Round2Start::kRestart)), Error);
}

TEST(RunProposedTest, SmoothSyntheticReachesHighAccuracy) {
  // Mean over 10 generator seeds; every CF at least 0.95.
  SyntheticSpec spec;
  std::vector<double> acc(spec.cardinalities.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const SyntheticData data = MakeSmoothSynthetic(spec);
    const EstimationResult r = RunProposed(data.dataset, EncodeOf(data.dataset),
                                           Options(100, 20, 0.25, Round2Start::kRestart));
    const auto scores = ScoreCf(r, data.dataset);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += scores[j].acc / 10.0;
  }
  for (std::size_t j = 0; j < acc.size(); ++j) {
    EXPECT_GE(acc[j], 0.95) << "CF " << j;
  }
}

TEST(RunProposedTest, AccuracyDegradesWithRoughness) {
  const std::vector<double> roughness = {0.2, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> mean;
  for (double r : roughness) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SyntheticSpec spec;
      spec.roughness = r;
      spec.seed = seed;
      const SyntheticData data = MakeSmoothSynthetic(spec);
      const EstimationResult est = RunProposed(
          data.dataset, EncodeOf(data.dataset), Options(100, 20, 0.25, Round2Start::kRestart));
      for (const CfScore& s : ScoreCf(est, data.dataset)) total += s.acc;
    }
    mean.push_back(total / 20.0);
  }
  for (std::size_t a = 1; a < mean.size(); ++a) {
    EXPECT_LT(mean[a], mean[a - 1]) << "roughness " << roughness[a];
  }
}

TEST(RunProposedTest, ConstantTargetConvergesToComplementConsistentMode) {
  // With roughness 0 every p*(.|x) equals one global distribution, so most
  // instances land on its mode whenever the observation allows it.
  SyntheticSpec spec;
  spec.roughness = 0.0;
  spec.sharpness = 2.0;
  spec.cardinalities = {4};
  const SyntheticData data = MakeSmoothSynthetic(spec);
  const Dataset& ds = data.dataset;
  int mode = 0;
  for (int c = 1; c < 4; ++c) {
    if (data.targets[0](0, c) > data.targets[0](0, mode)) mode = c;
  }
  const EstimationResult r =
      RunProposed(ds, EncodeOf(ds), Options(100, 20, 0.25, Round2Start::kRestart));
  std::size_t eligible = 0;
  std::size_t at_mode = 0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    if (ds.cf_observed(i, 0) == mode + 1) continue;
    ++eligible;
    at_mode += r.hard_estimates(i, 0) == mode + 1;
  }
  EXPECT_GE(static_cast<double>(at_mode) / eligible, 0.9);
}

TEST(RunCompTest, InitialConfidencesAndRandomComplement) {
  const Dataset ds = RandomDataset(20000, {3, 12}, 1, 4);
  const EstimationResult r = RunComp(ds, 7);
  const auto init = InitMarginal(ds);
  EXPECT_EQ(r.confidences[0].values, init[0].values);
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < 2; ++j) ASSERT_NE(r.hard_estimates(i, j), ds.cf_observed(i, j));
  }
  const auto s = ScoreCf(r, ds);
  EXPECT_NEAR(s[0].acc, 0.5, 0.015);
  EXPECT_NEAR(s[1].acc, 1.0 / 11.0, 0.01);
  EXPECT_NEAR(s[0].ce, std::log(2.0), 1e-12);
  EXPECT_NEAR(s[1].ce, std::log(11.0), 1e-12);
  EXPECT_EQ(RunComp(ds, 7).hard_estimates, r.hard_estimates);
  EXPECT_NE(RunComp(ds, 8).hard_estimates, r.hard_estimates);
}

TEST(RunIpalTest, AlphaZeroReturnsInitialConfidences) {
  const Dataset ds = RandomDataset(40, {3, 5}, 2, 0);
  IpalOptions o;
  o.T = 10;
  o.k = 5;
  o.alpha = 0.0;
  const EstimationResult r = RunIpal(ds, EncodeOf(ds), o);
  const auto init = InitMarginal(ds);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE(MaxAbsDiff(r.confidences[j].values, init[j].values), 1e-15);
  }
}

TEST(RunIpalTest, SwapGraphClosedForm) {
  // With H the 2x2 swap and Q0 = [a; b], one step gives
  // Q1 = 0.5 [b; a] + 0.5 [a; b], so row 0 = (a+b)/2 and Q2 = 0.5 H Q1 + 0.5 Q0.
  const Dataset ds = WithObserved({3}, {{1}, {3}});
  const auto init = InitMarginal(ds);
  const double a[3] = {0.0, 0.5, 0.5};
  const double b[3] = {0.5, 0.5, 0.0};
  double q1[2][3];
  double q2[2][3];
  for (int c = 0; c < 3; ++c) {
    q1[0][c] = 0.5 * b[c] + 0.5 * a[c];
    q1[1][c] = 0.5 * a[c] + 0.5 * b[c];
  }
  for (int c = 0; c < 3; ++c) {
    q2[0][c] = 0.5 * q1[1][c] + 0.5 * a[c];
    q2[1][c] = 0.5 * q1[0][c] + 0.5 * b[c];
  }
  // Two points give a graph equal to the swap graph.
  const EncodedMatrix enc = testing::FromRows({{0.0}, {1.0}});
  IpalOptions o;
  o.T = 2;
  o.k = 1;
  o.alpha = 0.5;
  const EstimationResult r = RunIpal(ds, enc, o);
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(r.confidences[0].values(i, c), q2[i][c], 1e-15);
  }
  EXPECT_EQ(init[0].values(0, 0), a[0]);
}

TEST(RunIpalTest, RowsStochasticAndAlphaChecked) {
  const Dataset ds = RandomDataset(60, {4}, 2, 1);
  IpalOptions o;
  o.T = 30;
  o.k = 6;
  const EstimationResult r = RunIpal(ds, EncodeOf(ds), o);
  EXPECT_LE(MaxRowSumError(r.confidences[0]), 1e-10);
  EXPECT_EQ(r.method, Method::kIpal);
  o.alpha = 1.0;
  EXPECT_THROW(RunIpal(ds, EncodeOf(ds), o), Error);
}

EncodedMatrix Rows(const EncodedMatrix& enc, const std::vector<std::size_t>& idx) {
  EncodedMatrix e;
  e.blocks = enc.blocks;
  e.values = Matrix<double>(idx.size(), enc.dim());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t t = 0; t < enc.dim(); ++t) e.values(a, t) = enc.values(idx[a], t);
  }
  return e;
}

TEST(RunIpalTransferTest, TestRowsCopyNearestTrainEstimate) {
  const Dataset ds = RandomDataset(50, {3, 4}, 2, 2);
  const EncodedMatrix enc = EncodeOf(ds);
  const Split split = SplitTrainTest(ds.n, 0.5, 1);
  IpalOptions o;
  o.T = 10;
  o.k = 4;
  const EstimationResult r = RunIpalTransfer(ds, enc, split.train, o);
  const EstimationResult fitted =
      RunIpal(SelectRows(ds, split.train), Rows(enc, split.train), o);
  for (std::size_t a = 0; a < split.train.size(); ++a) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(r.hard_estimates(split.train[a], j), fitted.hard_estimates(a, j));
    }
  }
  for (std::size_t i : split.test) {
    double best = 1e300;
    std::size_t nearest = 0;
    for (std::size_t a = 0; a < split.train.size(); ++a) {
      const double d = SquaredDistance(enc.row(i), enc.row(split.train[a]));
      if (d < best) {
        best = d;
        nearest = a;
      }
    }
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(r.hard_estimates(i, j), fitted.hard_estimates(nearest, j));
      EXPECT_EQ(r.confidences[j].values(i, r.hard_estimates(i, j) - 1), 1.0);
    }
  }
}

TEST(MethodNamesTest, RoundTrip) {
  for (Method m : {Method::kProposed, Method::kComp, Method::kIpal}) {
    EXPECT_EQ(ParseMethod(MethodName(m)), m);
  }
  EXPECT_THROW(ParseMethod("lp"), Error);
}

TEST(EstimationJsonTest, RoundTrip) {
  const Dataset ds = RandomDataset(30, {3, 4}, 2, 5);
  const EstimationResult r = RunProposed(ds, EncodeOf(ds), Options(3, 4, 0.25, Round2Start::kRestart));
  const EstimationResult back = EstimationFromJson(ToJson(r, true));
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.hyper, r.hyper);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.input_key, r.input_key);
  EXPECT_EQ(back.hard_estimates, r.hard_estimates);
  ASSERT_EQ(back.confidences.size(), 2u);
  EXPECT_EQ(back.confidences[1].values, r.confidences[1].values);
  const EstimationResult slim = EstimationFromJson(ToJson(r, false));
  EXPECT_TRUE(slim.confidences.empty());
  EXPECT_THROW(EstimationFromJson("{not json"), Error);
}

}  // namespace
}  // namespace cfl
