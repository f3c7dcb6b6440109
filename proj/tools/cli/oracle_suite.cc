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

#include "oracle_suite.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfl/propagate.h"
#include "json.hpp"

namespace cfl::cli {
namespace {

using nlohmann::json;

constexpr int kMaxCounterexamples = 20;

int UniformInt(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.Below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Dataset ObservedOnly(RngStream& rng, std::size_t n,
                     const std::vector<int>& cards) {
  std::vector<ColumnSpec> columns;
  for (std::size_t j = 0; j < cards.size(); ++j) {
    ColumnSpec c{"c" + std::to_string(j + 1), FeatureKind::kCategorical,
                 FeatureRole::kComplementary, {}};
    for (int v = 1; v <= cards[j]; ++v) c.vocabulary.push_back(std::to_string(v));
    columns.push_back(std::move(c));
  }
  columns.push_back({"y", FeatureKind::kBinary, FeatureRole::kLabel, {"0", "1"}});
  Dataset ds;
  ds.schema = FeatureSchema(std::move(columns));
  ds.n = n;
  ds.labels.assign(n, 1);
  ds.cf_observed = Matrix<int>(n, cards.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cards.size(); ++j) {
      ds.cf_observed(i, j) = UniformInt(rng, 1, cards[j]);
    }
  }
  return ds;
}

json MatrixJson(const Matrix<double>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

void Record(SuiteResult& r, bool pass, double statistic) {
  ++r.instances;
  if (pass) ++r.passed;
  if (std::isfinite(statistic)) r.worst = std::max(r.worst, statistic);
}

json FactorsJson(const JointFactors& f) {
  return {{"ny", f.ny},       {"nc", f.nc},
          {"no", f.no},       {"p_o", f.p_o},
          {"p_c_given_o", f.p_c_given_o},
          {"p_y_given_x", f.p_y_given_x},
          {"p_bar", f.p_bar}, {"q_hat", f.q_hat}};
}

}  // namespace

WeightGraph RandomGraph(RngStream& rng, std::size_t n, std::size_t k) {
  WeightGraph g;
  g.n = n;
  g.k = k;
  g.neighbors = Matrix<std::uint32_t>(n, k);
  g.weights = Matrix<double>(n, k);
  std::vector<std::uint32_t> pool;
  for (std::size_t i = 0; i < n; ++i) {
    pool.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(static_cast<std::uint32_t>(j));
    }
    for (std::size_t a = 0; a < k; ++a) {
      std::swap(pool[a], pool[a + rng.Below(pool.size() - a)]);
      g.neighbors(i, a) = pool[a];
    }
    rng.Dirichlet(1.0, g.weights.row(i).data(), static_cast<int>(k));
  }
  return g;
}

SuiteResult JointMarginalSuite(int instances, std::uint64_t seed) {
  SuiteResult result{"joint_marginal_equivalence"};
  for (int r = 0; r < instances; ++r) {
    RngStream rng(seed, 0x4a4f494e00000000ULL + r);
    const auto n = static_cast<std::size_t>(UniformInt(rng, 2, 30));
    const int f = UniformInt(rng, 1, 3);
    std::vector<int> cards;
    for (int j = 0; j < f; ++j) cards.push_back(UniformInt(rng, 3, 4));
    const int T = UniformInt(rng, 1, 5);
    const auto k = static_cast<std::size_t>(
        UniformInt(rng, 1, static_cast<int>(std::min<std::size_t>(n - 1, 6))));
    const Dataset ds = ObservedOnly(rng, n, cards);
    const WeightGraph g = RandomGraph(rng, n, k);

    std::vector<ConfidenceBlock> marginal = InitMarginal(ds);
    JointConfidence joint = InitJoint(ds);
    double worst = 0.0;
    for (int t = 0; t <= T; ++t) {
      if (t > 0) {
        marginal = PropagateStep(g, marginal);
        joint = PropagateJoint(g, joint, 1);
      }
      for (std::size_t j = 0; j < cards.size(); ++j) {
        const ConfidenceBlock m = MarginalizeJoint(joint, j);
        for (std::size_t e = 0; e < m.values.data().size(); ++e) {
          worst = std::max(worst, std::abs(m.values.data()[e] -
                                           marginal[j].values.data()[e]));
        }
      }
    }
    const bool pass = worst <= 1e-10;
    Record(result, pass, worst);
    if (!pass && result.counterexamples.size() < kMaxCounterexamples) {
      result.counterexamples.push_back(
          json{{"instance", r}, {"seed", seed}, {"n", n}, {"T", T},
               {"cardinalities", cards}, {"max_abs_diff", worst}}
              .dump());
    }
  }
  return result;
}

SuiteResult MonotoneKlSuite(int instances, std::uint64_t seed,
                            MixtureObjective objective, int T) {
  static const std::vector<std::vector<int>> kShapes = {
      {3}, {4}, {5}, {6}, {7}, {8}, {2, 2}, {2, 3}, {3, 2}, {2, 4}, {4, 2},
      {2, 2, 2}};
  SuiteResult result{objective == MixtureObjective::kMixtureToTarget
                         ? "monotone_kl"
                         : "monotone_kl_forward_weights"};
  for (int r = 0; r < instances; ++r) {
    RngStream rng(seed, 0x4d4f4e4f00000000ULL + r);
    const auto n = static_cast<std::size_t>(UniformInt(rng, 2, 8));
    const std::vector<int>& cards =
        kShapes[rng.Below(kShapes.size())];
    const JointCodec codec(cards);
    const std::size_t m = codec.size();
    Matrix<double> targets(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      rng.Dirichlet(1.0, targets.row(i).data(), static_cast<int>(m));
    }
    Matrix<double> initial(n, m);
    const bool joint_start = r % 2 == 0;
    if (joint_start) {
      Matrix<int> observed(n, cards.size());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cards.size(); ++j) {
          observed(i, j) = UniformInt(rng, 1, cards[j]);
        }
      }
      initial = InitJointFromObserved(observed, cards).values;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        rng.Dirichlet(1.0, initial.row(i).data(), static_cast<int>(m));
      }
    }
    const KlTrace trace = VerifyMonotoneKl(targets, initial, T, objective);
    int finite_comparisons = 0;
    for (std::size_t t = 1; t < trace.mean_kl.size(); ++t) {
      finite_comparisons += std::isfinite(trace.mean_kl[t - 1]) ? 1 : 0;
    }
    ++result.instances;
    if (!trace.monotone) {
      result.worst = std::max(result.worst, trace.worst_increase);
    } else if (finite_comparisons == 0) {
      ++result.skipped;
    } else {
      ++result.passed;
    }
    if (!trace.monotone && result.counterexamples.size() < kMaxCounterexamples) {
      json trace_json = json::array();
      for (double v : trace.mean_kl) {
        trace_json.push_back(std::isfinite(v) ? json(v) : json("inf"));
      }
      result.counterexamples.push_back(
          json{{"instance", r},
               {"seed", seed},
               {"weight_objective",
                objective == MixtureObjective::kMixtureToTarget
                    ? "KL(mixture||target)"
                    : "KL(target||mixture)"},
               {"initial_kind", joint_start ? "joint_init" : "random"},
               {"cardinalities", cards},
               {"T", T},
               {"targets", MatrixJson(targets)},
               {"initial", MatrixJson(initial)},
               {"mean_kl_trace", trace_json},
               {"first_violation", trace.first_violation},
               {"worst_increase", trace.worst_increase}}
              .dump());
    }
  }
  return result;
}

namespace {

template <typename Check>
SuiteResult JointSweep(const char* name, int instances, std::uint64_t seed,
                       bool true_model, Check check) {
  SuiteResult result{name};
  for (int r = 0; r < instances; ++r) {
    RngStream rng(seed, 0x424f554e00000000ULL + r);
    const int nc = UniformInt(rng, 2, 3);
    const int no = UniformInt(rng, 1, 2);
    const JointFactors factors = RandomFactors(rng, 2, nc, no);
    const DiscreteJoint joint = ComposeJoint(factors);
    ValidateJoint(joint);
    const LabelTable theta =
        true_model ? TrueLabelTable(joint) : RandomLabelTable(rng, 2, nc, no);
    const BoundTerms terms = ComputeBoundTerms(joint, theta);
    const double statistic = check(terms);
    const bool pass = statistic <= 1e-9;
    Record(result, pass, statistic);
    if (!pass && result.counterexamples.size() < kMaxCounterexamples) {
      result.counterexamples.push_back(
          json{{"instance", r},
               {"seed", seed},
               {"factors", FactorsJson(factors)},
               {"p_theta", theta},
               {"lhs", terms.lhs},
               {"j_kl", terms.j_kl},
               {"mi_exact", terms.mi_exact},
               {"mi_hat", terms.mi_hat},
               {"rhs", terms.rhs()}}
              .dump());
    }
  }
  return result;
}

}  // namespace

SuiteResult BoundSuite(int instances, std::uint64_t seed) {
  return JointSweep("bound_lhs_le_rhs", instances, seed, false,
                    [](const BoundTerms& t) { return t.lhs - t.rhs(); });
}

SuiteResult BoundSuiteTrueModel(int instances, std::uint64_t seed) {
  return JointSweep("bound_lhs_le_rhs_true_model", instances, seed, true,
                    [](const BoundTerms& t) { return t.lhs - t.rhs(); });
}

SuiteResult JmiSuite(int instances, std::uint64_t seed) {
  return JointSweep("jmi_nonnegative", instances, seed, false,
                    [](const BoundTerms& t) { return -t.j_mi(); });
}

double ZeroBoundInstance(std::uint64_t seed) {
  RngStream rng(seed, 0x5a45524fULL);
  JointFactors f = RandomFactors(rng, 2, 2, 2);
  // With two values the complementary observation is the other value, and
  // the estimator that swaps it back recovers X^c exactly.
  f.p_bar = {0.0, 1.0, 1.0, 0.0};
  for (int b = 0; b < 2; ++b) {
    for (int o = 0; o < 2; ++o) {
      for (int h = 0; h < 2; ++h) f.q_hat[(b * 2 + o) * 2 + h] = h != b ? 1.0 : 0.0;
    }
  }
  const DiscreteJoint joint = ComposeJoint(f);
  const BoundTerms t = ComputeBoundTerms(joint, TrueLabelTable(joint));
  return std::max(std::abs(t.lhs), std::abs(t.rhs()));
}

}  // namespace cfl::cli
