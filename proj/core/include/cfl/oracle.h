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

#ifndef CFL_ORACLE_H_
#define CFL_ORACLE_H_

// Brute-force reference computations on small instances: joint-confidence
// propagation, KL-optimal mixture weights, and exact finite sums over
// discrete joints for the information-theoretic bounds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cfl/confidence.h"
#include "cfl/dataset.h"
#include "cfl/graph.h"
#include "cfl/matrix.h"
#include "cfl/rng.h"

namespace cfl {

inline constexpr std::size_t kJointCardinalityCap = 1'000'000;

// Flat index of a tuple (v_1, ..., v_F) of 1-based codes, row-major with the
// first feature varying slowest.
class JointCodec {
 public:
  explicit JointCodec(std::vector<int> cardinalities);

  std::size_t size() const { return size_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  std::size_t Flatten(std::span<const int> codes) const;
  std::vector<int> Unflatten(std::size_t index) const;
  // Code of feature j in tuple `index`, without materializing the tuple.
  int CodeAt(std::size_t index, std::size_t j) const;

 private:
  std::vector<int> cards_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

struct JointConfidence {
  std::vector<int> cardinalities;
  Matrix<double> values;  // n x prod(cardinalities)
};

// Uniform over tuples that differ from the observation in every coordinate.
// Throws kCardinalityCap above kJointCardinalityCap.
JointConfidence InitJoint(const Dataset& ds);
JointConfidence InitJointFromObserved(const Matrix<int>& observed,
                                      std::vector<int> cardinalities);

// T left-multiplications by the dense form of `graph` (no correction step).
JointConfidence PropagateJoint(const WeightGraph& graph,
                               const JointConfidence& q, int T);

// Sums out every feature but j.
ConfidenceBlock MarginalizeJoint(const JointConfidence& q, std::size_t j);

// D_KL(p || q) in nats with 0 ln 0 = 0; +infinity if p > 0 where q = 0.
double KlDivergence(std::span<const double> p, std::span<const double> q);

// Which KL the mixture weights minimize.
enum class MixtureObjective {
  kMixtureToTarget,  // D_KL(sum_a h_a q_a || p*), the weight objective as used by the ideal method
  kTargetToMixture,  // D_KL(p* || sum_a h_a q_a)
};

struct MixtureWeights {
  std::vector<double> weights;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

// Minimizes the selected KL over the simplex of mixtures of the rows of
// `components` by projected Newton steps with Armijo backtracking. Components
// that would make the objective infinite get zero weight; throws
// kInfeasibleKl when no finite mixture exists.
MixtureWeights IdealWeightsRow(std::span<const double> target,
                               const Matrix<double>& components,
                               MixtureObjective objective,
                               int max_iterations = 500,
                               double tolerance = 1e-14);

// One row of weights per target, over all rows of `components` (self
// included). Dense n x n, rows on the simplex.
Matrix<double> IdealWeights(const Matrix<double>& targets,
                            const Matrix<double>& components,
                            MixtureObjective objective);

struct KlTrace {
  std::vector<double> mean_kl;  // t = 0..T, mean_i D_KL(p*_i || q^(t)_i)
  bool monotone = true;         // no finite-to-larger step beyond slack
  double worst_increase = 0.0;  // max_t (mean_kl[t] - mean_kl[t-1])
  int first_violation = -1;     // t of the first violation
  bool infinite_steps = false;  // some comparison involved +infinity
};

// The ideal iteration: at each t, weights from IdealWeights on the current
// confidences, then Q <- H Q.
KlTrace VerifyMonotoneKl(const Matrix<double>& targets,
                         const Matrix<double>& initial, int T,
                         MixtureObjective objective, double slack = 1e-9);

// Finite joint of (Y, X^c, X^o, Xbar^c, Xhat^c). Xbar and Xhat share the
// support of X^c. p(y, c, o, b, h) = p(o) p(c|o) p(y|c,o) pbar(b|c) q(h|b,o).
struct JointFactors {
  int ny = 2;
  int nc = 3;
  int no = 2;
  std::vector<double> p_o;         // [o]
  std::vector<double> p_c_given_o; // [o][c]
  std::vector<double> p_y_given_x; // [c][o][y]
  std::vector<double> p_bar;       // [c][b], zero on b == c
  std::vector<double> q_hat;       // [b][o][h]
};

struct DiscreteJoint {
  int ny = 2;
  int nc = 3;
  int no = 2;
  std::vector<double> table;  // [y][c][o][b][h]

  std::size_t Index(int y, int c, int o, int b, int h) const {
    return ((((static_cast<std::size_t>(y) * nc + c) * no + o) * nc + b) *
                nc +
            h);
  }
  double at(int y, int c, int o, int b, int h) const {
    return table[Index(y, c, o, b, h)];
  }
};

DiscreteJoint ComposeJoint(const JointFactors& f);
// Nonnegative, sums to 1 within 1e-12, zero wherever b == c.
void ValidateJoint(const DiscreteJoint& joint);

// Random factors with Dirichlet(1) rows; pbar is supported on the
// complement of c.
JointFactors RandomFactors(RngStream& rng, int ny, int nc, int no);

// Label model p_theta(y | c, o), laid out [c][o][y].
using LabelTable = std::vector<double>;
LabelTable RandomLabelTable(RngStream& rng, int ny, int nc, int no);
LabelTable TrueLabelTable(const DiscreteJoint& joint);

struct BoundTerms {
  double lhs = 0.0;    // D_KL(p*(Y|X^c,X^o) || p_theta(Y|X^c,X^o))
  double j_kl = 0.0;   // D_KL(p*(Y|Xhat,X^o) || p_theta(Y|Xhat,X^o))
  double mi_exact = 0.0;  // I(Y; X^c | X^o)
  double mi_hat = 0.0;    // I(Y; Xhat | X^o)
  double j_mi() const { return mi_exact - mi_hat; }
  double rhs() const { return j_kl + j_mi(); }
};

// Exact sums over the joint. Expectations for the Xhat terms are taken under
// the joint law of (Y, Xhat, X^o).
BoundTerms ComputeBoundTerms(const DiscreteJoint& joint,
                             const LabelTable& p_theta);
double ComputeJmi(const DiscreteJoint& joint);

// ---------------------------------------------------------------------------
// Smooth synthetic data with known conditionals.

struct SyntheticSpec {
  std::size_t n = 300;
  std::vector<int> cardinalities = {3, 4};
  std::size_t num_of = 2;
  // Frequency scale of the random score functions; 0 makes p*(x^c | x^o)
  // constant in x^o.
  double roughness = 0.2;
  // Multiplies the scores; larger is more peaked.
  double sharpness = 100.0;
  // Scale of the CF effects on the label logit.
  double label_strength = 2.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;  // observed CFs synthesized with the same seed
  std::vector<Matrix<double>> targets;  // per CF, n x u_j of p*(x^c_j | x^o_i)
};

// OFs uniform on [0,1]^F; p*(x^c_j | x^o) = softmax of random sums of
// cosines whose frequency scales with roughness (Lipschitz constant
// proportional to sharpness * roughness). CFs are conditionally independent
// given x^o. Labels are Bernoulli of a logistic model in the OFs and the
// exact CF values.
SyntheticData MakeSmoothSynthetic(const SyntheticSpec& spec);

// Row-wise product of the per-CF targets, in JointCodec order.
Matrix<double> JointTargets(const SyntheticData& data);

}  // namespace cfl

#endif  // CFL_ORACLE_H_
