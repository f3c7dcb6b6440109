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

#include "cfl/oracle.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cfl/error.h"
#include "cfl/simplex.h"

namespace cfl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogFloor = 1e-300;

std::size_t CheckedProduct(const std::vector<int>& cards) {
  std::size_t size = 1;
  for (int u : cards) {
    if (u < 1) throw Error(ErrorCode::kInvalidArgument, "cardinality must be >= 1");
    if (size > kJointCardinalityCap / static_cast<std::size_t>(u)) {
      throw Error(ErrorCode::kCardinalityCap,
                  "joint support exceeds " + std::to_string(kJointCardinalityCap));
    }
    size *= static_cast<std::size_t>(u);
  }
  return size;
}

std::vector<double> Mixture(std::span<const double> h,
                            const Matrix<double>& components) {
  std::vector<double> m(components.cols(), 0.0);
  for (std::size_t a = 0; a < h.size(); ++a) {
    if (h[a] == 0.0) continue;
    const auto q = components.row(a);
    for (std::size_t x = 0; x < m.size(); ++x) m[x] += h[a] * q[x];
  }
  return m;
}

double MixtureValue(std::span<const double> target, const Matrix<double>& comps,
                    std::span<const double> h, MixtureObjective objective) {
  const std::vector<double> m = Mixture(h, comps);
  return objective == MixtureObjective::kMixtureToTarget
             ? KlDivergence(m, target)
             : KlDivergence(target, m);
}

// Gradient and Hessian of the selected KL in the mixture weights.
void MixtureDerivatives(std::span<const double> target,
                        const Matrix<double>& comps, std::span<const double> h,
                        MixtureObjective objective, std::vector<double>& grad,
                        Matrix<double>& hess) {
  const std::vector<double> m = Mixture(h, comps);
  const std::size_t k = h.size();
  grad.assign(k, 0.0);
  hess = Matrix<double>(k, k, 0.0);
  std::vector<double> curvature(m.size(), 0.0);
  for (std::size_t x = 0; x < m.size(); ++x) {
    const double mx = std::max(m[x], kLogFloor);
    if (objective == MixtureObjective::kMixtureToTarget) {
      curvature[x] = m[x] > 0.0 ? 1.0 / mx : 0.0;
    } else {
      curvature[x] = target[x] > 0.0 ? target[x] / (mx * mx) : 0.0;
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    const auto qa = comps.row(a);
    double s = 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) {
      if (qa[x] == 0.0) continue;
      if (objective == MixtureObjective::kMixtureToTarget) {
        s += qa[x] * (std::log(std::max(m[x], kLogFloor)) -
                      std::log(std::max(target[x], kLogFloor)) + 1.0);
      } else if (target[x] > 0.0) {
        s -= target[x] * qa[x] / std::max(m[x], kLogFloor);
      }
    }
    grad[a] = s;
    for (std::size_t b = a; b < k; ++b) {
      const auto qb = comps.row(b);
      double c = 0.0;
      for (std::size_t x = 0; x < m.size(); ++x) c += qa[x] * qb[x] * curvature[x];
      hess(a, b) = c;
      hess(b, a) = c;
    }
  }
}

// argmin over the simplex of g'(w - h) + (w - h)'H(w - h)/2, by accelerated
// projected gradient from h.
std::vector<double> SolveQuadraticModel(const Matrix<double>& hess,
                                        std::span<const double> grad,
                                        std::span<const double> h) {
  const std::size_t k = h.size();
  Eigen::MatrixXd eh(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) eh(a, b) = hess(a, b);
  }
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(eh, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  const double step = 1.0 / std::max(lmax, 1e-12);
  auto model_grad = [&](const std::vector<double>& w) {
    std::vector<double> g(grad.begin(), grad.end());
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) g[a] += hess(a, b) * (w[b] - h[b]);
    }
    return g;
  };
  std::vector<double> x(h.begin(), h.end()), y = x, next(k);
  double t = 1.0;
  for (int it = 0; it < 5000; ++it) {
    const std::vector<double> g = model_grad(y);
    for (std::size_t a = 0; a < k; ++a) next[a] = y[a] - step * g[a];
    ProjectOntoSimplex(next);
    double moved = 0.0;
    for (std::size_t a = 0; a < k; ++a) moved = std::max(moved, std::abs(next[a] - x[a]));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t a = 0; a < k; ++a) {
      y[a] = next[a] + ((t - 1.0) / t_next) * (next[a] - x[a]);
    }
    t = t_next;
    x = next;
    if (moved <= 1e-15) break;
  }
  return x;
}

void Dirichlet1(RngStream& rng, double* out, int size) {
  rng.Dirichlet(1.0, out, size);
}

}  // namespace

JointCodec::JointCodec(std::vector<int> cardinalities)
    : cards_(std::move(cardinalities)) {
  size_ = CheckedProduct(cards_);
  strides_.assign(cards_.size(), 1);
  for (std::size_t j = cards_.size(); j-- > 1;) {
    strides_[j - 1] = strides_[j] * static_cast<std::size_t>(cards_[j]);
  }
}

std::size_t JointCodec::Flatten(std::span<const int> codes) const {
  if (codes.size() != cards_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tuple length differs from codec");
  }
  std::size_t index = 0;
  for (std::size_t j = 0; j < codes.size(); ++j) {
    if (codes[j] < 1 || codes[j] > cards_[j]) {
      throw Error(ErrorCode::kInvalidArgument, "code out of range");
    }
    index += static_cast<std::size_t>(codes[j] - 1) * strides_[j];
  }
  return index;
}

std::vector<int> JointCodec::Unflatten(std::size_t index) const {
  std::vector<int> codes(cards_.size());
  for (std::size_t j = 0; j < cards_.size(); ++j) codes[j] = CodeAt(index, j);
  return codes;
}

int JointCodec::CodeAt(std::size_t index, std::size_t j) const {
  return static_cast<int>((index / strides_[j]) % cards_[j]) + 1;
}

JointConfidence InitJointFromObserved(const Matrix<int>& observed,
                                      std::vector<int> cardinalities) {
  const JointCodec codec(cardinalities);
  if (observed.cols() != cardinalities.size()) {
    throw Error(ErrorCode::kShapeMismatch, "observed width differs from codec");
  }
  double mass = 1.0;
  for (int u : cardinalities) mass /= (u - 1);
  JointConfidence q{std::move(cardinalities),
                    Matrix<double>(observed.rows(), codec.size(), 0.0)};
  for (std::size_t i = 0; i < observed.rows(); ++i) {
    for (std::size_t x = 0; x < codec.size(); ++x) {
      bool differs = true;
      for (std::size_t j = 0; j < observed.cols() && differs; ++j) {
        differs = codec.CodeAt(x, j) != observed(i, j);
      }
      if (differs) q.values(i, x) = mass;
    }
  }
  return q;
}

JointConfidence InitJoint(const Dataset& ds) {
  std::vector<int> cards;
  for (std::size_t j = 0; j < ds.schema.num_cf(); ++j) {
    cards.push_back(ds.cf_cardinality(j));
  }
  CheckedProduct(cards);
  if (!ds.has_observed()) {
    throw Error(ErrorCode::kInvalidArgument,
                "complementary observations have not been synthesized");
  }
  return InitJointFromObserved(ds.cf_observed, std::move(cards));
}

JointConfidence PropagateJoint(const WeightGraph& graph,
                               const JointConfidence& q, int T) {
  if (q.values.rows() != graph.n) {
    throw Error(ErrorCode::kShapeMismatch, "graph and joint differ in rows");
  }
  const Matrix<double> h = ToDense(graph);
  JointConfidence cur = q;
  const std::size_t n = graph.n;
  const std::size_t m = q.values.cols();
  for (int t = 0; t < T; ++t) {
    Matrix<double> next(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        const double w = h(i, l);
        if (w == 0.0) continue;
        for (std::size_t x = 0; x < m; ++x) next(i, x) += w * cur.values(l, x);
      }
    }
    cur.values = std::move(next);
  }
  return cur;
}

ConfidenceBlock MarginalizeJoint(const JointConfidence& q, std::size_t j) {
  const JointCodec codec(q.cardinalities);
  ConfidenceBlock block{j, Matrix<double>(q.values.rows(), q.cardinalities.at(j), 0.0)};
  for (std::size_t i = 0; i < q.values.rows(); ++i) {
    for (std::size_t x = 0; x < codec.size(); ++x) {
      block.values(i, codec.CodeAt(x, j) - 1) += q.values(i, x);
    }
  }
  return block;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kShapeMismatch, "KL arguments differ in length");
  }
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    if (q[x] <= 0.0) return kInf;
    d += p[x] * std::log(p[x] / q[x]);
  }
  return std::max(d, 0.0);
}

MixtureWeights IdealWeightsRow(std::span<const double> target,
                               const Matrix<double>& components,
                               MixtureObjective objective, int max_iterations,
                               double tolerance) {
  const std::size_t m = components.rows();
  if (components.cols() != target.size() || m == 0) {
    throw Error(ErrorCode::kShapeMismatch, "components do not match target");
  }
  std::vector<char> admissible(m, 1);
  if (objective == MixtureObjective::kMixtureToTarget) {
    for (std::size_t a = 0; a < m; ++a) {
      const auto q = components.row(a);
      for (std::size_t x = 0; x < q.size(); ++x) {
        if (q[x] > 0.0 && target[x] <= 0.0) admissible[a] = 0;
      }
    }
  }
  const std::size_t count =
      static_cast<std::size_t>(std::count(admissible.begin(), admissible.end(), 1));
  if (count == 0) {
    throw Error(ErrorCode::kInfeasibleKl,
                "every component puts mass where the target has none");
  }
  // Optimize over the admissible components only.
  Matrix<double> comps(count, components.cols());
  std::vector<std::size_t> index;
  for (std::size_t a = 0; a < m; ++a) {
    if (!admissible[a]) continue;
    const auto src = components.row(a);
    std::copy(src.begin(), src.end(), comps.row(index.size()).begin());
    index.push_back(a);
  }
  // Start from the better of the uniform mixture and the best single
  // component.
  std::vector<double> h(count, 1.0 / static_cast<double>(count));
  double f = MixtureValue(target, comps, h, objective);
  for (std::size_t a = 0; a < count; ++a) {
    std::vector<double> vertex(count, 0.0);
    vertex[a] = 1.0;
    const double fv = MixtureValue(target, comps, vertex, objective);
    if (fv < f) {
      f = fv;
      h = std::move(vertex);
    }
  }
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::kInfeasibleKl,
                "no mixture of the components covers the target");
  }
  // Projected Newton: quadratic model over the simplex, Armijo backtracking,
  // Frank-Wolfe direction as fallback. Stops on the Frank-Wolfe gap, which
  // bounds the suboptimality.
  MixtureWeights out;
  std::vector<double> grad;
  Matrix<double> hess;
  std::vector<double> trial(count);
  double residual = kInf;
  int it = 0;
  auto line_search = [&](const std::vector<double>& dir, double slope) {
    for (double s = 1.0; s > 1e-20; s *= 0.5) {
      for (std::size_t a = 0; a < count; ++a) trial[a] = h[a] + s * dir[a];
      ProjectOntoSimplex(trial);
      const double ft = MixtureValue(target, comps, trial, objective);
      // Full steps within round-off of f are taken: near the optimum the
      // decrease is below the resolution of f while the mixture still moves.
      const bool roundoff = s == 1.0 && ft <= f + 1e-14 * std::max(1.0, std::abs(f));
      if (std::isfinite(ft) && ((ft <= f + 1e-4 * s * slope && ft < f) || roundoff)) {
        h = trial;
        f = ft;
        return true;
      }
    }
    return false;
  };
  for (; it < max_iterations; ++it) {
    MixtureDerivatives(target, comps, h, objective, grad, hess);
    std::vector<double> unit(count);
    for (std::size_t a = 0; a < count; ++a) unit[a] = h[a] - grad[a];
    ProjectOntoSimplex(unit);
    residual = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      residual = std::max(residual, std::abs(unit[a] - h[a]));
    }
    const std::size_t best_vertex = static_cast<std::size_t>(
        std::min_element(grad.begin(), grad.end()) - grad.begin());
    double gap = 0.0;
    for (std::size_t a = 0; a < count; ++a) gap += grad[a] * h[a];
    gap -= grad[best_vertex];
    if (gap <= tolerance || residual <= tolerance) break;

    const std::vector<double> w = SolveQuadraticModel(hess, grad, h);
    std::vector<double> dir(count);
    double slope = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      dir[a] = w[a] - h[a];
      slope += grad[a] * dir[a];
    }
    double dir_norm = 0.0;
    for (double v : dir) dir_norm = std::max(dir_norm, std::abs(v));
    if (dir_norm <= 1e-15) break;
    if (slope < 0.0 && line_search(dir, slope)) continue;
    for (std::size_t a = 0; a < count; ++a) {
      dir[a] = (a == best_vertex ? 1.0 : 0.0) - h[a];
    }
    if (!line_search(dir, -gap)) break;
  }
  out.weights.assign(m, 0.0);
  for (std::size_t a = 0; a < count; ++a) out.weights[index[a]] = h[a];
  out.objective = f;
  out.kkt_residual = residual;
  out.iterations = it;
  return out;
}

Matrix<double> IdealWeights(const Matrix<double>& targets,
                            const Matrix<double>& components,
                            MixtureObjective objective) {
  Matrix<double> h(targets.rows(), components.rows(), 0.0);
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    const MixtureWeights w =
        IdealWeightsRow(targets.row(i), components, objective);
    std::copy(w.weights.begin(), w.weights.end(), h.row(i).begin());
  }
  return h;
}

KlTrace VerifyMonotoneKl(const Matrix<double>& targets,
                         const Matrix<double>& initial, int T,
                         MixtureObjective objective, double slack) {
  const std::size_t n = targets.rows();
  const std::size_t m = targets.cols();
  if (initial.rows() != n || initial.cols() != m) {
    throw Error(ErrorCode::kShapeMismatch, "targets and initial differ in shape");
  }
  auto mean_kl = [&](const Matrix<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += KlDivergence(targets.row(i), q.row(i));
    return s / static_cast<double>(n);
  };
  KlTrace trace;
  Matrix<double> q = initial;
  trace.mean_kl.push_back(mean_kl(q));
  for (int t = 1; t <= T; ++t) {
    Matrix<double> h(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      try {
        const MixtureWeights w = IdealWeightsRow(targets.row(i), q, objective);
        std::copy(w.weights.begin(), w.weights.end(), h.row(i).begin());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasibleKl) throw;
        h(i, i) = 1.0;
        trace.infinite_steps = true;
      }
    }
    Matrix<double> next(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        if (h(i, l) == 0.0) continue;
        for (std::size_t x = 0; x < m; ++x) next(i, x) += h(i, l) * q(l, x);
      }
    }
    q = std::move(next);
    const double prev = trace.mean_kl.back();
    const double cur = mean_kl(q);
    trace.mean_kl.push_back(cur);
    if (!std::isfinite(prev)) {
      trace.infinite_steps = true;
      continue;
    }
    const double increase = cur - prev;
    trace.worst_increase = std::max(trace.worst_increase, increase);
    if (increase > slack) {
      if (trace.monotone) trace.first_violation = t;
      trace.monotone = false;
    }
  }
  return trace;
}

DiscreteJoint ComposeJoint(const JointFactors& f) {
  DiscreteJoint j{f.ny, f.nc, f.no, {}};
  j.table.assign(static_cast<std::size_t>(f.ny) * f.nc * f.no * f.nc * f.nc, 0.0);
  for (int y = 0; y < f.ny; ++y) {
    for (int c = 0; c < f.nc; ++c) {
      for (int o = 0; o < f.no; ++o) {
        const double base = f.p_o[o] * f.p_c_given_o[o * f.nc + c] *
                            f.p_y_given_x[(c * f.no + o) * f.ny + y];
        for (int b = 0; b < f.nc; ++b) {
          const double pb = f.p_bar[c * f.nc + b];
          for (int h = 0; h < f.nc; ++h) {
            j.table[j.Index(y, c, o, b, h)] =
                base * pb * f.q_hat[(b * f.no + o) * f.nc + h];
          }
        }
      }
    }
  }
  return j;
}

void ValidateJoint(const DiscreteJoint& joint) {
  double sum = 0.0;
  for (double v : joint.table) {
    if (!(v >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint sums to " + std::to_string(sum));
  }
  for (int y = 0; y < joint.ny; ++y) {
    for (int c = 0; c < joint.nc; ++c) {
      for (int o = 0; o < joint.no; ++o) {
        for (int h = 0; h < joint.nc; ++h) {
          if (joint.at(y, c, o, c, h) != 0.0) {
            throw Error(ErrorCode::kInvalidArgument,
                        "complementary value equals the exact value");
          }
        }
      }
    }
  }
}

JointFactors RandomFactors(RngStream& rng, int ny, int nc, int no) {
  if (nc < 2 || ny < 1 || no < 1) {
    throw Error(ErrorCode::kInvalidArgument, "support sizes too small");
  }
  JointFactors f;
  f.ny = ny;
  f.nc = nc;
  f.no = no;
  f.p_o.resize(no);
  Dirichlet1(rng, f.p_o.data(), no);
  f.p_c_given_o.resize(static_cast<std::size_t>(no) * nc);
  for (int o = 0; o < no; ++o) Dirichlet1(rng, &f.p_c_given_o[o * nc], nc);
  f.p_y_given_x.resize(static_cast<std::size_t>(nc) * no * ny);
  for (int x = 0; x < nc * no; ++x) Dirichlet1(rng, &f.p_y_given_x[x * ny], ny);
  f.p_bar.assign(static_cast<std::size_t>(nc) * nc, 0.0);
  std::vector<double> buf(nc);
  for (int c = 0; c < nc; ++c) {
    Dirichlet1(rng, buf.data(), nc - 1);
    for (int b = 0, a = 0; b < nc; ++b) {
      if (b != c) f.p_bar[c * nc + b] = buf[a++];
    }
  }
  f.q_hat.resize(static_cast<std::size_t>(nc) * no * nc);
  for (int x = 0; x < nc * no; ++x) Dirichlet1(rng, &f.q_hat[x * nc], nc);
  return f;
}

LabelTable RandomLabelTable(RngStream& rng, int ny, int nc, int no) {
  LabelTable t(static_cast<std::size_t>(nc) * no * ny);
  for (int x = 0; x < nc * no; ++x) Dirichlet1(rng, &t[x * ny], ny);
  return t;
}

LabelTable TrueLabelTable(const DiscreteJoint& joint) {
  const int ny = joint.ny, nc = joint.nc, no = joint.no;
  LabelTable t(static_cast<std::size_t>(nc) * no * ny, 0.0);
  for (int c = 0; c < nc; ++c) {
    for (int o = 0; o < no; ++o) {
      double total = 0.0;
      for (int y = 0; y < ny; ++y) {
        double s = 0.0;
        for (int b = 0; b < nc; ++b) {
          for (int h = 0; h < nc; ++h) s += joint.at(y, c, o, b, h);
        }
        t[(c * no + o) * ny + y] = s;
        total += s;
      }
      for (int y = 0; y < ny; ++y) {
        double& v = t[(c * no + o) * ny + y];
        v = total > 0.0 ? v / total : 1.0 / ny;
      }
    }
  }
  return t;
}

BoundTerms ComputeBoundTerms(const DiscreteJoint& joint,
                             const LabelTable& p_theta) {
  const int ny = joint.ny, nc = joint.nc, no = joint.no;
  // Marginals p(y, c, o), p(y, h, o) and p(y, o).
  std::vector<double> ycx(static_cast<std::size_t>(ny) * nc * no, 0.0);
  std::vector<double> yhx(static_cast<std::size_t>(ny) * nc * no, 0.0);
  std::vector<double> yo(static_cast<std::size_t>(ny) * no, 0.0);
  auto at3 = [&](int y, int c, int o) { return (y * nc + c) * no + o; };
  for (int y = 0; y < ny; ++y) {
    for (int c = 0; c < nc; ++c) {
      for (int o = 0; o < no; ++o) {
        for (int b = 0; b < nc; ++b) {
          for (int h = 0; h < nc; ++h) {
            const double p = joint.at(y, c, o, b, h);
            ycx[at3(y, c, o)] += p;
            yhx[at3(y, h, o)] += p;
            yo[y * no + o] += p;
          }
        }
      }
    }
  }
  std::vector<double> po(no, 0.0);
  for (int y = 0; y < ny; ++y) {
    for (int o = 0; o < no; ++o) po[o] += yo[y * no + o];
  }
  // E_{p(v, o)} D(p(Y | v, o) || theta(Y | v, o)) and I(Y; V | O) for V = c or h.
  auto terms = [&](const std::vector<double>& joint3, double* kl, double* mi) {
    *kl = 0.0;
    *mi = 0.0;
    for (int v = 0; v < nc; ++v) {
      for (int o = 0; o < no; ++o) {
        double pvo = 0.0;
        for (int y = 0; y < ny; ++y) pvo += joint3[at3(y, v, o)];
        if (pvo <= 0.0) continue;
        for (int y = 0; y < ny; ++y) {
          const double p = joint3[at3(y, v, o)];
          if (p <= 0.0) continue;
          const double cond = p / pvo;
          const double theta = p_theta[(v * no + o) * ny + y];
          *kl += theta > 0.0 ? p * std::log(cond / theta) : kInf;
          *mi += p * std::log(cond / (yo[y * no + o] / po[o]));
        }
      }
    }
  };
  BoundTerms out;
  terms(ycx, &out.lhs, &out.mi_exact);
  terms(yhx, &out.j_kl, &out.mi_hat);
  return out;
}

double ComputeJmi(const DiscreteJoint& joint) {
  return ComputeBoundTerms(joint, TrueLabelTable(joint)).j_mi();
}

SyntheticData MakeSmoothSynthetic(const SyntheticSpec& spec) {
  constexpr int kTerms = 4;
  const std::size_t n = spec.n;
  const std::size_t dof = spec.num_of;
  const std::size_t f = spec.cardinalities.size();
  RngStream params(spec.seed, 0x53594e54ULL);

  std::vector<ColumnSpec> columns;
  for (std::size_t t = 0; t < dof; ++t) {
    columns.push_back({"x" + std::to_string(t + 1), FeatureKind::kQuantitative,
                       FeatureRole::kOrdinary, {}});
  }
  for (std::size_t j = 0; j < f; ++j) {
    ColumnSpec c{"c" + std::to_string(j + 1), FeatureKind::kCategorical,
                 FeatureRole::kComplementary, {}};
    for (int v = 1; v <= spec.cardinalities[j]; ++v) {
      c.vocabulary.push_back("v" + std::to_string(v));
    }
    columns.push_back(std::move(c));
  }
  columns.push_back({"y", FeatureKind::kBinary, FeatureRole::kLabel, {"0", "1"}});

  Dataset ds;
  ds.schema = FeatureSchema(std::move(columns));
  ds.schema.Validate();
  ds.n = n;
  ds.of_values.assign(dof, OfColumn{});
  Matrix<double> x(n, dof);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < dof; ++t) {
      x(i, t) = params.Uniform();
      ds.of_values[t].real.push_back(x(i, t));
    }
  }

  SyntheticData out;
  Matrix<int> truth(n, f);
  const CounterRng draw(spec.seed, 0x54525554ULL);
  std::vector<std::vector<double>> label_effect(f);
  for (std::size_t j = 0; j < f; ++j) {
    const int u = spec.cardinalities[j];
    // Per category: kTerms random cosines.
    std::vector<double> w(static_cast<std::size_t>(u) * kTerms * dof);
    std::vector<double> phase(static_cast<std::size_t>(u) * kTerms);
    std::vector<double> amp(static_cast<std::size_t>(u) * kTerms);
    for (double& v : w) v = params.Normal();
    for (double& v : phase) v = 2.0 * std::numbers::pi * params.Uniform();
    for (double& v : amp) v = params.Normal();
    Matrix<double> target(n, u);
    std::vector<double> score(u);
    for (std::size_t i = 0; i < n; ++i) {
      double top = -kInf;
      for (int v = 0; v < u; ++v) {
        double s = 0.0;
        for (int r = 0; r < kTerms; ++r) {
          const std::size_t term = static_cast<std::size_t>(v) * kTerms + r;
          double proj = 0.0;
          for (std::size_t t = 0; t < dof; ++t) proj += w[term * dof + t] * x(i, t);
          s += amp[term] * std::cos(2.0 * std::numbers::pi * spec.roughness * proj +
                                    phase[term]);
        }
        score[v] = spec.sharpness * s / std::sqrt(static_cast<double>(kTerms));
        top = std::max(top, score[v]);
      }
      double z = 0.0;
      for (int v = 0; v < u; ++v) z += (target(i, v) = std::exp(score[v] - top));
      for (int v = 0; v < u; ++v) target(i, v) /= z;
      // Inverse-CDF draw of the exact value.
      const double r = draw.Uniform(i, j);
      double acc = 0.0;
      int code = u;
      for (int v = 0; v < u; ++v) {
        acc += target(i, v);
        if (r < acc) {
          code = v + 1;
          break;
        }
      }
      truth(i, j) = code;
    }
    out.targets.push_back(std::move(target));
    label_effect[j].resize(u);
    for (double& v : label_effect[j]) v = params.Normal();
  }
  std::vector<double> beta(dof);
  for (double& v : beta) v = params.Normal();
  for (std::size_t i = 0; i < n; ++i) {
    double logit = 0.0;
    for (std::size_t t = 0; t < dof; ++t) logit += beta[t] * (2.0 * x(i, t) - 1.0);
    for (std::size_t j = 0; j < f; ++j) {
      logit += spec.label_strength * label_effect[j][truth(i, j) - 1];
    }
    const double p = 1.0 / (1.0 + std::exp(-logit));
    ds.labels.push_back(draw.Uniform(i, f + 1) < p ? 2 : 1);
  }
  ds.cf_truth = std::move(truth);
  out.dataset = SynthesizeCf(ds, spec.seed);
  return out;
}

Matrix<double> JointTargets(const SyntheticData& data) {
  std::vector<int> cards;
  for (const auto& t : data.targets) cards.push_back(static_cast<int>(t.cols()));
  const JointCodec codec(cards);
  const std::size_t n = data.dataset.n;
  Matrix<double> joint(n, codec.size(), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < codec.size(); ++x) {
      for (std::size_t j = 0; j < cards.size(); ++j) {
        joint(i, x) *= data.targets[j](i, codec.CodeAt(x, j) - 1);
      }
    }
  }
  return joint;
}

}  // namespace cfl
