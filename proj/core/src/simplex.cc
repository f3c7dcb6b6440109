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

#include "cfl/simplex.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

namespace cfl {
namespace {

std::vector<double> Gradient(const Matrix<double>& g, std::span<const double> w) {
  const std::size_t m = w.size();
  std::vector<double> grad(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < m; ++b) s += g(a, b) * w[b];
    grad[a] = 2.0 * s;
  }
  return grad;
}

// Step w -> P(w - grad / lipschitz).
std::vector<double> ProjectedStep(std::span<const double> w,
                                  std::span<const double> grad, double scale) {
  std::vector<double> out(w.size());
  for (std::size_t a = 0; a < w.size(); ++a) out[a] = w[a] - grad[a] * scale;
  ProjectOntoSimplex(out);
  return out;
}

double StepNorm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
  return std::sqrt(s);
}

bool IsDegenerate(const Matrix<double>& g) {
  const double ref = g(0, 0);
  double scale = 0.0;
  for (double v : g.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return true;
  for (double v : g.data()) {
    if (std::abs(v - ref) > 1e-14 * scale) return false;
  }
  return true;
}

// Minimizes w'Gw subject to sum(w) = 1 with w supported on `support`.
// Returns nothing when the solution leaves the nonnegative orthant.
std::optional<std::vector<double>> PolishOnSupport(
    const Matrix<double>& g, const std::vector<std::size_t>& support,
    std::size_t m) {
  const auto s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      kkt(a, b) = 2.0 * g(support[a], support[b]);
    }
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  rhs(s) = 1.0;
  const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  std::vector<double> w(m, 0.0);
  double sum = 0.0;
  for (Eigen::Index a = 0; a < s; ++a) {
    if (!std::isfinite(sol(a)) || sol(a) < 0.0) return std::nullopt;
    w[support[a]] = sol(a);
    sum += sol(a);
  }
  if (!(sum > 0.0)) return std::nullopt;
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

void ProjectOntoSimplex(std::span<double> v) {
  const std::size_t m = v.size();
  if (m == 0) return;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    cumulative += sorted[r];
    const double t = (cumulative - 1.0) / static_cast<double>(r + 1);
    if (sorted[r] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(x - theta, 0.0);
    sum += x;
  }
  // Remove the rounding drift so the sum is 1 to the last ulp or so.
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  } else {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(m));
  }
}

double QuadraticForm(const Matrix<double>& gram, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    double r = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) r += gram(a, b) * w[b];
    s += w[a] * r;
  }
  return s;
}

SimplexQpResult SolveSimplexQp(const Matrix<double>& gram,
                               const SimplexQpOptions& options) {
  const std::size_t m = gram.rows();
  SimplexQpResult result;
  result.weights.assign(m, m ? 1.0 / static_cast<double>(m) : 0.0);
  if (m == 0) return result;
  if (m == 1 || IsDegenerate(gram)) {
    result.objective = QuadraticForm(gram, result.weights);
    result.degenerate = m > 1;
    return result;
  }

  Eigen::MatrixXd eg(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) eg(a, b) = gram(a, b);
  }
  const double lambda_max =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(eg, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff();
  if (!(lambda_max > std::numeric_limits<double>::min())) {
    result.objective = QuadraticForm(gram, result.weights);
    result.degenerate = true;
    return result;
  }
  const double step = 1.0 / (2.0 * lambda_max);

  std::vector<double> best = result.weights;
  double best_f = QuadraticForm(gram, best);
  std::vector<double> x = best;
  int iterations = 0;

  for (int round = 0; round < 3 && iterations < options.max_iterations; ++round) {
    // Accelerated projected gradient with function-value restart.
    std::vector<double> y = x;
    double t = 1.0;
    double fx = QuadraticForm(gram, x);
    while (iterations < options.max_iterations) {
      ++iterations;
      const std::vector<double> next = ProjectedStep(y, Gradient(gram, y), step);
      const double f_next = QuadraticForm(gram, next);
      if (f_next > fx) {
        y = x;
        t = 1.0;
        continue;
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      for (std::size_t a = 0; a < m; ++a) {
        y[a] = next[a] + ((t - 1.0) / t_next) * (next[a] - x[a]);
      }
      t = t_next;
      const double moved = StepNorm(next, x);
      x = next;
      fx = f_next;
      if (moved <= options.tolerance) {
        const auto mapped = ProjectedStep(x, Gradient(gram, x), step);
        if (StepNorm(mapped, x) <= options.tolerance) break;
      }
    }
    if (fx < best_f) {
      best = x;
      best_f = fx;
    }

    std::vector<std::size_t> support;
    for (std::size_t a = 0; a < m; ++a) {
      if (x[a] > 1e-12) support.push_back(a);
    }
    if (auto polished = PolishOnSupport(gram, support, m)) {
      const double fp = QuadraticForm(gram, *polished);
      if (fp <= best_f) {
        best = *polished;
        best_f = fp;
      }
    }
    x = best;
    const auto grad = Gradient(gram, x);
    const auto mapped = ProjectedStep(x, grad, step);
    if (StepNorm(mapped, x) <= options.tolerance) break;
  }

  result.weights = best;
  result.objective = std::max(best_f, 0.0);
  result.iterations = iterations;
  const std::vector<double> grad = Gradient(gram, best);
  const double min_grad = *std::min_element(grad.begin(), grad.end());
  result.gap = std::max(
      0.0, std::inner_product(grad.begin(), grad.end(), best.begin(), 0.0) -
               min_grad);
  const std::vector<double> unit = ProjectedStep(best, grad, 1.0);
  double residual = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    residual = std::max(residual, std::abs(best[a] - unit[a]));
  }
  result.kkt_residual = residual;
  return result;
}

}  // namespace cfl
