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

#ifndef CFL_SIMPLEX_H_
#define CFL_SIMPLEX_H_

#include <span>
#include <vector>

#include "cfl/matrix.h"

namespace cfl {

// In-place Euclidean projection onto {w : w >= 0, sum w = 1}.
void ProjectOntoSimplex(std::span<double> v);

struct SimplexQpOptions {
  int max_iterations = 10000;
  // Stop when the norm of the projected-gradient step (gradient mapping)
  // drops below this.
  double tolerance = 1e-8;
};

struct SimplexQpResult {
  std::vector<double> weights;
  double objective = 0.0;     // w' G w
  double gap = 0.0;           // Frank-Wolfe duality gap, >= f(w) - f*
  double kkt_residual = 0.0;  // ||w - P(w - grad f(w))||_inf
  int iterations = 0;
  bool degenerate = false;    // every simplex point is optimal
};

// Minimizes w' G w over the probability simplex for a symmetric PSD Gram
// matrix G (m x m). Accelerated projected gradient with adaptive restart and
// step 1/L, L = 2 * lambda_max(G), followed by an exact solve on the detected
// support. Starts from, and never returns anything worse than, uniform
// weights. Degenerate problems (G constant) return uniform weights.
SimplexQpResult SolveSimplexQp(const Matrix<double>& gram,
                               const SimplexQpOptions& options = {});

double QuadraticForm(const Matrix<double>& gram, std::span<const double> w);

}  // namespace cfl

#endif  // CFL_SIMPLEX_H_
