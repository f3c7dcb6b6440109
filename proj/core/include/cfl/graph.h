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

#ifndef CFL_GRAPH_H_
#define CFL_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "cfl/matrix.h"
#include "cfl/preprocess.h"
#include "cfl/simplex.h"

namespace cfl {

// Row i holds the k nearest other rows, nearest first.
struct NeighborLists {
  std::size_t k = 0;
  Matrix<std::uint32_t> index;  // n x k

  std::size_t rows() const { return index.rows(); }
  friend bool operator==(const NeighborLists&, const NeighborLists&) = default;
};

// Sparse row-stochastic similarity matrix with k entries per row and no
// diagonal. weights(i, m) is the weight of neighbors(i, m).
struct WeightGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  Matrix<std::uint32_t> neighbors;
  Matrix<double> weights;

  friend bool operator==(const WeightGraph&, const WeightGraph&) = default;
};

struct GraphStats {
  double max_gap = 0.0;
  double max_kkt_residual = 0.0;
  std::size_t degenerate_rows = 0;
  std::size_t max_iterations_used = 0;
};

// Exact Euclidean k-NN excluding self, k clamped to n - 1; distance ties go to
// the lower index. Requires n >= 2.
NeighborLists KnnSearch(const EncodedMatrix& enc, std::size_t k);

// Per row, the simplex weights that best reconstruct the row from its
// neighbors in least squares.
WeightGraph SolveWeights(const EncodedMatrix& enc, const NeighborLists& nbrs,
                         const SimplexQpOptions& options = {},
                         GraphStats* stats = nullptr);

WeightGraph BuildGraph(const EncodedMatrix& enc, std::size_t k,
                       const SimplexQpOptions& options = {},
                       GraphStats* stats = nullptr);

// Reconstruction objective ||x_i - sum_m w_m x_{nbr(m)}||^2 for one row.
double RowObjective(const EncodedMatrix& enc, const WeightGraph& graph,
                    std::size_t i);
double UniformRowObjective(const EncodedMatrix& enc, const WeightGraph& graph,
                           std::size_t i);

// Throws kInvalidArgument unless every row is a distribution over distinct
// non-self neighbors (row sums within `tolerance`).
void ValidateGraph(const WeightGraph& graph, double tolerance = 1e-10);

Matrix<double> ToDense(const WeightGraph& graph);

// Cache file: "CFLGRAPH" magic, version byte, then little-endian u64 key,
// u64 n, u64 k, n*k u32 neighbor indices, n*k f64 weights.
inline constexpr unsigned char kGraphFileVersion = 1;
void SaveGraph(const WeightGraph& graph, std::uint64_t key,
               const std::string& path);
// nullopt when the file is absent or keyed differently; throws kIo on a
// malformed file.
std::optional<WeightGraph> LoadGraph(const std::string& path,
                                     std::uint64_t key);

// BuildGraph through a directory cache keyed by enc.ContentKey() and k. An
// empty cache_dir disables caching.
WeightGraph BuildGraphCached(const EncodedMatrix& enc, std::size_t k,
                             const std::string& cache_dir,
                             const SimplexQpOptions& options = {});

}  // namespace cfl

#endif  // CFL_GRAPH_H_
