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

#include "cfl/graph.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <utility>

#include "cfl/error.h"
#include "cfl/hash.h"
#include "cfl/parallel.h"

namespace cfl {
namespace {

constexpr char kMagic[8] = {'C', 'F', 'L', 'G', 'R', 'A', 'P', 'H'};

template <typename T>
void PutLe(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  auto bits = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                               std::uint32_t>>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool GetLe(std::istream& in, T& value) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bits |= static_cast<U>(bytes[b]) << (8 * b);
  }
  value = std::bit_cast<T>(bits);
  return true;
}

Matrix<double> RowGram(const EncodedMatrix& enc, std::size_t i,
                       std::span<const std::uint32_t> nbrs) {
  const std::size_t m = nbrs.size();
  const std::size_t d = enc.dim();
  Matrix<double> diff(m, d);
  const auto xi = enc.row(i);
  for (std::size_t a = 0; a < m; ++a) {
    const auto xa = enc.row(nbrs[a]);
    for (std::size_t t = 0; t < d; ++t) diff(a, t) = xi[t] - xa[t];
  }
  Matrix<double> g(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) s += diff(a, t) * diff(b, t);
      g(a, b) = s;
      g(b, a) = s;
    }
  }
  return g;
}

double ResidualNorm(const EncodedMatrix& enc, std::size_t i,
                    std::span<const std::uint32_t> nbrs,
                    std::span<const double> w) {
  const auto xi = enc.row(i);
  double s = 0.0;
  for (std::size_t t = 0; t < enc.dim(); ++t) {
    double r = xi[t];
    for (std::size_t a = 0; a < nbrs.size(); ++a) r -= w[a] * enc.values(nbrs[a], t);
    s += r * r;
  }
  return s;
}

}  // namespace

NeighborLists KnnSearch(const EncodedMatrix& enc, std::size_t k) {
  const std::size_t n = enc.rows();
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "k-NN needs at least 2 rows");
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  const std::size_t kk = std::min(k, n - 1);
  NeighborLists out;
  out.k = kk;
  out.index = Matrix<std::uint32_t>(n, kk);
  ParallelFor(n, [&](std::size_t i) {
    std::vector<std::pair<double, std::uint32_t>> cand;
    cand.reserve(n - 1);
    const auto xi = enc.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back(SquaredDistance(xi, enc.row(j)),
                        static_cast<std::uint32_t>(j));
    }
    std::partial_sort(cand.begin(), cand.begin() + kk, cand.end());
    for (std::size_t a = 0; a < kk; ++a) out.index(i, a) = cand[a].second;
  });
  return out;
}

WeightGraph SolveWeights(const EncodedMatrix& enc, const NeighborLists& nbrs,
                         const SimplexQpOptions& options, GraphStats* stats) {
  const std::size_t n = enc.rows();
  if (nbrs.rows() != n) {
    throw Error(ErrorCode::kShapeMismatch, "neighbor lists do not match rows");
  }
  WeightGraph graph;
  graph.n = n;
  graph.k = nbrs.k;
  graph.neighbors = nbrs.index;
  graph.weights = Matrix<double>(n, nbrs.k);
  std::vector<double> gaps(n), residuals(n);
  std::vector<int> iterations(n);
  std::vector<char> degenerate(n);
  ParallelFor(n, [&](std::size_t i) {
    const auto row = nbrs.index.row(i);
    const SimplexQpResult r = SolveSimplexQp(RowGram(enc, i, row), options);
    std::copy(r.weights.begin(), r.weights.end(), graph.weights.row(i).begin());
    gaps[i] = r.gap;
    residuals[i] = r.kkt_residual;
    iterations[i] = r.iterations;
    degenerate[i] = r.degenerate;
  });
  if (stats != nullptr) {
    *stats = GraphStats{};
    for (std::size_t i = 0; i < n; ++i) {
      stats->max_gap = std::max(stats->max_gap, gaps[i]);
      stats->max_kkt_residual = std::max(stats->max_kkt_residual, residuals[i]);
      stats->degenerate_rows += degenerate[i] ? 1 : 0;
      stats->max_iterations_used = std::max<std::size_t>(
          stats->max_iterations_used, static_cast<std::size_t>(iterations[i]));
    }
  }
  return graph;
}

WeightGraph BuildGraph(const EncodedMatrix& enc, std::size_t k,
                       const SimplexQpOptions& options, GraphStats* stats) {
  return SolveWeights(enc, KnnSearch(enc, k), options, stats);
}

double RowObjective(const EncodedMatrix& enc, const WeightGraph& graph,
                    std::size_t i) {
  return ResidualNorm(enc, i, graph.neighbors.row(i), graph.weights.row(i));
}

double UniformRowObjective(const EncodedMatrix& enc, const WeightGraph& graph,
                           std::size_t i) {
  std::vector<double> w(graph.k, 1.0 / static_cast<double>(graph.k));
  return ResidualNorm(enc, i, graph.neighbors.row(i), w);
}

void ValidateGraph(const WeightGraph& graph, double tolerance) {
  if (graph.neighbors.rows() != graph.n || graph.weights.rows() != graph.n ||
      graph.neighbors.cols() != graph.k || graph.weights.cols() != graph.k) {
    throw Error(ErrorCode::kShapeMismatch, "graph arrays do not match n x k");
  }
  for (std::size_t i = 0; i < graph.n; ++i) {
    double sum = 0.0;
    std::vector<std::uint32_t> seen;
    for (std::size_t a = 0; a < graph.k; ++a) {
      const std::uint32_t j = graph.neighbors(i, a);
      const double w = graph.weights(i, a);
      if (j >= graph.n || j == i) {
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(i) + " has an invalid neighbor");
      }
      if (!(w >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(i) + " has a negative weight");
      }
      seen.push_back(j);
      sum += w;
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(i) + " repeats a neighbor");
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

Matrix<double> ToDense(const WeightGraph& graph) {
  Matrix<double> dense(graph.n, graph.n, 0.0);
  for (std::size_t i = 0; i < graph.n; ++i) {
    for (std::size_t a = 0; a < graph.k; ++a) {
      dense(i, graph.neighbors(i, a)) += graph.weights(i, a);
    }
  }
  return dense;
}

void SaveGraph(const WeightGraph& graph, std::uint64_t key,
               const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(kMagic, sizeof(kMagic));
    out.put(static_cast<char>(kGraphFileVersion));
    PutLe<std::uint64_t>(out, key);
    PutLe<std::uint64_t>(out, graph.n);
    PutLe<std::uint64_t>(out, graph.k);
    for (std::uint32_t j : graph.neighbors.data()) PutLe<std::uint32_t>(out, j);
    for (double w : graph.weights.data()) PutLe<double>(out, w);
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<WeightGraph> LoadGraph(const std::string& path,
                                     std::uint64_t key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    return std::nullopt;
  }
  const int version = in.get();
  if (version != kGraphFileVersion) return std::nullopt;
  std::uint64_t stored_key = 0, n = 0, k = 0;
  if (!GetLe(in, stored_key) || stored_key != key || !GetLe(in, n) ||
      !GetLe(in, k)) {
    return std::nullopt;
  }
  if (n > (1ULL << 32) || k > n) return std::nullopt;
  WeightGraph graph;
  graph.n = n;
  graph.k = k;
  graph.neighbors = Matrix<std::uint32_t>(n, k);
  graph.weights = Matrix<double>(n, k);
  for (std::uint32_t& j : graph.neighbors.data()) {
    if (!GetLe(in, j)) return std::nullopt;
  }
  for (double& w : graph.weights.data()) {
    if (!GetLe(in, w)) return std::nullopt;
  }
  if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
  try {
    ValidateGraph(graph);
  } catch (const Error&) {
    return std::nullopt;
  }
  return graph;
}

WeightGraph BuildGraphCached(const EncodedMatrix& enc, std::size_t k,
                             const std::string& cache_dir,
                             const SimplexQpOptions& options) {
  if (cache_dir.empty()) return BuildGraph(enc, k, options);
  ContentHash h;
  h.Update(enc.ContentKey());
  h.Update(static_cast<std::uint64_t>(k));
  h.Update(static_cast<std::uint64_t>(options.max_iterations));
  h.Update(options.tolerance);
  const std::uint64_t key = h.value();
  std::filesystem::create_directories(cache_dir);
  const std::string path =
      (std::filesystem::path(cache_dir) / ("graph_" + h.Hex() + ".bin")).string();
  if (auto cached = LoadGraph(path, key)) return *std::move(cached);
  WeightGraph graph = BuildGraph(enc, k, options);
  SaveGraph(graph, key, path);
  return graph;
}

}  // namespace cfl
