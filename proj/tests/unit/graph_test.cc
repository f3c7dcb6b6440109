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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

#include <unistd.h>

#include "cfl/error.h"
#include "cfl/graph.h"
#include "cfl/parallel.h"
#include "cfl/rng.h"
#include "cfl/simplex.h"
#include "test_util.h"

namespace cfl {
namespace {

using testing::FromRows;
using testing::RandomPoints;

// All-pairs sort by (squared distance, index).
std::vector<std::vector<std::uint32_t>> BruteKnn(const EncodedMatrix& enc,
                                                 std::size_t k) {
  const std::size_t n = enc.rows();
  std::vector<std::vector<std::uint32_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::uint32_t>> all;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      double d = 0.0;
      for (std::size_t t = 0; t < enc.dim(); ++t) {
        const double diff = enc.values(i, t) - enc.values(a, t);
        d += diff * diff;
      }
      all.emplace_back(d, static_cast<std::uint32_t>(a));
    }
    std::sort(all.begin(), all.end());
    for (std::size_t r = 0; r < std::min(k, n - 1); ++r) out[i].push_back(all[r].second);
  }
  return out;
}

std::vector<std::uint32_t> RowOf(const NeighborLists& nb, std::size_t i) {
  auto r = nb.index.row(i);
  return {r.begin(), r.end()};
}

TEST(KnnTest, TwoRows) {
  const NeighborLists nb = KnnSearch(FromRows({{0.0}, {1.0}}), 5);
  EXPECT_EQ(nb.k, 1u);
  EXPECT_EQ(nb.index(0, 0), 1u);
  EXPECT_EQ(nb.index(1, 0), 0u);
}

TEST(KnnTest, CollinearPoints) {
  const NeighborLists nb = KnnSearch(FromRows({{0.0}, {1.0}, {10.0}}), 1);
  EXPECT_EQ(nb.index(0, 0), 1u);
  EXPECT_EQ(nb.index(1, 0), 0u);
  EXPECT_EQ(nb.index(2, 0), 1u);
}

TEST(KnnTest, TiesBreakByAscendingIndex) {
  const NeighborLists nb = KnnSearch(FromRows({{0.0}, {1.0}, {-1.0}, {1.0}}), 2);
  EXPECT_EQ(RowOf(nb, 0), (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(RowOf(nb, 1), (std::vector<std::uint32_t>{3, 0}));
}

TEST(KnnTest, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const EncodedMatrix enc = RandomPoints(100, 4, seed);
    const NeighborLists nb = KnnSearch(enc, 20);
    const auto oracle = BruteKnn(enc, 20);
    for (std::size_t i = 0; i < 100; ++i) ASSERT_EQ(RowOf(nb, i), oracle[i]);
  }
}

TEST(KnnTest, MatchesOracleWithManyTies) {
  // Integer grid coordinates create many equal distances.
  RngStream rng(3);
  std::vector<std::vector<double>> rows(80, std::vector<double>(2));
  for (auto& r : rows) {
    for (double& v : r) v = static_cast<double>(rng.Below(4));
  }
  const EncodedMatrix enc = FromRows(rows);
  const NeighborLists nb = KnnSearch(enc, 7);
  const auto oracle = BruteKnn(enc, 7);
  for (std::size_t i = 0; i < 80; ++i) ASSERT_EQ(RowOf(nb, i), oracle[i]);
}

TEST(KnnTest, Preconditions) {
  EXPECT_THROW(KnnSearch(FromRows({{0.0}}), 1), Error);
  EXPECT_THROW(KnnSearch(FromRows({{0.0}, {1.0}}), 0), Error);
}

TEST(SimplexTest, ProjectionIsOntoSimplex) {
  RngStream rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(6);
    for (double& x : v) x = 4.0 * rng.Normal();
    ProjectOntoSimplex(v);
    double s = 0.0;
    for (double x : v) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
  std::vector<double> inside = {0.2, 0.3, 0.5};
  ProjectOntoSimplex(inside);
  EXPECT_NEAR(inside[0], 0.2, 1e-15);
  EXPECT_NEAR(inside[2], 0.5, 1e-15);
}

// Enumerates the simplex grid with the given number of steps.
void GridSearch(int dims, int steps, std::vector<int>& cur, int remaining,
                const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(cur.size()) == dims - 1) {
    cur.push_back(remaining);
    visit(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= remaining; ++a) {
    cur.push_back(a);
    GridSearch(dims, steps, cur, remaining - a, visit);
    cur.pop_back();
  }
}

TEST(SolveWeightsTest, MatchesGridSearchOracle) {
  constexpr int kSteps = 50;  // step 0.02
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const EncodedMatrix enc = RandomPoints(6, 3, 100 + seed);
    const NeighborLists nb = KnnSearch(enc, 5);
    GraphStats stats;
    const WeightGraph g = SolveWeights(enc, nb, {}, &stats);
    const std::size_t i = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> cur;
    GridSearch(5, kSteps, cur, kSteps, [&](const std::vector<int>& w) {
      double r2 = 0.0;
      for (std::size_t t = 0; t < 3; ++t) {
        double x = enc.values(i, t);
        for (std::size_t a = 0; a < 5; ++a) {
          x -= (w[a] / static_cast<double>(kSteps)) * enc.values(nb.index(i, a), t);
        }
        r2 += x * x;
      }
      best = std::min(best, r2);
    });
    const double solver = RowObjective(enc, g, i);
    EXPECT_LE(solver, best + 1e-12);
    EXPECT_NEAR(solver, best, 1e-3);
    EXPECT_LE(stats.max_kkt_residual, 1e-6);
  }
}

TEST(SolveWeightsTest, CoincidentNeighborGetsAllWeight) {
  const EncodedMatrix enc = FromRows({{0, 0}, {0, 0.0}, {1, 0}, {0, 2}});
  const WeightGraph g = BuildGraph(enc, 3);
  for (std::size_t a = 0; a < 3; ++a) {
    if (g.neighbors(0, a) == 1) {
      EXPECT_NEAR(g.weights(0, a), 1.0, 1e-9);
    } else {
      EXPECT_NEAR(g.weights(0, a), 0.0, 1e-9);
    }
  }
  EXPECT_NEAR(RowObjective(enc, g, 0), 0.0, 1e-16);
}

TEST(SolveWeightsTest, MidpointGetsEqualWeights) {
  const EncodedMatrix enc = FromRows({{0, 0}, {1, 2}, {-1, -2}, {5, -7}});
  const WeightGraph g = BuildGraph(enc, 2);
  EXPECT_NEAR(g.weights(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(g.weights(0, 1), 0.5, 1e-9);
}

TEST(SolveWeightsTest, DuplicateDatasetGivesUniformWeights) {
  const EncodedMatrix enc = FromRows(std::vector<std::vector<double>>(8, {0.3, 0.7}));
  GraphStats stats;
  const WeightGraph g = BuildGraph(enc, 4, {}, &stats);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(g.weights(i, a), 0.25);
  }
  EXPECT_EQ(stats.degenerate_rows, 8u);
}

TEST(BuildGraphTest, InvariantsOnSyntheticData) {
  const EncodedMatrix enc = RandomPoints(500, 3, 9);
  GraphStats stats;
  const WeightGraph g = BuildGraph(enc, 20, {}, &stats);
  EXPECT_NO_THROW(ValidateGraph(g, 1e-10));
  for (std::size_t i = 0; i < g.n; ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < g.k; ++a) {
      EXPECT_GE(g.weights(i, a), 0.0);
      EXPECT_NE(g.neighbors(i, a), i);
      s += g.weights(i, a);
    }
    EXPECT_NEAR(s, 1.0, 1e-10);
    EXPECT_LE(RowObjective(enc, g, i), UniformRowObjective(enc, g, i));
  }
  EXPECT_LE(stats.max_kkt_residual, 1e-6);
}

TEST(BuildGraphTest, PermutationEquivariance) {
  const std::size_t n = 120;
  const EncodedMatrix enc = RandomPoints(n, 3, 4);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(8);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);
  // Row r of the permuted matrix is row perm[r] of the original.
  std::vector<std::vector<double>> rows(n);
  std::vector<std::uint32_t> inverse(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto src = enc.row(perm[r]);
    rows[r].assign(src.begin(), src.end());
    inverse[perm[r]] = static_cast<std::uint32_t>(r);
  }
  const WeightGraph a = BuildGraph(enc, 10);
  const WeightGraph b = BuildGraph(FromRows(rows), 10);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = perm[r];
    for (std::size_t s = 0; s < 10; ++s) {
      EXPECT_EQ(b.neighbors(r, s), inverse[a.neighbors(i, s)]);
      EXPECT_NEAR(b.weights(r, s), a.weights(i, s), 1e-12);
    }
  }
}

TEST(BuildGraphTest, IndependentOfThreadCount) {
  const EncodedMatrix enc = RandomPoints(300, 5, 2);
  SetDefaultThreads(1);
  const WeightGraph one = BuildGraph(enc, 12);
  SetDefaultThreads(4);
  const WeightGraph four = BuildGraph(enc, 12);
  SetDefaultThreads(0);
  EXPECT_EQ(one, four);
  EXPECT_EQ(BuildGraph(enc, 12), one);
}

TEST(ValidateGraphTest, RejectsBrokenGraphs) {
  WeightGraph g = BuildGraph(RandomPoints(10, 2, 0), 3);
  WeightGraph self = g;
  self.neighbors(2, 0) = 2;
  EXPECT_THROW(ValidateGraph(self), Error);
  WeightGraph neg = g;
  neg.weights(1, 0) = -0.1;
  EXPECT_THROW(ValidateGraph(neg), Error);
  WeightGraph sum = g;
  sum.weights(1, 0) += 1e-6;
  EXPECT_THROW(ValidateGraph(sum), Error);
  WeightGraph dup = g;
  dup.neighbors(4, 1) = dup.neighbors(4, 0);
  EXPECT_THROW(ValidateGraph(dup), Error);
}

TEST(ToDenseTest, RowStochasticZeroDiagonal) {
  const WeightGraph g = BuildGraph(RandomPoints(15, 2, 1), 4);
  const Matrix<double> h = ToDense(g);
  for (std::size_t i = 0; i < 15; ++i) {
    EXPECT_EQ(h(i, i), 0.0);
    double s = 0.0;
    for (std::size_t a = 0; a < 15; ++a) s += h(i, a);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

class GraphCacheTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cfl_graph_cache_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(GraphCacheTest, SaveLoadRoundTrip) {
  std::filesystem::create_directories(dir_);
  const WeightGraph g = BuildGraph(RandomPoints(40, 3, 0), 6);
  const std::string path = (dir_ / "g.bin").string();
  SaveGraph(g, 1234, path);
  const auto back = LoadGraph(path, 1234);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, g);
  EXPECT_FALSE(LoadGraph(path, 999).has_value());
  EXPECT_FALSE(LoadGraph((dir_ / "missing.bin").string(), 1234).has_value());

  // File starts with the magic and version byte.
  std::ifstream in(path, std::ios::binary);
  char magic[9] = {};
  in.read(magic, 8);
  EXPECT_EQ(std::string(magic), "CFLGRAPH");
  EXPECT_EQ(in.get(), kGraphFileVersion);
}

TEST_F(GraphCacheTest, CorruptFilesAreRejected) {
  std::filesystem::create_directories(dir_);
  const WeightGraph g = BuildGraph(RandomPoints(20, 2, 1), 4);
  const std::string path = (dir_ / "g.bin").string();
  SaveGraph(g, 7, path);
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.put('x');
  }
  EXPECT_FALSE(LoadGraph(path, 7).has_value());
  SaveGraph(g, 7, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_FALSE(LoadGraph(path, 7).has_value());
}

TEST_F(GraphCacheTest, CachedBuildReusesFile) {
  const EncodedMatrix enc = RandomPoints(60, 3, 5);
  const WeightGraph first = BuildGraphCached(enc, 8, dir_.string());
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    ++files;
    EXPECT_EQ(e.path().extension(), ".bin");
  }
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(BuildGraphCached(enc, 8, dir_.string()), first);
  EXPECT_EQ(first, BuildGraph(enc, 8));
  BuildGraphCached(enc, 9, dir_.string());
  files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir_)) ++files;
  EXPECT_EQ(files, 2u);
}

}  // namespace
}  // namespace cfl
