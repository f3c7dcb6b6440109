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

#include "cfl/propagate.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfl/error.h"
#include "cfl/hash.h"
#include "cfl/parallel.h"
#include "cfl/rng.h"
#include "json.hpp"

namespace cfl {
namespace {

using nlohmann::json;

constexpr std::uint64_t kCompStream = 0x434f4d50ULL;

bool Estimated(const std::vector<bool>& mask, std::size_t j) {
  return mask.empty() || (j < mask.size() && mask[j]);
}

void CheckShapes(std::span<const ConfidenceBlock> a,
                 std::span<const ConfidenceBlock> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "block lists differ in length");
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].rows() != b[j].rows() || a[j].values.cols() != b[j].values.cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "block " + std::to_string(j) + " differs in shape");
    }
  }
}

void CheckEstimateMask(const std::vector<bool>& mask, std::size_t num_cf) {
  if (!mask.empty() && mask.size() != num_cf) {
    throw Error(ErrorCode::kShapeMismatch, "estimate mask has " +
                                               std::to_string(mask.size()) +
                                               " entries for " +
                                               std::to_string(num_cf) + " CFs");
  }
}

// A code drawn uniformly from the complement of the observed value.
int RandomComplement(const CounterRng& rng, std::size_t i, std::size_t j,
                     int u, int observed) {
  int v = 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(u - 1), i, j));
  if (v >= observed) ++v;
  return v;
}

void FillRandomEstimates(const Dataset& ds, std::uint64_t seed,
                         const std::vector<bool>& mask, bool skipped_only,
                         Matrix<int>& estimates) {
  const CounterRng rng(seed, kCompStream);
  for (std::size_t j = 0; j < ds.schema.num_cf(); ++j) {
    if (skipped_only && Estimated(mask, j)) continue;
    for (std::size_t i = 0; i < ds.n; ++i) {
      estimates(i, j) =
          RandomComplement(rng, i, j, ds.cf_cardinality(j), ds.cf_observed(i, j));
    }
  }
}

std::string InputKey(const Dataset& ds, const EncodedMatrix& enc,
                     Method method, const Hyperparams& hyper,
                     std::uint64_t seed) {
  ContentHash h;
  h.Update(MethodName(method));
  h.Update(enc.ContentKey());
  h.Update(static_cast<std::uint64_t>(ds.n));
  for (int v : ds.cf_observed.data()) h.Update(static_cast<std::uint64_t>(v));
  h.Update(static_cast<std::uint64_t>(hyper.T));
  h.Update(static_cast<std::uint64_t>(hyper.k));
  h.Update(hyper.gamma);
  h.Update(hyper.alpha);
  h.Update(seed);
  return h.Hex();
}

void RequireObserved(const Dataset& ds) {
  if (!ds.has_observed() && ds.n > 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "complementary observations have not been synthesized");
  }
}

std::vector<ConfidenceBlock> Subset(std::span<const ConfidenceBlock> blocks,
                                    const std::vector<bool>& mask) {
  std::vector<ConfidenceBlock> out;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (Estimated(mask, j)) out.push_back(blocks[j]);
  }
  return out;
}

void Scatter(std::vector<ConfidenceBlock> part, const std::vector<bool>& mask,
             std::vector<ConfidenceBlock>& all) {
  std::size_t a = 0;
  for (std::size_t j = 0; j < all.size(); ++j) {
    if (Estimated(mask, j)) all[j] = std::move(part[a++]);
  }
}

std::vector<ConfidenceBlock> IpalRounds(const WeightGraph& graph,
                                        std::span<const ConfidenceBlock> init,
                                        int T, double alpha) {
  std::vector<ConfidenceBlock> q(init.begin(), init.end());
  for (int t = 0; t < T; ++t) {
    q = PropagateStep(graph, q);
    for (std::size_t j = 0; j < q.size(); ++j) {
      auto& v = q[j].values.data();
      const auto& v0 = init[j].values.data();
      for (std::size_t e = 0; e < v.size(); ++e) {
        v[e] = alpha * v[e] + (1.0 - alpha) * v0[e];
      }
      NormalizeRows(q[j]);
    }
  }
  return q;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kProposed: return "proposed";
    case Method::kComp: return "comp";
    case Method::kIpal: return "ipal";
  }
  return "";
}

Method ParseMethod(std::string_view name) {
  if (name == "proposed") return Method::kProposed;
  if (name == "comp") return Method::kComp;
  if (name == "ipal") return Method::kIpal;
  throw Error(ErrorCode::kConfig, "unknown method '" + std::string(name) + "'");
}

std::vector<ConfidenceBlock> InitMarginal(const Dataset& ds) {
  RequireObserved(ds);
  std::vector<ConfidenceBlock> blocks;
  for (std::size_t j = 0; j < ds.schema.num_cf(); ++j) {
    const int u = ds.cf_cardinality(j);
    ConfidenceBlock b{j, Matrix<double>(ds.n, u, 1.0 / (u - 1))};
    for (std::size_t i = 0; i < ds.n; ++i) b.values(i, ds.cf_observed(i, j) - 1) = 0.0;
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<ConfidenceBlock> PropagateStep(
    const WeightGraph& graph, std::span<const ConfidenceBlock> blocks) {
  std::vector<ConfidenceBlock> out;
  for (const ConfidenceBlock& b : blocks) {
    if (b.rows() != graph.n) {
      throw Error(ErrorCode::kShapeMismatch,
                  "graph has " + std::to_string(graph.n) + " rows, block has " +
                      std::to_string(b.rows()));
    }
    out.push_back({b.cf_index, Matrix<double>(b.rows(), b.values.cols(), 0.0)});
  }
  ParallelFor(graph.n, [&](std::size_t i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      auto dst = out[j].values.row(i);
      for (std::size_t a = 0; a < graph.k; ++a) {
        const double w = graph.weights(i, a);
        const auto src = blocks[j].values.row(graph.neighbors(i, a));
        for (std::size_t v = 0; v < dst.size(); ++v) dst[v] += w * src[v];
      }
      double sum = 0.0;
      for (double x : dst) sum += x;
      if (sum > 0.0) {
        for (double& x : dst) x /= sum;
      }
    }
  });
  return out;
}

std::vector<ConfidenceBlock> Correct(std::span<const ConfidenceBlock> blocks,
                                     std::span<const ConfidenceBlock> init) {
  CheckShapes(blocks, init);
  std::vector<ConfidenceBlock> out(blocks.begin(), blocks.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < out[j].rows(); ++i) {
      auto row = out[j].values.row(i);
      const auto anchor = init[j].values.row(i);
      double sum = 0.0;
      for (std::size_t v = 0; v < row.size(); ++v) {
        row[v] = anchor[v] == 0.0 ? 0.0 : row[v] * anchor[v];
        sum += row[v];
      }
      if (sum > 0.0) {
        for (double& x : row) x /= sum;
      } else {
        std::copy(anchor.begin(), anchor.end(), row.begin());
      }
    }
  }
  return out;
}

std::vector<ConfidenceBlock> RunSingleRound(
    const WeightGraph& graph, std::vector<ConfidenceBlock> start,
    std::span<const ConfidenceBlock> init, int T, bool correct) {
  for (int t = 0; t < T; ++t) {
    start = PropagateStep(graph, start);
    if (correct) start = Correct(start, init);
  }
  return start;
}

Matrix<int> HardEstimates(std::span<const ConfidenceBlock> blocks) {
  const std::size_t n = blocks.empty() ? 0 : blocks.front().rows();
  Matrix<int> out(n, blocks.size());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const std::vector<int> codes = ArgmaxCodes(blocks[j]);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = codes[i];
  }
  return out;
}

EstimationResult RunProposed(const Dataset& ds, const EncodedMatrix& enc_of,
                             const ProposedOptions& options) {
  RequireObserved(ds);
  CheckEstimateMask(options.estimate, ds.schema.num_cf());
  if (options.T < 1 || options.k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "T and k must be positive");
  }
  if (enc_of.rows() != ds.n) {
    throw Error(ErrorCode::kShapeMismatch, "encoding rows do not match dataset");
  }
  const std::vector<ConfidenceBlock> init = InitMarginal(ds);
  const std::vector<ConfidenceBlock> init_sel = Subset(init, options.estimate);

  const WeightGraph g1 = BuildGraphCached(enc_of, options.k, options.graph_cache_dir);
  std::vector<ConfidenceBlock> q1 =
      RunSingleRound(g1, init_sel, init_sel, options.T, options.correct);

  const EncodedMatrix enc2 = EncodeWithConfidence(enc_of, q1, options.gamma);
  const WeightGraph g2 = BuildGraphCached(enc2, options.k, options.graph_cache_dir);
  std::vector<ConfidenceBlock> start =
      options.round2 == Round2Start::kRestart ? init_sel : q1;
  std::vector<ConfidenceBlock> q2 =
      RunSingleRound(g2, std::move(start), init_sel, options.T, options.correct);

  EstimationResult result;
  result.method = Method::kProposed;
  result.hyper = {options.T, options.k, options.gamma, Hyperparams{}.alpha};
  result.seed = options.seed;
  result.confidences = init;
  Scatter(std::move(q2), options.estimate, result.confidences);
  result.hard_estimates = HardEstimates(result.confidences);
  FillRandomEstimates(ds, options.seed, options.estimate, true,
                      result.hard_estimates);
  result.input_key =
      InputKey(ds, enc_of, result.method, result.hyper, options.seed);
  return result;
}

EstimationResult RunComp(const Dataset& ds, std::uint64_t seed) {
  EstimationResult result;
  result.method = Method::kComp;
  result.seed = seed;
  result.confidences = InitMarginal(ds);
  result.hard_estimates = Matrix<int>(ds.n, ds.schema.num_cf());
  FillRandomEstimates(ds, seed, {}, false, result.hard_estimates);
  ContentHash h;
  h.Update(MethodName(result.method));
  for (int v : ds.cf_observed.data()) h.Update(static_cast<std::uint64_t>(v));
  h.Update(seed);
  result.input_key = h.Hex();
  return result;
}

EstimationResult RunIpal(const Dataset& ds, const EncodedMatrix& enc_of,
                         const IpalOptions& options) {
  RequireObserved(ds);
  CheckEstimateMask(options.estimate, ds.schema.num_cf());
  if (!(options.alpha >= 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in [0,1)");
  }
  if (options.T < 1 || options.k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "T and k must be positive");
  }
  const std::vector<ConfidenceBlock> init = InitMarginal(ds);
  const std::vector<ConfidenceBlock> init_sel = Subset(init, options.estimate);
  const WeightGraph g = BuildGraphCached(enc_of, options.k, options.graph_cache_dir);

  EstimationResult result;
  result.method = Method::kIpal;
  result.hyper = {options.T, options.k, Hyperparams{}.gamma, options.alpha};
  result.seed = options.seed;
  result.confidences = init;
  Scatter(IpalRounds(g, init_sel, options.T, options.alpha), options.estimate,
          result.confidences);
  result.hard_estimates = HardEstimates(result.confidences);
  FillRandomEstimates(ds, options.seed, options.estimate, true,
                      result.hard_estimates);
  result.input_key =
      InputKey(ds, enc_of, result.method, result.hyper, options.seed);
  return result;
}

EstimationResult RunIpalTransfer(const Dataset& ds, const EncodedMatrix& enc_of,
                                 std::span<const std::size_t> train,
                                 const IpalOptions& options) {
  RequireObserved(ds);
  const Dataset train_ds = SelectRows(ds, train);
  EncodedMatrix train_enc;
  train_enc.blocks = enc_of.blocks;
  train_enc.values = Matrix<double>(train.size(), enc_of.dim());
  std::vector<char> is_train(ds.n, 0);
  for (std::size_t a = 0; a < train.size(); ++a) {
    is_train.at(train[a]) = 1;
    const auto src = enc_of.row(train[a]);
    std::copy(src.begin(), src.end(), train_enc.values.row(a).begin());
  }
  const EstimationResult fitted = RunIpal(train_ds, train_enc, options);

  EstimationResult result;
  result.method = Method::kIpal;
  result.hyper = fitted.hyper;
  result.seed = options.seed;
  result.confidences = InitMarginal(ds);
  result.hard_estimates = Matrix<int>(ds.n, ds.schema.num_cf());
  for (std::size_t a = 0; a < train.size(); ++a) {
    for (std::size_t j = 0; j < ds.schema.num_cf(); ++j) {
      auto dst = result.confidences[j].values.row(train[a]);
      const auto src = fitted.confidences[j].values.row(a);
      std::copy(src.begin(), src.end(), dst.begin());
      result.hard_estimates(train[a], j) = fitted.hard_estimates(a, j);
    }
  }
  ParallelFor(ds.n, [&](std::size_t i) {
    if (is_train[i]) return;
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t a = 0; a < train.size(); ++a) {
      const double d = SquaredDistance(enc_of.row(i), train_enc.row(a));
      if (d < best) {
        best = d;
        nearest = a;
      }
    }
    for (std::size_t j = 0; j < ds.schema.num_cf(); ++j) {
      const int code = fitted.hard_estimates(nearest, j);
      if (!Estimated(options.estimate, j)) {
        const CounterRng rng(options.seed, kCompStream);
        result.hard_estimates(i, j) = RandomComplement(
            rng, i, j, ds.cf_cardinality(j), ds.cf_observed(i, j));
        continue;
      }
      auto row = result.confidences[j].values.row(i);
      std::fill(row.begin(), row.end(), 0.0);
      row[code - 1] = 1.0;
      result.hard_estimates(i, j) = code;
    }
  });
  result.input_key = InputKey(ds, enc_of, result.method, result.hyper,
                              options.seed ^ train.size());
  return result;
}

std::string ToJson(const EstimationResult& result, bool include_confidences) {
  json j;
  j["method"] = std::string(MethodName(result.method));
  j["hyperparams"] = {{"T", result.hyper.T},
                      {"k", result.hyper.k},
                      {"gamma", result.hyper.gamma},
                      {"alpha", result.hyper.alpha}};
  j["seed"] = result.seed;
  j["input_key"] = result.input_key;
  j["n"] = result.hard_estimates.rows();
  j["num_cf"] = result.hard_estimates.cols();
  json hard = json::array();
  for (std::size_t i = 0; i < result.hard_estimates.rows(); ++i) {
    const auto row = result.hard_estimates.row(i);
    hard.push_back(std::vector<int>(row.begin(), row.end()));
  }
  j["hard_estimates"] = std::move(hard);
  if (include_confidences) {
    json blocks = json::array();
    for (const ConfidenceBlock& b : result.confidences) {
      blocks.push_back({{"cf_index", b.cf_index},
                        {"rows", b.rows()},
                        {"cols", b.values.cols()},
                        {"values", b.values.data()}});
    }
    j["confidences"] = std::move(blocks);
  }
  return j.dump();
}

EstimationResult EstimationFromJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    EstimationResult r;
    r.method = ParseMethod(j.at("method").get<std::string>());
    const json& h = j.at("hyperparams");
    r.hyper = {h.at("T").get<int>(), h.at("k").get<int>(),
               h.at("gamma").get<double>(), h.at("alpha").get<double>()};
    r.seed = j.at("seed").get<std::uint64_t>();
    r.input_key = j.at("input_key").get<std::string>();
    const auto n = j.at("n").get<std::size_t>();
    const auto f = j.at("num_cf").get<std::size_t>();
    r.hard_estimates = Matrix<int>(n, f);
    const json& hard = j.at("hard_estimates");
    if (hard.size() != n) throw Error(ErrorCode::kShapeMismatch, "hard_estimates");
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = hard[i].get<std::vector<int>>();
      if (row.size() != f) throw Error(ErrorCode::kShapeMismatch, "hard_estimates");
      std::copy(row.begin(), row.end(), r.hard_estimates.row(i).begin());
    }
    if (j.contains("confidences")) {
      for (const json& b : j["confidences"]) {
        ConfidenceBlock block;
        block.cf_index = b.at("cf_index").get<std::size_t>();
        block.values = Matrix<double>(b.at("rows").get<std::size_t>(),
                                      b.at("cols").get<std::size_t>());
        const auto values = b.at("values").get<std::vector<double>>();
        if (values.size() != block.values.data().size()) {
          throw Error(ErrorCode::kShapeMismatch, "confidence block size");
        }
        block.values.data() = values;
        r.confidences.push_back(std::move(block));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("estimation JSON: ") + e.what());
  }
}

}  // namespace cfl
