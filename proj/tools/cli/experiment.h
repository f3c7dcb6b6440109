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

#ifndef CFL_TOOLS_CLI_EXPERIMENT_H_
#define CFL_TOOLS_CLI_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cfl/dataset.h"
#include "cfl/metrics.h"
#include "cfl/predictor.h"
#include "cfl/preprocess.h"
#include "cfl/propagate.h"

namespace cfl::cli {

// Exit codes of the cfl binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitVerification = 4;

struct ExperimentConfig {
  std::string data;
  std::string schema;
  std::vector<std::uint64_t> seeds = {0};
  std::vector<std::string> methods = {"proposed"};
  int T = 100;
  int k = 20;
  double gamma = 0.25;
  double alpha = 0.9;
  std::string round2 = "restart";
  double split = 0.5;
  std::size_t max_n = 0;  // 0 keeps every row
  std::vector<std::string> estimate_only;  // CF names; empty means all
  std::vector<std::string> modes = {"ord", "comp", "soft", "hard"};
  std::string out = "cfl_out";
  int epochs = 500;
  double l2 = 1e-4;
  std::string axis;
  std::vector<double> values;
  bool dump_confidences = false;
  bool export_design = false;
  std::string graph_cache;
  unsigned threads = 0;
  // Oracle suite sizes.
  int joint_instances = 200;
  int monotone_instances = 100;
  int bound_instances = 10000;
};

// Checks ranges and names; throws Error(kConfig).
void ValidateConfig(const ExperimentConfig& config);

// Config as JSON text (sorted keys).
std::string ConfigJson(const ExperimentConfig& config);

// Full table with vocabularies resolved, before subsampling.
Dataset LoadBase(const ExperimentConfig& config);

// Seeded subsample followed by seeded CF synthesis.
Dataset TrialDataset(const Dataset& base, const ExperimentConfig& config,
                     std::uint64_t seed);

std::vector<bool> EstimateMask(const FeatureSchema& schema,
                               const std::vector<std::string>& names);

// Runs one method on one prepared trial.
EstimationResult Estimate(const Dataset& ds, const EncodedMatrix& enc,
                          Method method, const ExperimentConfig& config,
                          std::uint64_t seed);

struct EvaluateRow {
  std::string method;
  std::vector<std::vector<CfScore>> per_seed;  // [seed][cf]
};

// Scores of every configured method over every seed.
std::vector<EvaluateRow> EvaluateAll(const Dataset& base,
                                     const ExperimentConfig& config);

// Report JSON. `generated_at` is the only nondeterministic field.
std::string EvaluateReportJson(const std::vector<EvaluateRow>& rows,
                               const Dataset& base,
                               const ExperimentConfig& config,
                               const std::string& generated_at);
std::string EvaluateReportText(const std::vector<EvaluateRow>& rows,
                               const Dataset& base);

struct PredictCell {
  std::string method;
  std::string mode;
  std::vector<double> macro_f1;     // per seed, test split
  std::vector<double> positive_f1;  // per seed, test split
};

std::vector<PredictCell> PredictAll(const Dataset& base,
                                    const ExperimentConfig& config);

// Removes the top-level "generated_at" key from a report.
std::string StripTimestamp(const std::string& report_json);

std::string Timestamp();

// Subcommand entry points; each returns an exit code.
int CmdPrepare(const ExperimentConfig& config);
int CmdEstimate(const ExperimentConfig& config);
int CmdEvaluate(const ExperimentConfig& config);
int CmdPredict(const ExperimentConfig& config);
int CmdOracle(const ExperimentConfig& config);
int CmdSweep(const ExperimentConfig& config);

}  // namespace cfl::cli

#endif  // CFL_TOOLS_CLI_EXPERIMENT_H_
