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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cfl/error.h"
#include "cfl/parallel.h"
#include "experiment.h"

namespace {

int ExitCodeFor(cfl::ErrorCode code) {
  switch (code) {
    case cfl::ErrorCode::kConfig:
    case cfl::ErrorCode::kInvalidArgument:
      return cfl::cli::kExitConfig;
    default:
      return cfl::cli::kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using cfl::cli::ExperimentConfig;
  ExperimentConfig config;
  CLI::App app{"Complementary feature learning: estimation, evaluation and "
               "verification"};
  app.set_config("--config", "", "Flat key = value config file; flags win");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--data", config.data, "CSV table");
  app.add_option("--schema", config.schema, "Schema file");
  app.add_option("--seed", config.seeds, "Trial seeds")->expected(1, -1);
  app.add_option("--method", config.methods, "proposed, comp, ipal")
      ->expected(1, -1);
  app.add_option("--T", config.T, "Propagation iterations per round");
  app.add_option("--k", config.k, "Neighbors per instance");
  app.add_option("--gamma", config.gamma, "Second-round confidence weight");
  app.add_option("--alpha", config.alpha, "IPAL balancing coefficient");
  app.add_option("--round2", config.round2, "restart or continue");
  app.add_option("--split", config.split, "Training fraction for predict");
  app.add_option("--max-n", config.max_n, "Seeded subsample size (0 = all)");
  app.add_option("--estimate-only", config.estimate_only,
                 "CF names to estimate; others keep initial confidences")
      ->expected(1, -1);
  app.add_option("--mode", config.modes, "ord, comp, soft, hard")
      ->expected(1, -1);
  app.add_option("--out", config.out, "Output directory");
  app.add_option("--epochs", config.epochs, "LR epochs");
  app.add_option("--l2", config.l2, "LR l2 strength");
  app.add_option("--axis", config.axis, "Sweep axis: T, k or gamma");
  app.add_option("--values", config.values, "Sweep values")->expected(1, -1);
  app.add_flag("--dump-confidences", config.dump_confidences,
               "Store confidence matrices with estimates");
  app.add_flag("--export-design", config.export_design,
               "Write LR design matrices as CSV");
  app.add_option("--graph-cache", config.graph_cache, "Graph cache directory");
  app.add_option("--threads", config.threads, "Worker threads (0 = hardware)");
  app.add_option("--joint-instances", config.joint_instances);
  app.add_option("--monotone-instances", config.monotone_instances);
  app.add_option("--bound-instances", config.bound_instances);

  auto* prepare = app.add_subcommand("prepare", "Load, subsample, synthesize CFs");
  auto* estimate = app.add_subcommand("estimate", "Estimate exact CF values");
  auto* evaluate = app.add_subcommand("evaluate", "Acc / F1 / CE / SE table");
  auto* predict = app.add_subcommand("predict", "Downstream LR label prediction");
  auto* oracle = app.add_subcommand("oracle", "Brute-force verification suites");
  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep of proposed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cfl::cli::kExitConfig;
  }

  try {
    cfl::SetDefaultThreads(config.threads);
    if (*prepare) return cfl::cli::CmdPrepare(config);
    if (*estimate) return cfl::cli::CmdEstimate(config);
    if (*evaluate) return cfl::cli::CmdEvaluate(config);
    if (*predict) return cfl::cli::CmdPredict(config);
    if (*oracle) return cfl::cli::CmdOracle(config);
    if (*sweep) return cfl::cli::CmdSweep(config);
  } catch (const cfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfl::cli::kExitData;
  }
  return cfl::cli::kExitConfig;
}
