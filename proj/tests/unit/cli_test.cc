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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "cfl/dataset.h"
#include "cfl/propagate.h"
#include "experiment.h"
#include "json.hpp"
#include "test_util.h"

namespace cfl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cfl_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fixture_ = " --data " + testing::DataPath("fixture20.csv") + " --schema " +
               testing::DataPath("fixture20.schema");
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI and returns its exit status; output goes to a log file.
  int Run(const std::string& args) {
    const std::string cmd = std::string(CFL_CLI_PATH) + " " + args + " > " +
                            (dir_ / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Out(const std::string& name) const { return (dir_ / name).string(); }

  // A 200-row table with two CFs and a learnable label, written as CSV.
  void WriteRandomTable() {
    Dataset ds = testing::RandomDataset(200, {3, 4}, 2, 5);
    for (std::size_t i = 0; i < ds.n; ++i) {
      ds.labels[i] = ds.of_values[0].real[i] + 0.3 * (*ds.cf_truth)(i, 0) > 1.1 ? 2 : 1;
    }
    std::ofstream csv(Out("table.csv"));
    WriteCsv(ds, csv);
    std::ofstream schema(Out("table.schema"));
    schema << ds.schema.ToText();
  }

  fs::path dir_;
  std::string fixture_;
};

TEST_F(CliTest, PrepareManifestIsStable) {
  ASSERT_EQ(Run("prepare" + fixture_ + " --seed 0 1 --out " + Out("a")), 0);
  ASSERT_EQ(Run("prepare" + fixture_ + " --seed 0 1 --out " + Out("b")), 0);
  const json a = json::parse(ReadFile(Out("a/prepared/manifest.json")));
  const json b = json::parse(ReadFile(Out("b/prepared/manifest.json")));
  EXPECT_EQ(a.at("files"), b.at("files"));
  EXPECT_EQ(a.at("inputs"), b.at("inputs"));
  EXPECT_EQ(a.at("rows").at("seed0"), 20);
  EXPECT_EQ(ReadFile(Out("a/prepared/seed1/observed.csv")),
            ReadFile(Out("b/prepared/seed1/observed.csv")));
  EXPECT_NE(ReadFile(Out("a/prepared/seed0/observed.csv")),
            ReadFile(Out("a/prepared/seed1/observed.csv")));
}

TEST_F(CliTest, CompEvaluationReproducesAnalyticRows) {
  ASSERT_EQ(Run("estimate" + fixture_ + " --method comp --seed 0 1 2 --out " + Out("o")), 0);
  ASSERT_EQ(Run("evaluate" + fixture_ + " --method comp --seed 0 1 2 --out " + Out("o")), 0);
  const json report = json::parse(ReadFile(Out("o/evaluate.json")));
  const json& comp = report.at("results").at("comp");
  EXPECT_NEAR(comp.at("marital").at("ce").at("mean").get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(comp.at("marital").at("se").at("mean").get<double>(), std::log(2.0), 1e-12);
  EXPECT_NEAR(comp.at("education").at("ce").at("mean").get<double>(), std::log(3.0), 1e-12);
  EXPECT_NEAR(comp.at("education").at("se").at("std").get<double>(), 0.0, 1e-12);
  EXPECT_NE(ReadFile(Out("o/evaluate.txt")).find("0.6931 ±0.0000"), std::string::npos);
}

TEST_F(CliTest, EvaluateIsDeterministicModuloTimestamp) {
  const std::string args =
      "evaluate" + fixture_ + " --method proposed ipal comp --seed 0 1 --T 10 --k 5 --out ";
  ASSERT_EQ(Run(args + Out("a")), 0);
  const std::string first = ReadFile(Out("a/evaluate.json"));
  fs::remove_all(Out("a"));
  ASSERT_EQ(Run(args + Out("a")), 0);
  const std::string second = ReadFile(Out("a/evaluate.json"));
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(cli::StripTimestamp(first), cli::StripTimestamp(second));
  EXPECT_EQ(ReadFile(Out("a/evaluate.txt")).empty(), false);

  // Thread count changes nothing but the recorded config.
  ASSERT_EQ(Run(args + Out("b") + " --threads 1"), 0);
  EXPECT_EQ(json::parse(first).at("results"),
            json::parse(ReadFile(Out("b/evaluate.json"))).at("results"));
}

TEST_F(CliTest, EstimateOnlyKeepsInitialConfidences) {
  ASSERT_EQ(Run("estimate" + fixture_ +
                " --estimate-only marital --dump-confidences --T 5 --k 4 --out " + Out("o")),
            0);
  const EstimationResult r =
      EstimationFromJson(ReadFile(Out("o/estimates/proposed_seed0.json")));
  Dataset ds = LoadCsv(testing::DataPath("fixture20.csv"),
                       FeatureSchema::LoadFile(testing::DataPath("fixture20.schema")));
  ds = SynthesizeCf(ds, 0);
  const auto init = InitMarginal(ds);
  EXPECT_EQ(r.confidences[1].values, init[1].values);
  EXPECT_NE(r.confidences[0].values, init[0].values);
}

TEST_F(CliTest, PredictWritesReport) {
  WriteRandomTable();
  ASSERT_EQ(Run("predict --data " + Out("table.csv") + " --schema " + Out("table.schema") +
                " --seed 0 1 --T 10 --k 8 --epochs 100 --export-design --out " + Out("p")),
            0)
      << ReadFile(Out("log.txt"));
  const json report = json::parse(ReadFile(Out("p/predict.json")));
  ASSERT_EQ(report.at("results").size(), 4u);
  for (const json& cell : report.at("results")) {
    const double f1 = cell.at("macro_f1").at("mean").get<double>();
    EXPECT_GE(f1, 0.0);
    EXPECT_LE(f1, 1.0);
  }
  EXPECT_TRUE(fs::exists(Out("p/design")));
}

TEST_F(CliTest, SweepWritesCurves) {
  ASSERT_EQ(Run("sweep" + fixture_ + " --axis k --values 2 4 --T 5 --out " + Out("s")), 0);
  const json report = json::parse(ReadFile(Out("s/sweep.json")));
  EXPECT_EQ(report.at("points").size(), 2u);
  EXPECT_TRUE(report.contains("soft_check"));
  const std::string csv = ReadFile(Out("s/sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);  // header + 2 points x 2 CFs
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(Out("run.ini"));
    cfg << "data = " << testing::DataPath("fixture20.csv") << "\n"
        << "schema = " << testing::DataPath("fixture20.schema") << "\n"
        << "method = comp\n"
        << "T = 0\n";
  }
  // T = 0 from the file is invalid; the flag wins.
  EXPECT_EQ(Run("estimate --config " + Out("run.ini") + " --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate --config " + Out("run.ini") + " --T 3 --out " + Out("o")), 0);
  EXPECT_TRUE(fs::exists(Out("o/estimates/comp_seed0.json")));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run("estimate" + fixture_ + " --T 0 --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --k 0 --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --gamma 1.5 --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --alpha 1 --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --method magic --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --estimate-only job --out " + Out("o")), 2);
  EXPECT_EQ(Run("estimate" + fixture_ + " --no-such-flag"), 2);
  EXPECT_EQ(Run(""), 2);
  EXPECT_EQ(Run("estimate --data /nonexistent.csv --schema " +
                testing::DataPath("fixture20.schema") + " --out " + Out("o")),
            3);
  {
    std::ofstream bad(Out("bad.csv"));
    bad << "age,balance,housing,region,marital,education,y\n30,1,maybe,north,single,primary,no\n";
  }
  EXPECT_EQ(Run("estimate --data " + Out("bad.csv") + " --schema " +
                testing::DataPath("fixture20.schema") + " --out " + Out("o")),
            3);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(CliTest, OracleReportsAndGates) {
  const int code = Run("oracle --seed 0 --joint-instances 5 --monotone-instances 4 "
                       "--bound-instances 200 --out " + Out("v"));
  const json report = json::parse(ReadFile(Out("v/oracle.json")));
  const bool ok = report.at("ok").get<bool>();
  EXPECT_EQ(code, ok ? 0 : 4);
  const json& suites = report.at("suites");
  EXPECT_EQ(suites.at("joint_marginal_equivalence").at("passed"), 5);
  EXPECT_TRUE(suites.contains("monotone_kl"));
  EXPECT_TRUE(suites.contains("bound_lhs_le_rhs"));
  EXPECT_TRUE(suites.contains("jmi_nonnegative"));
  EXPECT_LE(report.at("zero_instance").at("max_abs_side").get<double>(), 1e-12);
  // Every failing gated suite leaves counterexample files behind.
  for (const auto& [name, suite] : suites.items()) {
    if (suite.at("passed").get<int>() + suite.at("skipped_infinite").get<int>() <
        suite.at("instances").get<int>()) {
      EXPECT_FALSE(suite.at("counterexample_files").empty()) << name;
    }
  }
}

}  // namespace
}  // namespace cfl
