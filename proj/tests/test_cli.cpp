// Copyright 2026 The scenq Authors
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

#include "cli.hpp"

#include "scenq/trace.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace scenq
{
namespace
{

namespace fs = std::filesystem;

int run(std::vector<std::string> args)
{
  return cli::run(args);
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path & p, const std::string & text)
{
  std::ofstream(p, std::ios::binary) << text;
}

std::size_t count_lines(const fs::path & p)
{
  const std::string text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    ::setenv("SCENQ_LOG", "warn", 1);
    root = test::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    logical = root / "small.json";
    spit(logical, R"({
      "scenario_id": "small",
      "parameters": [
        {"name": "v_max", "min": 30, "max": 58, "step": 14, "unit": "km/h"},
        {"name": "t_cross", "min": 5, "max": 9, "step": 4, "unit": "s"}
      ],
      "fixed": {"d_start": 16}
    })");
  }

  fs::path simulate(const std::string & name)
  {
    const fs::path out = root / name;
    EXPECT_EQ(run({"simulate", "--logical", logical.string(), "--out", out.string()}), cli::kExitPass);
    return out;
  }

  fs::path root;
  fs::path logical;
};

TEST_F(CliTest, SimulateWritesTracesAndManifest)
{
  const fs::path out = simulate("sim");
  for (int i = 0; i < 6; ++i) {
    EXPECT_TRUE(fs::exists(out / ("small_" + std::to_string(i) + ".csv"))) << i;
  }
  EXPECT_EQ(count_lines(out / "scenarios" / "concrete.jsonl"), 6u);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest.at("command"), "simulate");
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().substr(0, 7), "sha256:");

  const fs::path again = simulate("sim2");
  EXPECT_EQ(slurp(out / "small_3.csv"), slurp(again / "small_3.csv"));
  EXPECT_EQ(load_trace_file(out / "small_3.csv").scenario_id, "small#3");
}

TEST_F(CliTest, EvaluateFillsMatrixAndPlots)
{
  const fs::path sim = simulate("sim");
  const fs::path out = root / "eval";
  const int rc = run(
    {"evaluate", "--traces", sim.string(), "--suite", test::data_path("suite_pet_et.json"), "--suite",
     test::data_path("suite_nano.json"), "--emit-plot-data", "--out", out.string()});
  EXPECT_TRUE(rc == cli::kExitPass || rc == cli::kExitFail);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  ASSERT_EQ(report.at("matrix_cells").size(), 2u);
  std::size_t verdicts = 0;
  bool any_fail = false;
  for (const auto & cell : report.at("matrix_cells")) {
    verdicts += cell.at("verdicts").size();
    for (const auto & v : cell.at("verdicts")) {
      any_fail = any_fail || v.at("outcome") == "fail";
    }
  }
  EXPECT_EQ(verdicts, 6u * 4u);
  EXPECT_EQ(rc, any_fail ? cli::kExitFail : cli::kExitPass);
  EXPECT_EQ(count_lines(out / "scalars.jsonl"), 12u);
  EXPECT_TRUE(fs::exists(out / "plots" / "pet_vs_v_max.csv"));
  EXPECT_TRUE(fs::exists(out / "series" / "gap_time_gt_2" / "small_0.csv"));
  EXPECT_TRUE(fs::exists(out / "series" / "gap_time_gt_2" / "small_0.json"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));

  // Same inputs, byte-identical report.
  const fs::path out2 = root / "eval2";
  run({"evaluate", "--traces", sim.string(), "--suite", test::data_path("suite_pet_et.json"), "--suite",
       test::data_path("suite_nano.json"), "--emit-plot-data", "--out", out2.string(), "--jobs", "3"});
  EXPECT_EQ(slurp(out / "report.json"), slurp(out2 / "report.json"));
}

TEST_F(CliTest, EvaluateRejectsMissingInput)
{
  fs::create_directories(root / "empty");
  EXPECT_EQ(
    run({"evaluate", "--traces", (root / "empty").string(), "--suite", test::data_path("suite_pet_et.json"),
         "--out", (root / "o").string()}),
    cli::kExitInput);
  EXPECT_EQ(
    run({"evaluate", "--traces", (root / "nope").string(), "--suite", test::data_path("suite_pet_et.json"),
         "--out", (root / "o").string()}),
    cli::kExitInput);
}

TEST_F(CliTest, CompareIdenticalDriftAndMismatch)
{
  const fs::path sim = simulate("sim");
  const std::string ref = (sim / "small_0.csv").string();
  const fs::path runs = root / "runs";
  fs::create_directories(runs);
  fs::copy_file(sim / "small_0.csv", runs / "a.csv");
  EXPECT_EQ(run({"compare", "--reference", ref, (runs / "a.csv").string(), "--out", (root / "c1").string()}), cli::kExitPass);
  const auto rep = nlohmann::json::parse(slurp(root / "c1" / "repeatability.json"));
  EXPECT_EQ(rep.at("entries").size(), 2u);
  EXPECT_EQ(rep.at("entries").at(0).at("dtw_distance"), 0.0);

  Trace drift = load_trace_file(sim / "small_0.csv");
  for (auto & s : drift.tracks.at("ego").states) {
    s.y += 0.02;
  }
  save_trace_file(runs / "b.csv", drift, TraceFormat::csv);
  EXPECT_EQ(run({"compare", "--reference", ref, runs.string(), "--out", (root / "c2").string()}), cli::kExitFail);

  Trace other = drift;
  other.tracks.erase("ped");
  auto ped_like = drift.tracks.at("ped");
  ped_like.actor_id = "walker";
  other.tracks.emplace("walker", ped_like);
  save_trace_file(root / "x.csv", other, TraceFormat::csv);
  EXPECT_EQ(run({"compare", "--reference", ref, (root / "x.csv").string(), "--out", (root / "c3").string()}), cli::kExitInput);
}

TEST_F(CliTest, SweepFindsGaps)
{
  const fs::path out = root / "sweep";
  EXPECT_EQ(run({"sweep", "--sweep", test::data_path("sweep.json"), "--out", out.string()}), cli::kExitPass);
  EXPECT_EQ(count_lines(out / "sweep.csv"), 42u);
  const auto gaps = nlohmann::json::parse(slurp(out / "gaps.json"));
  EXPECT_EQ(gaps.at("parameter"), "ego_start_x");
  ASSERT_EQ(gaps.at("metrics").size(), 2u);
  for (const auto & m : gaps.at("metrics")) {
    EXPECT_GE(m.at("findings").size(), 1u) << m.at("metric");
  }
  EXPECT_TRUE(fs::exists(out / "plots" / "min_wttc_vs_ego_start_x.csv"));

  EXPECT_EQ(run({"sweep", "--sweep", test::data_path("sweep.json"), "--step", "0", "--out", (root / "s0").string()}), cli::kExitInput);
}

TEST_F(CliTest, SweepOnInertParameterHasNoFindings)
{
  // With d_start 0 the pedestrian never starts, so t_cross has no effect.
  const fs::path def = root / "inert.json";
  spit(def, R"({
    "logical": {
      "scenario_id": "inert",
      "parameters": [{"name": "t_cross", "min": 5, "max": 9, "step": 1, "unit": "s"}],
      "fixed": {"v_max": 40, "d_start": 0}
    },
    "metrics": [{"name": "euclidean_distance", "actors": ["ego", "ped"], "aggregate": "min"}],
    "gap_factor": 5
  })");
  const fs::path out = root / "inert";
  EXPECT_EQ(run({"sweep", "--sweep", def.string(), "--out", out.string()}), cli::kExitPass);
  const auto gaps = nlohmann::json::parse(slurp(out / "gaps.json"));
  for (const auto & m : gaps.at("metrics")) {
    EXPECT_TRUE(m.at("findings").empty()) << m.at("metric");
  }
}

TEST_F(CliTest, ReportSummarizesMatrix)
{
  const fs::path sim = simulate("sim");
  const fs::path eval = root / "eval";
  run({"evaluate", "--traces", sim.string(), "--suite", test::data_path("suite_pet_et.json"), "--out", eval.string()});
  const fs::path out = root / "report";
  const int rc = run({"report", (eval / "report.json").string(), "--out", out.string()});
  EXPECT_TRUE(rc == cli::kExitPass || rc == cli::kExitFail);
  const std::string summary = slurp(out / "summary.txt");
  EXPECT_NE(summary.find("microscopic"), std::string::npos);
  EXPECT_NE(summary.find("sut"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "matrix.csv"));
}

TEST_F(CliTest, UsageErrors)
{
  EXPECT_EQ(run({"--help"}), cli::kExitPass);
  EXPECT_EQ(run({"fly"}), cli::kExitInput);
  EXPECT_EQ(run({"simulate"}), cli::kExitInput);
  EXPECT_EQ(run({"simulate", "--logical", (root / "missing.json").string(), "--out", (root / "m").string()}), cli::kExitInput);
}

}  // namespace
}  // namespace scenq
