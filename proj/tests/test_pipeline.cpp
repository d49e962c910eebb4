// Copyright 2026 The neolrp Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "neolrp/errors.hpp"
#include "neolrp/metrics.hpp"
#include "neolrp/pipeline.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Two small synthetic instances plus a config that runs every stage in seconds.
std::string WriteExperiment(const std::string& name, nlohmann::json patch = {}) {
  const std::string dir = testing::TempDir(name);
  for (int k = 0; k < 2; ++k) {
    ClrpInstance inst = testing::RandomInstance(8, 3, 100 + k);
    std::ofstream(dir + "/toy" + std::to_string(k) + ".dat") << WriteProdhon(inst);
  }
  std::ofstream(dir + "/bks.json") << R"({"bks": {"toy0": 30000, "toy1": 30000}})";
  nlohmann::json cfg = {
      {"name", "toy"},
      {"instances", {"toy0.dat", "toy1.dat"}},
      {"bks_file", "bks.json"},
      {"seed", 3},
      {"out_dir", "out"},
      {"sampling", {{"method", "RSCC"}, {"n_data", 60}}},
      {"labeling", {{"solver", "exact"}, {"iterations", 30}}},
      {"training",
       {{"trials", 2},
        {"n_test", 20},
        {"space",
         {{"latent_dim", {4}}, {"phi_depth", {2}}, {"phi_width", {32}}, {"rho_width", {4}},
          {"patience", {15}}, {"epochs", {50}}}}}},
      {"solve", {{"methods", {"neo", "flp"}}, {"time_limit", 30}}},
      {"routing", {{"iterations", 50}}},
      {"runs", 2}};
  if (!patch.is_null()) cfg.merge_patch(patch);
  std::ofstream(dir + "/config.json") << cfg.dump(1);
  return dir;
}

const std::vector<std::string> kPipeline = {"sample", "label", "train", "solve", "route",
                                            "evaluate"};

TEST(Pipeline, EndToEndAndDeterministic) {
  const std::string dir = WriteExperiment("pipe");
  const ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  EXPECT_EQ(cfg.out_dir, dir + "/out");
  nlohmann::json last;
  for (const std::string& stage : kPipeline) last = RunStage(stage, cfg);

  const nlohmann::json report = nlohmann::json::parse(Slurp(dir + "/out/report.json"));
  ASSERT_EQ(report["rows"].size(), 2u * 2u * 2u);
  int flp = 0;
  for (const auto& row : report["rows"]) {
    EXPECT_TRUE(std::isfinite(row["gap_bks"].get<double>()));
    EXPECT_LE(row["t_la"].get<double>(), row["t_total"].get<double>());
    flp += row["method"] == "FLP-VRP";
    if (row["method"] == "FLP-VRP") {
      EXPECT_TRUE(row["pred_error"].is_null());
    }
  }
  EXPECT_EQ(flp, 4);
  EXPECT_TRUE(fs::exists(dir + "/out/report.txt"));

  // Solutions are feasible and carry true costs.
  const ClrpInstance inst = LoadConfiguredInstance(cfg, cfg.instances[0]);
  const nlohmann::json sol = nlohmann::json::parse(Slurp(dir + "/out/solution_neo_toy0_run0.json"));
  ClrpSolution s;
  for (const auto& d : sol["depots"]) {
    DepotPlan p;
    p.depot = d["depot"].get<int>();
    for (const auto& r : d["routes"]) {
      std::vector<int> route;
      for (int id : r.get<std::vector<int>>()) route.push_back(id - inst.num_depots());
      p.customers.insert(p.customers.end(), route.begin(), route.end());
      p.routes.push_back(route);
    }
    s.open.push_back(p);
  }
  EXPECT_DOUBLE_EQ(SolutionCost(inst, s), sol["total_cost"].get<double>());

  // Provenance records the config hash and seed everywhere.
  for (const auto& entry : fs::directory_iterator(dir + "/out")) {
    const std::string p = entry.path().string();
    if (p.ends_with(".prov.json")) {
      const nlohmann::json prov = nlohmann::json::parse(Slurp(p));
      EXPECT_EQ(prov["config_hash"], cfg.Hash());
      EXPECT_EQ(prov["seed"], 3);
    }
  }

  // Rerunning each stage reproduces every artifact byte for byte.
  std::map<std::string, std::string> before;
  for (const auto& entry : fs::directory_iterator(dir + "/out")) {
    const std::string p = entry.path().string();
    if (!p.ends_with(".prov.json")) before[p] = Slurp(p);
  }
  for (const std::string& stage : kPipeline) RunStage(stage, cfg);
  for (const auto& [path, text] : before) {
    if (path.ends_with("report.json") || path.ends_with("report.txt")) continue;
    EXPECT_EQ(Slurp(path), text) << path;
  }
  // Reports differ only in wall-clock timings; objectives and gaps are fixed.
  const nlohmann::json again = nlohmann::json::parse(Slurp(dir + "/out/report.json"));
  for (std::size_t k = 0; k < report["rows"].size(); ++k) {
    EXPECT_EQ(again["rows"][k]["objective"], report["rows"][k]["objective"]);
    EXPECT_EQ(again["rows"][k]["gap_bks"], report["rows"][k]["gap_bks"]);
    EXPECT_EQ(again["rows"][k]["pred_error"], report["rows"][k]["pred_error"]);
  }
}

TEST(Pipeline, ProvenanceRegeneratesDataset) {
  const std::string dir = WriteExperiment("regen");
  const ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  RunStage("sample", cfg);
  const nlohmann::json prov = nlohmann::json::parse(Slurp(dir + "/out/dataset.jsonl.prov.json"));
  const std::string first = Slurp(dir + "/out/dataset.jsonl");
  fs::remove(dir + "/out/dataset.jsonl");
  // Rebuild from the recorded config alone.
  std::ofstream(dir + "/replay.json") << prov["config"].dump();
  const ExperimentConfig replay = LoadExperimentConfig(dir + "/replay.json");
  EXPECT_EQ(replay.Hash(), prov["config_hash"]);
  RunStage("sample", replay);
  EXPECT_EQ(Slurp(dir + "/out/dataset.jsonl"), first);
}

TEST(Pipeline, MissingUpstreamArtifact) {
  const std::string dir = WriteExperiment("missing");
  const ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  for (const std::string& stage : {"label", "train", "solve", "route", "evaluate"}) {
    try {
      RunStage(stage, cfg);
      FAIL() << stage;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact) << stage;
      EXPECT_NE(std::string(e.what()).find(dir + "/out/"), std::string::npos) << e.what();
    }
  }
}

TEST(Pipeline, FlpOnlyAndStageIsolation) {
  const std::string dir = WriteExperiment("flp", {{"solve", {{"methods", {"flp"}}}}, {"runs", 1}});
  const ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  RunStage("solve", cfg);
  RunStage("route", cfg);
  const nlohmann::json r = RunStage("evaluate", cfg);
  const nlohmann::json report = nlohmann::json::parse(Slurp(dir + "/out/report.json"));
  for (const auto& row : report["rows"]) EXPECT_EQ(row["method"], "FLP-VRP");
  const std::string assign = Slurp(dir + "/out/assign_flp_toy0_run0.json");
  fs::remove(dir + "/out/solution_flp_toy0_run0.json");
  EXPECT_THROW(RunStage("evaluate", cfg), Error);
  EXPECT_EQ(Slurp(dir + "/out/assign_flp_toy0_run0.json"), assign);
}

TEST(Pipeline, CustomizedSurrogates) {
  const std::string dir = WriteExperiment(
      "custom", {{"surrogate_mode", "customized"}, {"runs", 1}, {"sampling", {{"n_data", 30}}}});
  const ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  for (const std::string& stage : kPipeline) RunStage(stage, cfg);
  EXPECT_TRUE(fs::exists(dir + "/out/model_toy0.json"));
  EXPECT_TRUE(fs::exists(dir + "/out/model_toy1.json"));
  EXPECT_TRUE(fs::exists(dir + "/out/dataset_toy1.jsonl"));
}

TEST(Pipeline, AblationAxes) {
  const std::string dir = WriteExperiment(
      "ablate", {{"ablate", {{"axis", "bogus"}, {"values", {1}}}}, {"runs", 1}});
  ExperimentConfig cfg = LoadExperimentConfig(dir + "/config.json");
  try {
    RunStage("ablate", cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  cfg = LoadExperimentConfig(
      dir + "/config.json",
      {{"ablate", {{"axis", "sampling"}, {"values", {"RSCC", "PSCC"}}}},
       {"training", {{"trials", 1}, {"n_test", 10}}},
       {"solve", {{"methods", {"neo"}}}},
       {"sampling", {{"n_data", 30}}}});
  const nlohmann::json r = RunStage("ablate", cfg);
  ASSERT_EQ(r["cells"].size(), 2u);
  for (const auto& cell : r["cells"]) {
    EXPECT_GE(cell["test_mape"].get<double>(), 0.0);
    EXPECT_GE(cell["median_gap_bks"].get<double>(), 0.0);
  }
  EXPECT_TRUE(fs::exists(dir + "/out/ablation.txt"));
}

TEST(Config, Validation) {
  const std::string dir = WriteExperiment("cfg");
  EXPECT_THROW(LoadExperimentConfig(dir + "/config.json", {{"colour", "red"}}), Error);
  EXPECT_THROW(LoadExperimentConfig(dir + "/config.json", {{"surrogate_mode", "both"}}), Error);
  EXPECT_THROW(LoadExperimentConfig(dir + "/config.json", {{"solve", {{"methods", {"vns"}}}}}),
               Error);
  EXPECT_THROW(LoadExperimentConfig(dir + "/config.json", {{"runs", 0}}), Error);
  try {
    LoadExperimentConfig(dir + "/nope.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact);
  }
  const ExperimentConfig a = LoadExperimentConfig(dir + "/config.json");
  const ExperimentConfig b = LoadExperimentConfig(dir + "/config.json", {{"out_dir", "/tmp/x"}});
  const ExperimentConfig c = LoadExperimentConfig(dir + "/config.json", {{"seed", 4}});
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_NE(a.Hash(), c.Hash());
  EXPECT_EQ(a.runs, 2);
  EXPECT_THROW(RunStage("deploy", a), Error);
  ExperimentConfig missing = a;
  missing.instances = {dir + "/absent.dat"};
  try {
    RunStage("solve", missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact);
  }
}

}  // namespace
}  // namespace neolrp
