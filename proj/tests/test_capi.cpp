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

// Exercises the shared library through its C header only, plus the CLI binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "neolrp/neolrp.h"

namespace {

namespace fs = std::filesystem;

const char* kInstance =
    "3\n2\n"
    "0 0\n10 0\n"
    "3 4\n6 8\n10 4\n"
    "20\n"
    "100 100\n"
    "5 5 5\n"
    "1000 2000\n"
    "10\n"
    "0\n";

std::string Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("neolrp_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

TEST(CApi, InstanceAndRouting) {
  neolrp_instance* inst = nullptr;
  ASSERT_EQ(neolrp_instance_parse(kInstance, nullptr, &inst), NEOLRP_OK);
  EXPECT_EQ(neolrp_instance_num_depots(inst), 2);
  EXPECT_EQ(neolrp_instance_num_customers(inst), 3);

  const int depot_of[] = {0, 0, 0};
  const int open[] = {1, 0};
  neolrp_solution* sol = nullptr;
  ASSERT_EQ(neolrp_finalize_routes(inst, depot_of, open, 0, -1, 1, &sol), NEOLRP_OK);
  // One route 0-(3,4)-(6,8)-(10,4)-0: 5 + 5 + 4*sqrt(2) + sqrt(116), raw costs.
  const double route = 5.0 + 5.0 + std::sqrt(32.0) + std::sqrt(116.0);
  EXPECT_NEAR(neolrp_solution_total_cost(sol), 1000.0 + 10.0 + route, 1e-9);
  char* js = nullptr;
  ASSERT_EQ(neolrp_solution_to_json(sol, &js), NEOLRP_OK);
  const nlohmann::json j = nlohmann::json::parse(js);
  EXPECT_EQ(j["depots"].size(), 1u);
  EXPECT_EQ(j["depots"][0]["depot"], 0);
  neolrp_string_free(js);
  neolrp_solution_free(sol);

  const int bad_open[] = {0, 1};
  EXPECT_EQ(neolrp_finalize_routes(inst, depot_of, bad_open, 0, -1, 1, &sol),
            NEOLRP_ERR_VALIDATION);
  neolrp_instance_free(inst);
}

TEST(CApi, ErrorsAreReported) {
  neolrp_instance* inst = nullptr;
  EXPECT_EQ(neolrp_instance_parse("3\n2\n0 0\n", nullptr, &inst), NEOLRP_ERR_PARSE);
  EXPECT_EQ(neolrp_last_error_code(), NEOLRP_ERR_PARSE);
  const nlohmann::json e = nlohmann::json::parse(neolrp_last_error_json());
  EXPECT_EQ(e["code"], NEOLRP_ERR_PARSE);
  EXPECT_FALSE(e["message"].get<std::string>().empty());

  EXPECT_EQ(neolrp_instance_load("/nonexistent/coord.dat", nullptr, &inst), NEOLRP_ERR_IO);
  EXPECT_EQ(neolrp_instance_parse(nullptr, nullptr, &inst), NEOLRP_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(neolrp_instance_parse(kInstance, "cubic", &inst), NEOLRP_ERR_CONFIG);
  neolrp_model* model = nullptr;
  EXPECT_EQ(neolrp_model_load("/nonexistent/model.json", &model), NEOLRP_ERR_MISSING_ARTIFACT);
  EXPECT_EQ(neolrp_run_stage("sample", "/nonexistent/cfg.json", nullptr, nullptr),
            NEOLRP_ERR_MISSING_ARTIFACT);

  // A successful call clears the previous error.
  ASSERT_EQ(neolrp_instance_parse(kInstance, "raw", &inst), NEOLRP_OK);
  EXPECT_EQ(neolrp_last_error_code(), NEOLRP_OK);
  neolrp_instance_free(inst);
}

TEST(CApi, ModelPredict) {
  const std::string dir = Scratch("model");
  // phi: identity-like 3->2 linear; rho: 2->1 ReLU -> 1 ReLU.
  const nlohmann::json m = {
      {"L", 2},
      {"phi", {{{"rows", 2}, {"cols", 3}, {"weights", {1, 0, 0, 0, 1, 0}}, {"bias", {0, 0}},
                {"activation", "linear"}}}},
      {"rho", {{{"rows", 1}, {"cols", 2}, {"weights", {1, 1}}, {"bias", {1}}, {"activation", "relu"}},
               {{"rows", 1}, {"cols", 1}, {"weights", {2}}, {"bias", {0}}, {"activation", "relu"}}}}};
  std::ofstream(dir + "/m.json") << m.dump();
  neolrp_model* model = nullptr;
  ASSERT_EQ(neolrp_model_load((dir + "/m.json").c_str(), &model), NEOLRP_OK)
      << neolrp_last_error_message();
  neolrp_instance* inst = nullptr;
  ASSERT_EQ(neolrp_instance_parse(kInstance, nullptr, &inst), NEOLRP_OK);
  double out = -1.0;
  const int all[] = {0, 1, 2};
  ASSERT_EQ(neolrp_model_predict(model, inst, 0, all, 3, &out), NEOLRP_OK);
  EXPECT_GE(out, 0.0);
  const int reordered[] = {2, 0, 1};
  double again = -1.0;
  ASSERT_EQ(neolrp_model_predict(model, inst, 0, reordered, 3, &again), NEOLRP_OK);
  EXPECT_EQ(out, again);
  ASSERT_EQ(neolrp_model_predict(model, inst, 0, nullptr, 0, &out), NEOLRP_OK);
  EXPECT_EQ(out, 0.0);
  EXPECT_EQ(neolrp_model_predict(model, inst, 5, all, 3, &out), NEOLRP_ERR_INVALID_ARGUMENT);
  const int oob[] = {7};
  EXPECT_EQ(neolrp_model_predict(model, inst, 0, oob, 1, &out), NEOLRP_ERR_INVALID_ARGUMENT);
  neolrp_instance_free(inst);
  neolrp_model_free(model);
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult RunCli(const std::string& args, const std::string& dir) {
  const std::string out = dir + "/stdout.txt";
  const std::string err = dir + "/stderr.txt";
  const std::string cmd = std::string(NEOLRP_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

TEST(Cli, ExitCodesAndErrorJson) {
  const std::string dir = Scratch("cli");
  CliResult r = RunCli("solve --config " + dir + "/none.json", dir);
  EXPECT_EQ(r.code, NEOLRP_ERR_MISSING_ARTIFACT);
  nlohmann::json e = nlohmann::json::parse(r.err);
  EXPECT_EQ(e["code"], NEOLRP_ERR_MISSING_ARTIFACT);
  EXPECT_EQ(e["error"], "missing_artifact");

  r = RunCli("frobnicate --config x", dir);
  EXPECT_EQ(r.code, NEOLRP_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(nlohmann::json::parse(r.err)["code"], NEOLRP_ERR_INVALID_ARGUMENT);

  std::ofstream(dir + "/bad.json") << R"({"name": "x", "instances": [], "colour": 1})";
  r = RunCli("sample --config " + dir + "/bad.json", dir);
  EXPECT_EQ(r.code, NEOLRP_ERR_CONFIG);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "config_error");
}

TEST(Cli, GvsSampleStage) {
  const std::string dir = Scratch("cli_gvs");
  std::ofstream(dir + "/gvs.json") << R"({
    "name": "gvs", "instances": [], "seed": 1,
    "sampling": {"method": "GVS", "n_data": 25,
                 "gvs": {"min_customers": 4, "max_customers": 9}}})";
  const CliResult r = RunCli("sample --config " + dir + "/gvs.json --seed 9 --out " + dir + "/o", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json res = nlohmann::json::parse(r.out);
  EXPECT_EQ(res["stage"], "sample");
  EXPECT_EQ(res["seed"], 9);
  std::ifstream in(dir + "/o/dataset.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) lines += !line.empty();
  EXPECT_EQ(lines, 26);  // Header plus one record per sample.
}

}  // namespace
