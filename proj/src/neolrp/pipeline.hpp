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

// Config-driven experiment stages. Every stage reads its inputs from and
// writes its artifact to the experiment's output directory, together with a
// "<artifact>.prov.json" record holding the config hash, seed and timings.
//
//   sample    -> dataset.jsonl            (dataset_<inst>.jsonl when customized)
//   label     -> labeled.jsonl
//   train     -> model.json
//   solve     -> assign_<method>_<inst>_run<r>.json
//   route     -> solution_<method>_<inst>_run<r>.json
//   evaluate  -> report.json, report.txt
//   ablate    -> ablation.json, ablation.txt

#ifndef NEOLRP_PIPELINE_HPP_
#define NEOLRP_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "neolrp/milp.hpp"
#include "neolrp/routing.hpp"
#include "neolrp/sampling.hpp"
#include "neolrp/surrogate.hpp"

namespace neolrp {

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::string> instances;  // Absolute after loading.
  std::string bks_file;
  std::string rounding = "file";  // file | raw | prodhon100
  std::uint64_t seed = 0;
  std::string out_dir = "results";

  SamplingMethod sampling_method = SamplingMethod::kRscc;
  int n_data = 1000;
  GvsParams gvs;

  LabelOptions labeling;
  int trials = 50;
  HyperparamSpace space;
  std::string surrogate_mode = "single";  // single | customized
  int n_test = 0;  // Held-out samples for test MAPE; 0 disables.

  std::vector<std::string> methods = {"neo"};  // neo | flp
  SolveParams solve;
  std::string backend;  // Empty: environment or default.
  RoutingOptions routing;
  int runs = 5;

  std::string ablate_axis;
  nlohmann::json ablate_values = nlohmann::json::array();
  int ablate_repeats = 1;

  nlohmann::json raw;  // Config as given, after overrides.

  // Throws Error(kConfig) on unknown keys' values or missing files.
  static ExperimentConfig FromJson(const nlohmann::json& j, const std::string& base_dir);
  std::string Hash() const;
};

// Reads a JSON config file, applies `overrides` (merge patch) and resolves
// relative paths against the config file's directory.
ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      const nlohmann::json& overrides = {});

// Runs one stage and returns a JSON summary. Throws neolrp::Error.
nlohmann::json RunStage(const std::string& stage, const ExperimentConfig& config);

// Loads an instance applying the config's rounding override.
ClrpInstance LoadConfiguredInstance(const ExperimentConfig& config, const std::string& path);

std::string InstanceKey(const std::string& path);

}  // namespace neolrp

#endif  // NEOLRP_PIPELINE_HPP_
