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

// Generators of single-depot VRP training instances.
//
//  * RSCC: random customer subset of a CLRP instance with a uniformly drawn
//    depot, kept only when the subset fits the depot capacity.
//  * PSCC: as RSCC, but the depot is the capacity-feasible one with the
//    smallest total depot-to-customer cost.
//  * GVS: synthetic instances on a [0,1000]^2 grid with categorical depot,
//    customer, demand and route-size layouts.
//
// All generators are deterministic in their seed and never emit the same
// (depot, customer multiset, Q, F) twice.

#ifndef NEOLRP_SAMPLING_HPP_
#define NEOLRP_SAMPLING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "neolrp/core_model.hpp"

namespace neolrp {

struct VrpSample {
  VrpInstance vrp;
  std::optional<double> label;
  std::optional<std::string> label_solver;  // "exact" or "heuristic".
};

struct VrpDataset {
  std::vector<VrpSample> samples;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t size() const { return samples.size(); }
};

enum class SamplingMethod { kGvs, kRscc, kPscc };

std::string_view SamplingMethodName(SamplingMethod method);
SamplingMethod ParseSamplingMethod(std::string_view name);

// Categorical GVS axes. The string "any" draws the category per sample.
struct GvsParams {
  int min_customers = 1;
  int max_customers = 100;
  std::string depot_positioning = "any";     // random | centered | cornered
  std::string customer_positioning = "any";  // random | clustered | random-clustered
  std::string demand_scheme = "any";  // unitary | small | large | quadrant | wide
  std::string route_size = "any";  // very-short | short | medium | long | very-long | ultra-long
  double vehicle_fixed_cost = 0.0;
  RoundingMode rounding = RoundingMode::kRaw;

  nlohmann::json ToJson() const;
  static GvsParams FromJson(const nlohmann::json& j);
  // Throws Error(kConfig) on unknown category names or bad ranges.
  void Validate() const;
};

struct SamplingConfig {
  SamplingMethod method = SamplingMethod::kRscc;
  int n_data = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> sources;  // Instance paths for RSCC / PSCC.
  GvsParams gvs;

  nlohmann::json ToJson() const;
};

// Rejected draws allowed per requested sample before giving up.
inline constexpr int kAttemptBudgetPerSample = 1000;

VrpDataset RsccSample(const std::vector<ClrpInstance>& sources, int n_data,
                      std::uint64_t seed);
VrpDataset PsccSample(const std::vector<ClrpInstance>& sources, int n_data,
                      std::uint64_t seed);
VrpDataset GvsSample(const GvsParams& params, int n_data, std::uint64_t seed);

// Dispatches on config.method; `sources` must hold the parsed config.sources.
VrpDataset GenerateDataset(const SamplingConfig& config,
                           const std::vector<ClrpInstance>& sources);

// Canonical key used for duplicate detection.
std::vector<double> SampleKey(const VrpInstance& vrp);

// JSON-lines dataset file: a header object followed by one record per sample.
std::string DatasetToJsonl(const VrpDataset& ds);
VrpDataset DatasetFromJsonl(std::string_view text);
void SaveDataset(const VrpDataset& ds, const std::string& path);
VrpDataset LoadDataset(const std::string& path);

nlohmann::json SampleToJson(const VrpSample& sample);
VrpSample SampleFromJson(const nlohmann::json& j);

// Stable 64-bit FNV-1a hash rendered as 16 hex digits.
std::string HashString(std::string_view text);

}  // namespace neolrp

#endif  // NEOLRP_SAMPLING_HPP_
