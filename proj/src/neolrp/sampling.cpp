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

#include "neolrp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "neolrp/errors.hpp"

namespace neolrp {

std::string_view SamplingMethodName(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::kGvs:
      return "GVS";
    case SamplingMethod::kRscc:
      return "RSCC";
    case SamplingMethod::kPscc:
      return "PSCC";
  }
  return "?";
}

SamplingMethod ParseSamplingMethod(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "GVS") return SamplingMethod::kGvs;
  if (upper == "RSCC") return SamplingMethod::kRscc;
  if (upper == "PSCC") return SamplingMethod::kPscc;
  throw Error(ErrorCode::kConfig,
              "unknown sampling method '" + std::string(name) + "'");
}

std::string HashString(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

const std::vector<std::string> kDepotModes = {"random", "centered", "cornered"};
const std::vector<std::string> kCustomerModes = {"random", "clustered",
                                                 "random-clustered"};
const std::vector<std::string> kDemandSchemes = {"unitary", "small", "large",
                                                 "quadrant", "wide"};
const std::vector<std::string> kRouteSizes = {"very-short", "short",
                                              "medium",     "long",
                                              "very-long",  "ultra-long"};

void CheckCategory(const std::string& value,
                   const std::vector<std::string>& allowed,
                   const std::string& axis) {
  if (value == "any") return;
  if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
    throw Error(ErrorCode::kConfig,
                "unknown GVS " + axis + " mode '" + value + "'");
  }
}

using Rng = std::mt19937_64;

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double UniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

const std::string& Pick(Rng& rng, const std::string& value,
                        const std::vector<std::string>& all) {
  if (value != "any") return value;
  return all[UniformInt(rng, 0, static_cast<int>(all.size()) - 1)];
}

// Uniform subset of {0..n-1} of size k, returned sorted.
std::vector<int> RandomSubset(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int t = 0; t < k; ++t) {
    const int swap_with = UniformInt(rng, t, n - 1);
    std::swap(idx[t], idx[swap_with]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void CheckSources(const std::vector<ClrpInstance>& sources) {
  if (sources.empty()) {
    throw Error(ErrorCode::kConfig,
                "subsampling requires at least one source instance");
  }
  for (const ClrpInstance& s : sources) {
    if (s.customers.empty() || s.depots.empty()) {
      throw Error(ErrorCode::kConfig, "source instance '" + s.name +
                                          "' needs at least one customer "
                                          "and one depot");
    }
  }
}

void CheckCount(int n_data) {
  if (n_data <= 0) {
    throw Error(ErrorCode::kConfig, "n_data must be positive");
  }
}

class DatasetBuilder {
 public:
  explicit DatasetBuilder(int n_data) : n_data_(n_data) {}

  bool Done() const { return static_cast<int>(ds_.samples.size()) >= n_data_; }

  void Offer(VrpInstance vrp) {
    if (keys_.insert(SampleKey(vrp)).second) {
      ds_.samples.push_back({std::move(vrp), std::nullopt, std::nullopt});
    } else {
      Reject();
    }
  }

  void Reject() {
    if (++rejected_ > static_cast<long long>(kAttemptBudgetPerSample) * n_data_) {
      throw Error(ErrorCode::kGenerationStall,
                  "sample generation stalled: " + std::to_string(rejected_) +
                      " rejected draws with " +
                      std::to_string(ds_.samples.size()) + "/" +
                      std::to_string(n_data_) + " samples accepted");
    }
  }

  VrpDataset Take() { return std::move(ds_); }

 private:
  int n_data_;
  long long rejected_ = 0;
  std::set<std::vector<double>> keys_;
  VrpDataset ds_;
};

VrpDataset Subsample(const std::vector<ClrpInstance>& sources, int n_data,
                     std::uint64_t seed, bool proximity) {
  CheckSources(sources);
  CheckCount(n_data);
  Rng rng(seed);
  DatasetBuilder builder(n_data);
  while (!builder.Done()) {
    const ClrpInstance& src =
        sources[UniformInt(rng, 0, static_cast<int>(sources.size()) - 1)];
    const int n = src.num_customers();
    const int size = UniformInt(rng, 1, n);
    const std::vector<int> subset = RandomSubset(rng, n, size);
    double total = 0.0;
    for (int j : subset) total += src.customers[j].demand;

    int depot = -1;
    if (!proximity) {
      depot = UniformInt(rng, 0, src.num_depots() - 1);
      if (total > src.depots[depot].capacity) depot = -1;
    } else {
      double best = 0.0;
      for (int i = 0; i < src.num_depots(); ++i) {
        if (total > src.depots[i].capacity) continue;
        double sum = 0.0;
        for (int j : subset) sum += src.cost(i, j);
        if (depot < 0 || sum < best) {
          depot = i;
          best = sum;
        }
      }
    }
    if (depot < 0) {
      builder.Reject();
      continue;
    }
    builder.Offer(InducedVrp(src, depot, subset));
  }
  VrpDataset ds = builder.Take();
  std::vector<std::string> names;
  for (const ClrpInstance& s : sources) names.push_back(s.name);
  ds.provenance = {{"method", proximity ? "PSCC" : "RSCC"},
                   {"n_data", n_data},
                   {"seed", seed},
                   {"sources", names}};
  return ds;
}

struct RouteSizeRange {
  double lo;
  double hi;
};

RouteSizeRange RouteSizeBounds(const std::string& cls) {
  if (cls == "very-short") return {3, 5};
  if (cls == "short") return {5, 8};
  if (cls == "medium") return {8, 12};
  if (cls == "long") return {12, 16};
  if (cls == "very-long") return {16, 25};
  return {25, 50};  // ultra-long
}

constexpr double kGrid = 1000.0;
constexpr double kClusterDecay = 40.0;
constexpr double kClusterSeedMean = 5.0;

Point ClusteredPoint(Rng& rng, const std::vector<Point>& seeds) {
  // Rejection sampling with acceptance probability decaying exponentially in
  // the distance to the cluster seeds.
  while (true) {
    const Point p{UniformReal(rng, 0.0, kGrid), UniformReal(rng, 0.0, kGrid)};
    double weight = 0.0;
    for (const Point& s : seeds) {
      weight += std::exp(-EuclideanDistance(p, s) / kClusterDecay);
    }
    if (UniformReal(rng, 0.0, 1.0) < std::min(1.0, weight)) return p;
  }
}

double DrawDemand(Rng& rng, const std::string& scheme, const Point& p) {
  if (scheme == "unitary") return 1.0;
  if (scheme == "small") return UniformInt(rng, 1, 10);
  if (scheme == "large") return UniformInt(rng, 50, 100);
  if (scheme == "quadrant") {
    const bool odd_quadrant = (p.x >= kGrid / 2) == (p.y >= kGrid / 2);
    return odd_quadrant ? UniformInt(rng, 51, 100) : UniformInt(rng, 1, 50);
  }
  return UniformInt(rng, 1, 100);  // wide
}

VrpInstance GvsInstance(const GvsParams& params, Rng& rng) {
  VrpInstance vrp;
  vrp.vehicle_fixed_cost = params.vehicle_fixed_cost;
  vrp.rounding = params.rounding;
  const int n = UniformInt(rng, params.min_customers, params.max_customers);

  const std::string& depot_mode = Pick(rng, params.depot_positioning, kDepotModes);
  if (depot_mode == "centered") {
    vrp.depot = {kGrid / 2, kGrid / 2};
  } else if (depot_mode == "cornered") {
    vrp.depot = {0.0, 0.0};
  } else {
    vrp.depot = {UniformReal(rng, 0.0, kGrid), UniformReal(rng, 0.0, kGrid)};
  }

  const std::string& cust_mode =
      Pick(rng, params.customer_positioning, kCustomerModes);
  int n_clustered = 0;
  if (cust_mode == "clustered") n_clustered = n;
  if (cust_mode == "random-clustered") n_clustered = (n + 1) / 2;
  std::vector<Point> seeds;
  if (n_clustered > 0) {
    int n_seeds = std::poisson_distribution<int>(kClusterSeedMean)(rng);
    n_seeds = std::max(1, n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
      seeds.push_back({UniformReal(rng, 0.0, kGrid), UniformReal(rng, 0.0, kGrid)});
    }
  }

  const std::string& scheme = Pick(rng, params.demand_scheme, kDemandSchemes);
  vrp.customers.reserve(n);
  for (int j = 0; j < n; ++j) {
    Point p = j < n_clustered
                  ? ClusteredPoint(rng, seeds)
                  : Point{UniformReal(rng, 0.0, kGrid), UniformReal(rng, 0.0, kGrid)};
    const double d = DrawDemand(rng, scheme, p);
    vrp.customers.push_back({p, d});
  }

  const RouteSizeRange r = RouteSizeBounds(Pick(rng, params.route_size, kRouteSizes));
  const double route_size = UniformReal(rng, r.lo, r.hi);
  double max_demand = 0.0;
  for (const VrpCustomer& c : vrp.customers) max_demand = std::max(max_demand, c.demand);
  const double mean_demand = vrp.total_demand() / n;
  vrp.vehicle_capacity = std::max(std::ceil(route_size * mean_demand), max_demand);
  return vrp;
}

}  // namespace

nlohmann::json GvsParams::ToJson() const {
  return {{"min_customers", min_customers},
          {"max_customers", max_customers},
          {"depot_positioning", depot_positioning},
          {"customer_positioning", customer_positioning},
          {"demand_scheme", demand_scheme},
          {"route_size", route_size},
          {"vehicle_fixed_cost", vehicle_fixed_cost},
          {"rounding", std::string(RoundingModeName(rounding))}};
}

GvsParams GvsParams::FromJson(const nlohmann::json& j) {
  GvsParams p;
  p.min_customers = j.value("min_customers", p.min_customers);
  p.max_customers = j.value("max_customers", p.max_customers);
  p.depot_positioning = j.value("depot_positioning", p.depot_positioning);
  p.customer_positioning = j.value("customer_positioning", p.customer_positioning);
  p.demand_scheme = j.value("demand_scheme", p.demand_scheme);
  p.route_size = j.value("route_size", p.route_size);
  p.vehicle_fixed_cost = j.value("vehicle_fixed_cost", p.vehicle_fixed_cost);
  p.rounding = ParseRoundingMode(j.value("rounding", std::string("raw")));
  p.Validate();
  return p;
}

void GvsParams::Validate() const {
  CheckCategory(depot_positioning, kDepotModes, "depot positioning");
  CheckCategory(customer_positioning, kCustomerModes, "customer positioning");
  CheckCategory(demand_scheme, kDemandSchemes, "demand scheme");
  CheckCategory(route_size, kRouteSizes, "route size");
  if (min_customers < 1 || max_customers > 100 || min_customers > max_customers) {
    throw Error(ErrorCode::kConfig,
                "GVS customer-count range must lie within 1..100");
  }
  if (vehicle_fixed_cost < 0) {
    throw Error(ErrorCode::kConfig, "GVS vehicle fixed cost must be >= 0");
  }
}

nlohmann::json SamplingConfig::ToJson() const {
  nlohmann::json j = {{"method", std::string(SamplingMethodName(method))},
                      {"n_data", n_data},
                      {"seed", seed},
                      {"sources", sources}};
  if (method == SamplingMethod::kGvs) j["gvs"] = gvs.ToJson();
  return j;
}

VrpDataset RsccSample(const std::vector<ClrpInstance>& sources, int n_data,
                      std::uint64_t seed) {
  return Subsample(sources, n_data, seed, /*proximity=*/false);
}

VrpDataset PsccSample(const std::vector<ClrpInstance>& sources, int n_data,
                      std::uint64_t seed) {
  return Subsample(sources, n_data, seed, /*proximity=*/true);
}

VrpDataset GvsSample(const GvsParams& params, int n_data, std::uint64_t seed) {
  params.Validate();
  CheckCount(n_data);
  Rng rng(seed);
  DatasetBuilder builder(n_data);
  while (!builder.Done()) builder.Offer(GvsInstance(params, rng));
  VrpDataset ds = builder.Take();
  ds.provenance = {{"method", "GVS"},
                   {"n_data", n_data},
                   {"seed", seed},
                   {"gvs", params.ToJson()}};
  return ds;
}

VrpDataset GenerateDataset(const SamplingConfig& config,
                           const std::vector<ClrpInstance>& sources) {
  VrpDataset ds;
  switch (config.method) {
    case SamplingMethod::kGvs:
      ds = GvsSample(config.gvs, config.n_data, config.seed);
      break;
    case SamplingMethod::kRscc:
      ds = RsccSample(sources, config.n_data, config.seed);
      break;
    case SamplingMethod::kPscc:
      ds = PsccSample(sources, config.n_data, config.seed);
      break;
  }
  ds.provenance["config_hash"] = HashString(config.ToJson().dump());
  return ds;
}

std::vector<double> SampleKey(const VrpInstance& vrp) {
  std::vector<std::array<double, 3>> cs;
  cs.reserve(vrp.customers.size());
  for (const VrpCustomer& c : vrp.customers) {
    cs.push_back({c.coord.x, c.coord.y, c.demand});
  }
  std::sort(cs.begin(), cs.end());
  std::vector<double> key = {vrp.depot.x, vrp.depot.y, vrp.vehicle_capacity,
                             vrp.vehicle_fixed_cost,
                             vrp.rounding == RoundingMode::kProdhon100 ? 1.0 : 0.0};
  for (const auto& c : cs) key.insert(key.end(), c.begin(), c.end());
  return key;
}

nlohmann::json SampleToJson(const VrpSample& sample) {
  const VrpInstance& vrp = sample.vrp;
  nlohmann::json customers = nlohmann::json::array();
  for (const VrpCustomer& c : vrp.customers) {
    customers.push_back({c.coord.x, c.coord.y, c.demand});
  }
  nlohmann::json j = {{"depot", {vrp.depot.x, vrp.depot.y}},
                      {"customers", customers},
                      {"Q", vrp.vehicle_capacity},
                      {"F", vrp.vehicle_fixed_cost},
                      {"rounding", std::string(RoundingModeName(vrp.rounding))}};
  j["label"] = sample.label ? nlohmann::json(*sample.label) : nlohmann::json();
  j["label_solver"] =
      sample.label_solver ? nlohmann::json(*sample.label_solver) : nlohmann::json();
  return j;
}

VrpSample SampleFromJson(const nlohmann::json& j) {
  VrpSample s;
  try {
    s.vrp.depot = {j.at("depot").at(0).get<double>(), j.at("depot").at(1).get<double>()};
    for (const auto& c : j.at("customers")) {
      s.vrp.customers.push_back(
          {{c.at(0).get<double>(), c.at(1).get<double>()}, c.at(2).get<double>()});
    }
    s.vrp.vehicle_capacity = j.at("Q").get<double>();
    s.vrp.vehicle_fixed_cost = j.at("F").get<double>();
    s.vrp.rounding = ParseRoundingMode(j.at("rounding").get<std::string>());
    if (j.contains("label") && !j["label"].is_null()) s.label = j["label"].get<double>();
    if (j.contains("label_solver") && !j["label_solver"].is_null()) {
      s.label_solver = j["label_solver"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed dataset record: ") + e.what());
  }
  return s;
}

std::string DatasetToJsonl(const VrpDataset& ds) {
  nlohmann::json header = {{"config_hash", ds.provenance.value("config_hash", "")},
                           {"seed", ds.provenance.value("seed", 0ULL)},
                           {"provenance", ds.provenance}};
  std::string out = header.dump() + "\n";
  for (const VrpSample& s : ds.samples) out += SampleToJson(s).dump() + "\n";
  return out;
}

VrpDataset DatasetFromJsonl(std::string_view text) {
  VrpDataset ds;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("dataset", line_no, e.what());
    }
    if (!have_header && !j.contains("depot")) {
      have_header = true;
      ds.provenance = j.value("provenance", nlohmann::json::object());
      continue;
    }
    try {
      ds.samples.push_back(SampleFromJson(j));
    } catch (const Error& e) {
      throw ParseError("dataset", line_no, e.what());
    }
  }
  return ds;
}

void SaveDataset(const VrpDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write dataset " + path);
  out << DatasetToJsonl(ds);
}

VrpDataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing dataset file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return DatasetFromJsonl(buffer.str());
}

}  // namespace neolrp
