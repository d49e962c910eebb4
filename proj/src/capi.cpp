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

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "neolrp/core_model.hpp"
#include "neolrp/errors.hpp"
#include "neolrp/milp.hpp"
#include "neolrp/neolrp.h"
#include "neolrp/pipeline.hpp"
#include "neolrp/routing.hpp"
#include "neolrp/surrogate.hpp"

struct neolrp_instance {
  neolrp::ClrpInstance inst;
};

struct neolrp_model {
  neolrp::SurrogateModel model;
};

struct neolrp_solution {
  neolrp::ClrpInstance inst;
  neolrp::FinalizedSolution fin;
};

namespace {

struct LastError {
  int code = 0;
  std::string message;
  std::string json;
};

thread_local LastError last_error;

int SetError(int code, const char* name, const std::string& message) {
  last_error.code = code;
  last_error.message = message;
  last_error.json =
      nlohmann::json{{"error", name}, {"code", code}, {"message", message}}.dump();
  return code;
}

void ClearError() {
  last_error.code = 0;
  last_error.message.clear();
  last_error.json = "{}";
}

template <typename F>
int Guard(F&& body) {
  ClearError();
  try {
    body();
    return NEOLRP_OK;
  } catch (const neolrp::Error& e) {
    const int code = static_cast<int>(e.code());
    return SetError(code, neolrp::ErrorCodeName(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(NEOLRP_ERR_INTERNAL, "internal_error", "out of memory");
  } catch (const std::exception& e) {
    return SetError(NEOLRP_ERR_INTERNAL, "internal_error", e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<neolrp::RoundingMode> Rounding(const char* r) {
  if (!r || !*r) return std::nullopt;
  return neolrp::ParseRoundingMode(r);
}

void Require(bool ok, const char* what) {
  if (!ok) throw neolrp::Error(neolrp::ErrorCode::kInvalidArgument, what);
}

}  // namespace

extern "C" {

const char* neolrp_version(void) { return "0.1.0"; }

int neolrp_last_error_code(void) { return last_error.code; }

const char* neolrp_last_error_message(void) { return last_error.message.c_str(); }

const char* neolrp_last_error_json(void) {
  if (last_error.json.empty()) last_error.json = "{}";
  return last_error.json.c_str();
}

void neolrp_string_free(char* s) { std::free(s); }

int neolrp_instance_load(const char* path, const char* rounding, neolrp_instance** out) {
  return Guard([&] {
    Require(path && out, "path and out must be non-null");
    auto* h = new neolrp_instance{neolrp::LoadProdhon(path, Rounding(rounding))};
    *out = h;
  });
}

int neolrp_instance_parse(const char* text, const char* rounding, neolrp_instance** out) {
  return Guard([&] {
    Require(text && out, "text and out must be non-null");
    auto* h = new neolrp_instance{neolrp::ParseProdhon(text, Rounding(rounding))};
    *out = h;
  });
}

void neolrp_instance_free(neolrp_instance* inst) { delete inst; }

int neolrp_instance_num_depots(const neolrp_instance* inst) {
  return inst ? inst->inst.num_depots() : -1;
}

int neolrp_instance_num_customers(const neolrp_instance* inst) {
  return inst ? inst->inst.num_customers() : -1;
}

int neolrp_model_load(const char* path, neolrp_model** out) {
  return Guard([&] {
    Require(path && out, "path and out must be non-null");
    *out = new neolrp_model{neolrp::SurrogateModel::Load(path)};
  });
}

void neolrp_model_free(neolrp_model* model) { delete model; }

int neolrp_model_predict(const neolrp_model* model, const neolrp_instance* inst, int depot,
                         const int* customers, size_t count, double* out) {
  return Guard([&] {
    Require(model && inst && out && (customers || count == 0), "null argument");
    Require(depot >= 0 && depot < inst->inst.num_depots(), "depot index out of range");
    std::vector<int> idx(customers, customers + count);
    for (int j : idx) {
      Require(j >= 0 && j < inst->inst.num_customers(), "customer index out of range");
    }
    *out = idx.empty() ? 0.0
                       : neolrp::Predict(model->model, neolrp::InducedVrp(inst->inst, depot, idx));
  });
}

int neolrp_finalize_routes(const neolrp_instance* inst, const int* depot_of, const int* open,
                           int exact_limit, int iterations, unsigned long long seed,
                           neolrp_solution** out) {
  return Guard([&] {
    Require(inst && depot_of && open && out, "null argument");
    neolrp::LocationAllocation la;
    la.depot_of.assign(depot_of, depot_of + inst->inst.num_customers());
    for (int i = 0; i < inst->inst.num_depots(); ++i) la.open.push_back(open[i] != 0);
    neolrp::RoutingOptions ro;
    if (exact_limit > 0) ro.exact_limit = exact_limit;
    if (iterations >= 0) ro.heuristic.iterations = iterations;
    ro.heuristic.seed = seed;
    auto* sol = new neolrp_solution{inst->inst, neolrp::FinalizeRoutes(inst->inst, la, ro)};
    *out = sol;
  });
}

void neolrp_solution_free(neolrp_solution* sol) { delete sol; }

double neolrp_solution_total_cost(const neolrp_solution* sol) {
  return sol ? sol->fin.solution.total_cost : 0.0;
}

int neolrp_solution_to_json(const neolrp_solution* sol, char** out) {
  return Guard([&] {
    Require(sol && out, "null argument");
    nlohmann::json depots = nlohmann::json::array();
    for (const neolrp::DepotPlan& dp : sol->fin.solution.open) {
      nlohmann::json routes = nlohmann::json::array();
      for (const auto& r : dp.routes) {
        std::vector<int> ids;
        for (int j : r) ids.push_back(sol->inst.customers[j].id);
        routes.push_back(ids);
      }
      depots.push_back({{"depot", sol->inst.depots[dp.depot].id},
                        {"routing_cost", sol->fin.depot_cost[dp.depot]},
                        {"routes", routes}});
    }
    *out = CopyString(
        nlohmann::json{{"total_cost", sol->fin.solution.total_cost}, {"depots", depots}}.dump());
  });
}

int neolrp_run_stage(const char* stage, const char* config_path, const char* overrides_json,
                     char** result_json) {
  return Guard([&] {
    Require(stage && config_path, "stage and config_path must be non-null");
    nlohmann::json overrides = nlohmann::json::object();
    if (overrides_json && *overrides_json) {
      try {
        overrides = nlohmann::json::parse(overrides_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw neolrp::Error(neolrp::ErrorCode::kConfig,
                            std::string("overrides are not valid JSON: ") + e.what());
      }
    }
    const neolrp::ExperimentConfig config = neolrp::LoadExperimentConfig(config_path, overrides);
    const nlohmann::json result = neolrp::RunStage(stage, config);
    if (result_json) *result_json = CopyString(result.dump());
  });
}

}  // extern "C"
