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

// CVRP solvers for a single depot.
//
// The exact solver enumerates capacity-feasible customer subsets, computes an
// optimal tour for each with a Held-Karp subset DP, and combines them with a
// set-partition DP. The heuristic is Clarke-Wright savings followed by
// first-improvement local search and seeded perturbation restarts.

#ifndef NEOLRP_ROUTING_HPP_
#define NEOLRP_ROUTING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "neolrp/core_model.hpp"
#include "neolrp/sampling.hpp"

namespace neolrp {

using Route = std::vector<int>;

struct RoutePlan {
  std::vector<Route> routes;  // Customer indices into VrpInstance::customers.
  double cost = 0.0;
  std::string solver_tag;  // "exact" or "heuristic".
};

inline constexpr int kDefaultExactLimit = 10;
// Memory for the subset tables grows as 2^n * n; refuse beyond this.
inline constexpr int kExactHardLimit = 16;

struct HeuristicOptions {
  int iterations = 2000;  // Perturbation rounds after the first descent.
  std::uint64_t seed = 0;
};

// Route cost: F plus arc costs of depot -> route... -> depot. Empty routes
// cost nothing.
double RouteCost(const VrpInstance& vrp, const Route& route);
double PlanCost(const VrpInstance& vrp, const std::vector<Route>& routes);

// True iff the routes partition the customers and respect Q.
bool IsFeasiblePlan(const VrpInstance& vrp, const std::vector<Route>& routes);

// Throws Error(kSize) when vrp.size() > exact_limit.
RoutePlan SolveVrpExact(const VrpInstance& vrp,
                        int exact_limit = kDefaultExactLimit);

RoutePlan SolveVrpHeuristic(const VrpInstance& vrp,
                            const HeuristicOptions& options = {});

enum class LabelSolver { kExact, kHeuristic };
enum class OversizePolicy { kError, kHeuristic };

struct LabelOptions {
  LabelSolver solver = LabelSolver::kHeuristic;
  int exact_limit = kDefaultExactLimit;
  OversizePolicy oversize = OversizePolicy::kHeuristic;
  HeuristicOptions heuristic;
  int threads = 1;
};

LabelSolver ParseLabelSolver(const std::string& name);
OversizePolicy ParseOversizePolicy(const std::string& name);

// Labels every sample. Sample k uses heuristic seed options.heuristic.seed + k.
// Throws Error(kSize) listing sample ids when oversize == kError.
VrpDataset LabelDataset(const VrpDataset& ds, const LabelOptions& options);

struct RoutingOptions {
  int exact_limit = kDefaultExactLimit;
  HeuristicOptions heuristic;
};

struct FinalizedSolution {
  ClrpSolution solution;
  std::vector<double> depot_cost;  // g_i per depot (0 for closed ones), size m.
  std::vector<std::string> depot_solver;
};

// Routes every open depot of a feasible location-allocation decision.
// Throws Error(kValidation) when `la` is outside the feasible set.
FinalizedSolution FinalizeRoutes(const ClrpInstance& inst,
                                 const LocationAllocation& la,
                                 const RoutingOptions& options = {});

}  // namespace neolrp

#endif  // NEOLRP_ROUTING_HPP_
