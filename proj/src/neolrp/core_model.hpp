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

// Problem data for the capacitated location-routing problem (CLRP), the
// single-depot VRP instances derived from it, cost semantics, feasibility
// checking and the Prodhon benchmark file format.
//
// Indexing convention: depots and customers are addressed by their position
// in ClrpInstance::depots / ClrpInstance::customers. The `id` fields carry the
// external identifiers (depots 0..m-1, customers m..m+n-1 for parsed files).

#ifndef NEOLRP_CORE_MODEL_HPP_
#define NEOLRP_CORE_MODEL_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neolrp {

enum class RoundingMode {
  kRaw,         // Euclidean distance.
  kProdhon100,  // ceil(100 * Euclidean distance).
};

std::string_view RoundingModeName(RoundingMode mode);
RoundingMode ParseRoundingMode(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double EuclideanDistance(const Point& a, const Point& b);

// Travel cost between two points under the given rounding convention.
double ArcCost(const Point& a, const Point& b, RoundingMode mode);

struct Depot {
  int id = 0;
  Point coord;
  double capacity = 0.0;
  double fixed_cost = 0.0;
};

struct Customer {
  int id = 0;
  Point coord;
  double demand = 0.0;
};

struct ClrpInstance {
  std::string name;
  std::vector<Depot> depots;
  std::vector<Customer> customers;
  double vehicle_capacity = 0.0;
  double vehicle_fixed_cost = 0.0;
  RoundingMode rounding = RoundingMode::kRaw;

  int num_depots() const { return static_cast<int>(depots.size()); }
  int num_customers() const { return static_cast<int>(customers.size()); }
  double total_demand() const;
  double cost(int depot, int customer) const;
  double customer_cost(int a, int b) const;
};

// Throws Error(kValidation) listing every broken data invariant.
void CheckInstance(const ClrpInstance& inst);

struct VrpCustomer {
  Point coord;
  double demand = 0.0;

  friend bool operator==(const VrpCustomer&, const VrpCustomer&) = default;
};

// One depot and a set of customers: the routing sub-problem served by a
// single open depot.
struct VrpInstance {
  Point depot;
  std::vector<VrpCustomer> customers;
  double vehicle_capacity = 0.0;
  double vehicle_fixed_cost = 0.0;
  RoundingMode rounding = RoundingMode::kRaw;

  int size() const { return static_cast<int>(customers.size()); }
  double total_demand() const;

  friend bool operator==(const VrpInstance&, const VrpInstance&) = default;
};

// Induced VRP of depot `depot` serving `customers` (indices into inst).
VrpInstance InducedVrp(const ClrpInstance& inst, int depot,
                       const std::vector<int>& customers);

using Feature = std::array<double, 3>;

struct NormalizedFeatures {
  std::vector<Feature> sigma;
  double scale = 1.0;  // P, in distance units.
};

// Depot-centered, scale-normalized customer features. P is the largest
// absolute centered coordinate over both axes, or 1 when every customer sits
// on the depot.
NormalizedFeatures NormalizeFeatures(const VrpInstance& vrp);

// Features of `customers` relative to `depot` using an explicit scale.
Feature CustomerFeature(const Point& depot, const Point& customer,
                        double demand, double vehicle_capacity, double scale);
double FeatureScale(const Point& depot, const std::vector<Point>& customers);

// Routes and allocation for one open depot. Routes hold customer indices.
struct DepotPlan {
  int depot = 0;
  std::vector<int> customers;
  std::vector<std::vector<int>> routes;
};

struct ClrpSolution {
  std::vector<DepotPlan> open;
  double total_cost = 0.0;
};

enum class ViolationKind {
  kPartition,
  kDepotCapacity,
  kVehicleCapacity,
  kRouteEndpoint,
  kIndex,
};

std::string_view ViolationKindName(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<int> ids;  // External ids of the offending depots/customers.
  std::string message;
};

std::vector<Violation> ValidateSolution(const ClrpInstance& inst,
                                        const ClrpSolution& sol);

// Sum of fixed costs, vehicle costs and arc costs of every open depot.
// Throws Error(kValidation) when the solution is infeasible.
double SolutionCost(const ClrpInstance& inst, const ClrpSolution& sol);

// Cost of the routes of a single depot: F per nonempty route plus arcs.
double DepotRoutingCost(const ClrpInstance& inst, int depot,
                        const std::vector<std::vector<int>>& routes);

// A location-allocation decision (x, y): the depot serving each customer and
// which depots are open.
struct LocationAllocation {
  std::vector<int> depot_of;   // size n; -1 when unassigned.
  std::vector<bool> open;      // size m.

  std::vector<int> CustomersOf(int depot) const;
};

// Empty iff (x, y) lies in the feasible location-allocation set: each
// customer served by exactly one open depot within depot capacity.
std::vector<Violation> ValidateLocationAllocation(const ClrpInstance& inst,
                                                  const LocationAllocation& la);

// Parses the Prodhon layout. `force_rounding` overrides the trailing flag.
ClrpInstance ParseProdhon(std::string_view text,
                          std::optional<RoundingMode> force_rounding = {});
ClrpInstance LoadProdhon(const std::string& path,
                         std::optional<RoundingMode> force_rounding = {});
std::string WriteProdhon(const ClrpInstance& inst);

}  // namespace neolrp

#endif  // NEOLRP_CORE_MODEL_HPP_
