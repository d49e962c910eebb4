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

#include "neolrp/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "neolrp/errors.hpp"

namespace neolrp {

std::string_view RoundingModeName(RoundingMode mode) {
  return mode == RoundingMode::kProdhon100 ? "prodhon100" : "raw";
}

RoundingMode ParseRoundingMode(std::string_view name) {
  if (name == "raw") return RoundingMode::kRaw;
  if (name == "prodhon100") return RoundingMode::kProdhon100;
  throw Error(ErrorCode::kConfig,
              "unknown rounding mode '" + std::string(name) + "'");
}

double EuclideanDistance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double ArcCost(const Point& a, const Point& b, RoundingMode mode) {
  const double d = EuclideanDistance(a, b);
  if (mode == RoundingMode::kProdhon100) return std::ceil(100.0 * d);
  return d;
}

double ClrpInstance::total_demand() const {
  double total = 0.0;
  for (const Customer& c : customers) total += c.demand;
  return total;
}

double ClrpInstance::cost(int depot, int customer) const {
  return ArcCost(depots[depot].coord, customers[customer].coord, rounding);
}

double ClrpInstance::customer_cost(int a, int b) const {
  return ArcCost(customers[a].coord, customers[b].coord, rounding);
}

void CheckInstance(const ClrpInstance& inst) {
  std::vector<std::string> problems;
  if (!(inst.vehicle_capacity > 0)) problems.push_back("vehicle capacity <= 0");
  std::set<int> ids;
  for (const Depot& d : inst.depots) {
    if (!(d.capacity > 0)) {
      problems.push_back("depot " + std::to_string(d.id) + " capacity <= 0");
    }
    if (!ids.insert(d.id).second) {
      problems.push_back("duplicate id " + std::to_string(d.id));
    }
  }
  for (const Customer& c : inst.customers) {
    if (!(c.demand > 0)) {
      problems.push_back("customer " + std::to_string(c.id) + " demand <= 0");
    }
    if (c.demand > inst.vehicle_capacity) {
      problems.push_back("customer " + std::to_string(c.id) +
                         " demand exceeds vehicle capacity");
    }
    if (!ids.insert(c.id).second) {
      problems.push_back("duplicate id " + std::to_string(c.id));
    }
  }
  if (problems.empty()) return;
  std::string message = "invalid instance '" + inst.name + "':";
  for (const std::string& p : problems) message += " " + p + ";";
  throw Error(ErrorCode::kValidation, message);
}

double VrpInstance::total_demand() const {
  double total = 0.0;
  for (const VrpCustomer& c : customers) total += c.demand;
  return total;
}

VrpInstance InducedVrp(const ClrpInstance& inst, int depot,
                       const std::vector<int>& customers) {
  VrpInstance vrp;
  vrp.depot = inst.depots.at(depot).coord;
  vrp.vehicle_capacity = inst.vehicle_capacity;
  vrp.vehicle_fixed_cost = inst.vehicle_fixed_cost;
  vrp.rounding = inst.rounding;
  vrp.customers.reserve(customers.size());
  for (int j : customers) {
    const Customer& c = inst.customers.at(j);
    vrp.customers.push_back({c.coord, c.demand});
  }
  return vrp;
}

double FeatureScale(const Point& depot, const std::vector<Point>& customers) {
  double scale = 0.0;
  for (const Point& p : customers) {
    scale = std::max(scale, std::abs(p.x - depot.x));
    scale = std::max(scale, std::abs(p.y - depot.y));
  }
  return scale > 0.0 ? scale : 1.0;
}

Feature CustomerFeature(const Point& depot, const Point& customer,
                        double demand, double vehicle_capacity, double scale) {
  return {(customer.x - depot.x) / scale, (customer.y - depot.y) / scale,
          demand / vehicle_capacity};
}

NormalizedFeatures NormalizeFeatures(const VrpInstance& vrp) {
  if (!(vrp.vehicle_capacity > 0)) {
    throw Error(ErrorCode::kValidation,
                "invalid instance: vehicle capacity must be positive");
  }
  if (vrp.customers.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature normalization needs at least one customer");
  }
  std::vector<Point> coords;
  coords.reserve(vrp.customers.size());
  for (const VrpCustomer& c : vrp.customers) coords.push_back(c.coord);
  NormalizedFeatures out;
  out.scale = FeatureScale(vrp.depot, coords);
  out.sigma.reserve(vrp.customers.size());
  for (const VrpCustomer& c : vrp.customers) {
    out.sigma.push_back(CustomerFeature(vrp.depot, c.coord, c.demand,
                                        vrp.vehicle_capacity, out.scale));
  }
  return out;
}

std::string_view ViolationKindName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kPartition:
      return "partition";
    case ViolationKind::kDepotCapacity:
      return "depot_capacity";
    case ViolationKind::kVehicleCapacity:
      return "vehicle_capacity";
    case ViolationKind::kRouteEndpoint:
      return "route_endpoint";
    case ViolationKind::kIndex:
      return "index";
  }
  return "unknown";
}

std::vector<Violation> ValidateSolution(const ClrpInstance& inst,
                                        const ClrpSolution& sol) {
  std::vector<Violation> out;
  const int n = inst.num_customers();
  const int m = inst.num_depots();
  std::vector<int> times_allocated(n, 0);
  std::set<int> seen_depots;

  auto customer_ok = [&](int j) { return j >= 0 && j < n; };

  for (const DepotPlan& plan : sol.open) {
    if (plan.depot < 0 || plan.depot >= m) {
      out.push_back({ViolationKind::kIndex, {plan.depot},
                     "depot index " + std::to_string(plan.depot) +
                         " out of range"});
      continue;
    }
    const Depot& depot = inst.depots[plan.depot];
    if (!seen_depots.insert(plan.depot).second) {
      out.push_back({ViolationKind::kPartition, {depot.id},
                     "depot " + std::to_string(depot.id) + " listed twice"});
    }

    double load = 0.0;
    std::set<int> allocated;
    for (int j : plan.customers) {
      if (!customer_ok(j)) {
        out.push_back({ViolationKind::kIndex, {j},
                       "customer index " + std::to_string(j) +
                           " out of range"});
        continue;
      }
      ++times_allocated[j];
      load += inst.customers[j].demand;
      allocated.insert(j);
    }
    if (load > depot.capacity) {
      out.push_back({ViolationKind::kDepotCapacity, {depot.id},
                     "depot " + std::to_string(depot.id) + " load " +
                         std::to_string(load) + " exceeds capacity " +
                         std::to_string(depot.capacity)});
    }

    std::map<int, int> visits;
    for (std::size_t r = 0; r < plan.routes.size(); ++r) {
      const std::vector<int>& route = plan.routes[r];
      if (route.empty()) {
        out.push_back({ViolationKind::kRouteEndpoint, {depot.id},
                       "depot " + std::to_string(depot.id) + " route " +
                           std::to_string(r) + " is empty"});
        continue;
      }
      double route_load = 0.0;
      std::vector<int> route_ids;
      for (int j : route) {
        if (!customer_ok(j)) {
          out.push_back({ViolationKind::kIndex, {j},
                         "customer index " + std::to_string(j) +
                             " out of range"});
          continue;
        }
        route_load += inst.customers[j].demand;
        route_ids.push_back(inst.customers[j].id);
        ++visits[j];
      }
      if (route_load > inst.vehicle_capacity) {
        out.push_back({ViolationKind::kVehicleCapacity, route_ids,
                       "depot " + std::to_string(depot.id) + " route " +
                           std::to_string(r) + " load " +
                           std::to_string(route_load) +
                           " exceeds vehicle capacity " +
                           std::to_string(inst.vehicle_capacity)});
      }
    }
    // Routes start and end at their own depot by construction; what can
    // break is the correspondence between visited and allocated customers.
    std::vector<int> mismatched;
    for (const auto& [j, count] : visits) {
      if (count != 1 || !allocated.count(j)) {
        mismatched.push_back(inst.customers[j].id);
      }
    }
    for (int j : allocated) {
      if (!visits.count(j)) mismatched.push_back(inst.customers[j].id);
    }
    if (!mismatched.empty()) {
      std::sort(mismatched.begin(), mismatched.end());
      mismatched.erase(std::unique(mismatched.begin(), mismatched.end()),
                       mismatched.end());
      out.push_back({ViolationKind::kRouteEndpoint, mismatched,
                     "routes of depot " + std::to_string(depot.id) +
                         " do not visit exactly its allocated customers"});
    }
  }

  std::vector<int> unassigned;
  std::vector<int> duplicated;
  for (int j = 0; j < n; ++j) {
    if (times_allocated[j] == 0) unassigned.push_back(inst.customers[j].id);
    if (times_allocated[j] > 1) duplicated.push_back(inst.customers[j].id);
  }
  if (!unassigned.empty()) {
    out.push_back({ViolationKind::kPartition, unassigned,
                   std::to_string(unassigned.size()) +
                       " customer(s) not allocated to any open depot"});
  }
  if (!duplicated.empty()) {
    out.push_back({ViolationKind::kPartition, duplicated,
                   std::to_string(duplicated.size()) +
                       " customer(s) allocated to more than one depot"});
  }
  return out;
}

double DepotRoutingCost(const ClrpInstance& inst, int depot,
                        const std::vector<std::vector<int>>& routes) {
  double cost = 0.0;
  const Point& origin = inst.depots.at(depot).coord;
  for (const std::vector<int>& route : routes) {
    if (route.empty()) continue;
    cost += inst.vehicle_fixed_cost;
    Point prev = origin;
    for (int j : route) {
      cost += ArcCost(prev, inst.customers[j].coord, inst.rounding);
      prev = inst.customers[j].coord;
    }
    cost += ArcCost(prev, origin, inst.rounding);
  }
  return cost;
}

double SolutionCost(const ClrpInstance& inst, const ClrpSolution& sol) {
  const std::vector<Violation> violations = ValidateSolution(inst, sol);
  if (!violations.empty()) {
    std::string message = "infeasible solution:";
    for (const Violation& v : violations) {
      message += " [" + std::string(ViolationKindName(v.kind)) + "] " +
                 v.message + ";";
    }
    throw Error(ErrorCode::kValidation, message);
  }
  double total = 0.0;
  for (const DepotPlan& plan : sol.open) {
    total += inst.depots[plan.depot].fixed_cost;
    total += DepotRoutingCost(inst, plan.depot, plan.routes);
  }
  return total;
}

std::vector<int> LocationAllocation::CustomersOf(int depot) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < depot_of.size(); ++j) {
    if (depot_of[j] == depot) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<Violation> ValidateLocationAllocation(const ClrpInstance& inst,
                                                  const LocationAllocation& la) {
  std::vector<Violation> out;
  const int n = inst.num_customers();
  const int m = inst.num_depots();
  if (static_cast<int>(la.depot_of.size()) != n ||
      static_cast<int>(la.open.size()) != m) {
    out.push_back({ViolationKind::kIndex, {},
                   "allocation dimensions do not match the instance"});
    return out;
  }
  std::vector<double> load(m, 0.0);
  std::vector<int> unassigned;
  for (int j = 0; j < n; ++j) {
    const int i = la.depot_of[j];
    if (i < 0 || i >= m) {
      unassigned.push_back(inst.customers[j].id);
      continue;
    }
    if (!la.open[i]) {
      out.push_back({ViolationKind::kPartition,
                     {inst.customers[j].id, inst.depots[i].id},
                     "customer " + std::to_string(inst.customers[j].id) +
                         " assigned to closed depot " +
                         std::to_string(inst.depots[i].id)});
    }
    load[i] += inst.customers[j].demand;
  }
  if (!unassigned.empty()) {
    out.push_back({ViolationKind::kPartition, unassigned,
                   std::to_string(unassigned.size()) +
                       " customer(s) not allocated to any open depot"});
  }
  for (int i = 0; i < m; ++i) {
    if (load[i] > inst.depots[i].capacity) {
      out.push_back({ViolationKind::kDepotCapacity, {inst.depots[i].id},
                     "depot " + std::to_string(inst.depots[i].id) + " load " +
                         std::to_string(load[i]) + " exceeds capacity " +
                         std::to_string(inst.depots[i].capacity)});
    }
  }
  return out;
}

namespace {

// Whitespace tokenizer that remembers the line of every token.
class TokenStream {
 public:
  explicit TokenStream(std::string_view text) {
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      const char ch = text[i];
      if (ch == '\n') {
        ++line;
        ++i;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else {
        const std::size_t start = i;
        while (i < text.size() &&
               !std::isspace(static_cast<unsigned char>(text[i]))) {
          ++i;
        }
        tokens_.push_back({text.substr(start, i - start), line});
      }
    }
    last_line_ = line;
  }

  double Number(const std::string& section) {
    if (pos_ >= tokens_.size()) {
      throw ParseError(section, last_line_, "unexpected end of file");
    }
    const auto& [tok, line] = tokens_[pos_++];
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw ParseError(section, line,
                       "expected a number, got '" + std::string(tok) + "'");
    }
    return value;
  }

  int Count(const std::string& section) {
    const int line = pos_ < tokens_.size() ? tokens_[pos_].second : last_line_;
    const double value = Number(section);
    if (value < 0 || value != std::floor(value) || value > 1e6) {
      throw ParseError(section, line, "expected a non-negative integer count");
    }
    return static_cast<int>(value);
  }

  bool AtEnd() const { return pos_ >= tokens_.size(); }
  int line() const {
    return pos_ < tokens_.size() ? tokens_[pos_].second : last_line_;
  }

 private:
  std::vector<std::pair<std::string_view, int>> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
};

}  // namespace

ClrpInstance ParseProdhon(std::string_view text,
                          std::optional<RoundingMode> force_rounding) {
  TokenStream in(text);
  ClrpInstance inst;
  const int n = in.Count("customer count");
  const int m = in.Count("depot count");
  if (m == 0) throw ParseError("depot count", in.line(), "no depots");

  inst.depots.resize(m);
  for (int i = 0; i < m; ++i) {
    inst.depots[i].id = i;
    inst.depots[i].coord.x = in.Number("depot coordinates");
    inst.depots[i].coord.y = in.Number("depot coordinates");
  }
  inst.customers.resize(n);
  for (int j = 0; j < n; ++j) {
    inst.customers[j].id = m + j;
    inst.customers[j].coord.x = in.Number("customer coordinates");
    inst.customers[j].coord.y = in.Number("customer coordinates");
  }
  inst.vehicle_capacity = in.Number("vehicle capacity");
  for (int i = 0; i < m; ++i) inst.depots[i].capacity = in.Number("depot capacities");
  for (int j = 0; j < n; ++j) inst.customers[j].demand = in.Number("customer demands");
  for (int i = 0; i < m; ++i) inst.depots[i].fixed_cost = in.Number("depot opening costs");
  inst.vehicle_fixed_cost = in.Number("route opening cost");
  const int flag_line = in.line();
  const double flag = in.Number("cost flag");
  if (flag != 0.0 && flag != 1.0) {
    throw ParseError("cost flag", flag_line, "flag must be 0 or 1");
  }
  if (!in.AtEnd()) {
    throw ParseError("trailer", in.line(),
                     "unexpected data after the cost flag (length mismatch?)");
  }
  inst.rounding = flag == 1.0 ? RoundingMode::kProdhon100 : RoundingMode::kRaw;
  if (force_rounding) inst.rounding = *force_rounding;
  CheckInstance(inst);
  return inst;
}

ClrpInstance LoadProdhon(const std::string& path,
                         std::optional<RoundingMode> force_rounding) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot open instance file " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  try {
    ClrpInstance inst = ParseProdhon(buffer.str(), force_rounding);
    inst.name = std::filesystem::path(path).stem().string();
    return inst;
  } catch (const ParseError& e) {
    throw ParseError(e.section(), e.line(), path + ": " + e.what());
  }
}

namespace {

std::string FormatNumber(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string WriteProdhon(const ClrpInstance& inst) {
  std::ostringstream os;
  os << inst.num_customers() << "\n" << inst.num_depots() << "\n\n";
  for (const Depot& d : inst.depots) {
    os << FormatNumber(d.coord.x) << "\t" << FormatNumber(d.coord.y) << "\n";
  }
  os << "\n";
  for (const Customer& c : inst.customers) {
    os << FormatNumber(c.coord.x) << "\t" << FormatNumber(c.coord.y) << "\n";
  }
  os << "\n" << FormatNumber(inst.vehicle_capacity) << "\n\n";
  for (const Depot& d : inst.depots) os << FormatNumber(d.capacity) << "\n";
  os << "\n";
  for (const Customer& c : inst.customers) os << FormatNumber(c.demand) << "\n";
  os << "\n";
  for (const Depot& d : inst.depots) os << FormatNumber(d.fixed_cost) << "\n";
  os << "\n" << FormatNumber(inst.vehicle_fixed_cost) << "\n\n";
  os << (inst.rounding == RoundingMode::kProdhon100 ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace neolrp
