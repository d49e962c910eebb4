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

#include "neolrp/routing.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "neolrp/errors.hpp"

namespace neolrp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

// Node 0 is the depot, node j+1 is customer j.
class CostMatrix {
 public:
  explicit CostMatrix(const VrpInstance& vrp) : n_(vrp.size() + 1) {
    c_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    auto point = [&](int v) {
      return v == 0 ? vrp.depot : vrp.customers[v - 1].coord;
    };
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        const double d = ArcCost(point(a), point(b), vrp.rounding);
        c_[a * n_ + b] = d;
        c_[b * n_ + a] = d;
      }
    }
  }

  double operator()(int a, int b) const { return c_[a * n_ + b]; }

 private:
  int n_;
  std::vector<double> c_;
};

}  // namespace

double RouteCost(const VrpInstance& vrp, const Route& route) {
  if (route.empty()) return 0.0;
  double cost = vrp.vehicle_fixed_cost;
  Point prev = vrp.depot;
  for (int j : route) {
    cost += ArcCost(prev, vrp.customers[j].coord, vrp.rounding);
    prev = vrp.customers[j].coord;
  }
  return cost + ArcCost(prev, vrp.depot, vrp.rounding);
}

double PlanCost(const VrpInstance& vrp, const std::vector<Route>& routes) {
  double cost = 0.0;
  for (const Route& r : routes) cost += RouteCost(vrp, r);
  return cost;
}

bool IsFeasiblePlan(const VrpInstance& vrp, const std::vector<Route>& routes) {
  std::vector<int> seen(vrp.size(), 0);
  for (const Route& r : routes) {
    double load = 0.0;
    for (int j : r) {
      if (j < 0 || j >= vrp.size() || seen[j]++) return false;
      load += vrp.customers[j].demand;
    }
    if (load > vrp.vehicle_capacity + kEps) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

RoutePlan SolveVrpExact(const VrpInstance& vrp, int exact_limit) {
  const int n = vrp.size();
  const int limit = std::min(exact_limit, kExactHardLimit);
  if (n > limit) {
    throw Error(ErrorCode::kSize, "exact VRP solver limited to " +
                                      std::to_string(limit) + " customers, got " +
                                      std::to_string(n));
  }
  RoutePlan plan;
  plan.solver_tag = "exact";
  if (n == 0) return plan;
  for (const VrpCustomer& c : vrp.customers) {
    if (c.demand > vrp.vehicle_capacity + kEps) {
      throw Error(ErrorCode::kValidation, "customer demand exceeds Q");
    }
  }

  const CostMatrix c(vrp);
  const std::uint32_t full = (1u << n) - 1;
  const std::size_t subsets = std::size_t{1} << n;

  std::vector<double> load(subsets, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int low = std::countr_zero(s);
    load[s] = load[s & (s - 1)] + vrp.customers[low].demand;
  }

  // path[s*n + j]: cheapest depot -> ... -> j path visiting exactly s.
  std::vector<double> path(subsets * n, kInf);
  std::vector<std::int8_t> parent(subsets * n, -1);
  for (int j = 0; j < n; ++j) path[(std::size_t{1} << j) * n + j] = c(0, j + 1);
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (load[s] > vrp.vehicle_capacity + kEps) continue;
    for (int j = 0; j < n; ++j) {
      const double base = path[s * n + j];
      if (!(s >> j & 1) || base == kInf) continue;
      for (int k = 0; k < n; ++k) {
        if (s >> k & 1) continue;
        const std::uint32_t t = s | (1u << k);
        const double v = base + c(j + 1, k + 1);
        if (v < path[t * n + k]) {
          path[t * n + k] = v;
          parent[t * n + k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  std::vector<double> tour(subsets, kInf);
  std::vector<std::int8_t> tour_last(subsets, -1);
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (load[s] > vrp.vehicle_capacity + kEps) continue;
    for (int j = 0; j < n; ++j) {
      if (!(s >> j & 1)) continue;
      const double v = path[s * n + j] + c(j + 1, 0);
      if (v < tour[s]) {
        tour[s] = v;
        tour_last[s] = static_cast<std::int8_t>(j);
      }
    }
    if (tour[s] < kInf) tour[s] += vrp.vehicle_fixed_cost;
  }

  // Set partition: the route holding the lowest remaining customer is chosen
  // first, so each partition is enumerated once.
  std::vector<double> best(subsets, kInf);
  std::vector<std::uint32_t> choice(subsets, 0);
  best[0] = 0.0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t low = s & (~s + 1);
    const std::uint32_t rest = s ^ low;
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t r = sub | low;
      if (tour[r] < kInf) {
        const double v = tour[r] + best[s ^ r];
        if (v < best[s]) {
          best[s] = v;
          choice[s] = r;
        }
      }
      if (sub == 0) break;
    }
  }

  for (std::uint32_t s = full; s != 0;) {
    const std::uint32_t r = choice[s];
    Route route;
    std::uint32_t t = r;
    int j = tour_last[r];
    while (j >= 0) {
      route.push_back(j);
      const int p = parent[t * n + j];
      t ^= 1u << j;
      j = p;
    }
    std::reverse(route.begin(), route.end());
    plan.routes.push_back(std::move(route));
    s ^= r;
  }
  plan.cost = PlanCost(vrp, plan.routes);
  return plan;
}

namespace {

// Local search state over routes of customer indices (0-based).
class LocalSearch {
 public:
  LocalSearch(const VrpInstance& vrp, const CostMatrix& c)
      : vrp_(vrp), c_(c), q_(vrp.vehicle_capacity), f_(vrp.vehicle_fixed_cost) {}

  void Descend(std::vector<Route>& routes) {
    routes_ = &routes;
    Reload();
    while (Relocate() || Swap() || TwoOpt() || OrOpt()) {
    }
    routes.erase(std::remove_if(routes.begin(), routes.end(),
                                [](const Route& r) { return r.empty(); }),
                 routes.end());
  }

 private:
  int Node(const Route& r, int pos) const {
    return pos < 0 || pos >= static_cast<int>(r.size()) ? 0 : r[pos] + 1;
  }

  double Demand(int j) const { return vrp_.customers[j].demand; }

  void Reload() {
    load_.assign(routes_->size(), 0.0);
    for (std::size_t r = 0; r < routes_->size(); ++r) {
      for (int j : (*routes_)[r]) load_[r] += Demand(j);
    }
  }

  bool Relocate() {
    std::vector<Route>& rs = *routes_;
    for (std::size_t a = 0; a < rs.size(); ++a) {
      for (int p = 0; p < static_cast<int>(rs[a].size()); ++p) {
        const int v = rs[a][p] + 1;
        const int prev = Node(rs[a], p - 1);
        const int next = Node(rs[a], p + 1);
        double removal = c_(prev, v) + c_(v, next) - c_(prev, next);
        if (rs[a].size() == 1) removal += f_;
        for (std::size_t b = 0; b < rs.size(); ++b) {
          if (b == a || rs[b].empty()) continue;
          if (load_[b] + Demand(v - 1) > q_ + kEps) continue;
          for (int q = 0; q <= static_cast<int>(rs[b].size()); ++q) {
            const int u = Node(rs[b], q - 1);
            const int w = Node(rs[b], q);
            const double insertion = c_(u, v) + c_(v, w) - c_(u, w);
            if (insertion - removal < -kEps) {
              rs[b].insert(rs[b].begin() + q, v - 1);
              rs[a].erase(rs[a].begin() + p);
              load_[b] += Demand(v - 1);
              load_[a] -= Demand(v - 1);
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  bool Swap() {
    std::vector<Route>& rs = *routes_;
    for (std::size_t a = 0; a < rs.size(); ++a) {
      for (std::size_t b = a + 1; b < rs.size(); ++b) {
        for (int p = 0; p < static_cast<int>(rs[a].size()); ++p) {
          const int u = rs[a][p] + 1;
          const int up = Node(rs[a], p - 1);
          const int un = Node(rs[a], p + 1);
          for (int q = 0; q < static_cast<int>(rs[b].size()); ++q) {
            const int v = rs[b][q] + 1;
            const double du = Demand(u - 1);
            const double dv = Demand(v - 1);
            if (load_[a] - du + dv > q_ + kEps) continue;
            if (load_[b] - dv + du > q_ + kEps) continue;
            const int vp = Node(rs[b], q - 1);
            const int vn = Node(rs[b], q + 1);
            const double delta = c_(up, v) + c_(v, un) - c_(up, u) - c_(u, un) +
                                 c_(vp, u) + c_(u, vn) - c_(vp, v) - c_(v, vn);
            if (delta < -kEps) {
              std::swap(rs[a][p], rs[b][q]);
              load_[a] += dv - du;
              load_[b] += du - dv;
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  bool TwoOpt() {
    for (Route& r : *routes_) {
      const int len = static_cast<int>(r.size());
      for (int i = 0; i < len; ++i) {
        for (int k = i + 1; k < len; ++k) {
          const int a = Node(r, i - 1);
          const int b = Node(r, i);
          const int cc = Node(r, k);
          const int d = Node(r, k + 1);
          const double delta = c_(a, cc) + c_(b, d) - c_(a, b) - c_(cc, d);
          if (delta < -kEps) {
            std::reverse(r.begin() + i, r.begin() + k + 1);
            return true;
          }
        }
      }
    }
    return false;
  }

  bool OrOpt() {
    for (Route& r : *routes_) {
      const int len = static_cast<int>(r.size());
      for (int seg = 1; seg <= 3 && seg < len; ++seg) {
        for (int i = 0; i + seg <= len; ++i) {
          const int before = Node(r, i - 1);
          const int first = r[i] + 1;
          const int last = r[i + seg - 1] + 1;
          const int after = Node(r, i + seg);
          const double removal =
              c_(before, first) + c_(last, after) - c_(before, after);
          Route rest;
          rest.reserve(len - seg);
          rest.insert(rest.end(), r.begin(), r.begin() + i);
          rest.insert(rest.end(), r.begin() + i + seg, r.end());
          for (int q = 0; q <= static_cast<int>(rest.size()); ++q) {
            if (q == i) continue;
            const int u = Node(rest, q - 1);
            const int w = Node(rest, q);
            const double fwd = c_(u, first) + c_(last, w) - c_(u, w);
            const double rev = c_(u, last) + c_(first, w) - c_(u, w);
            const bool reversed = rev < fwd;
            if (std::min(fwd, rev) - removal < -kEps) {
              Route segment(r.begin() + i, r.begin() + i + seg);
              if (reversed) std::reverse(segment.begin(), segment.end());
              rest.insert(rest.begin() + q, segment.begin(), segment.end());
              r = std::move(rest);
              return true;
            }
          }
        }
      }
    }
    return false;
  }

  const VrpInstance& vrp_;
  const CostMatrix& c_;
  double q_;
  double f_;
  std::vector<Route>* routes_ = nullptr;
  std::vector<double> load_;
};

std::vector<Route> ClarkeWright(const VrpInstance& vrp, const CostMatrix& c) {
  const int n = vrp.size();
  struct Saving {
    double value;
    int i;
    int j;
  };
  std::vector<Saving> savings;
  savings.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      savings.push_back({c(0, i + 1) + c(0, j + 1) - c(i + 1, j + 1), i, j});
    }
  }
  std::stable_sort(savings.begin(), savings.end(),
                   [](const Saving& a, const Saving& b) { return a.value > b.value; });

  std::vector<Route> routes(n);
  std::vector<int> route_of(n);
  std::vector<double> load(n);
  for (int j = 0; j < n; ++j) {
    routes[j] = {j};
    route_of[j] = j;
    load[j] = vrp.customers[j].demand;
  }
  for (const Saving& s : savings) {
    if (s.value + vrp.vehicle_fixed_cost <= kEps) break;
    const int ra = route_of[s.i];
    const int rb = route_of[s.j];
    if (ra == rb || load[ra] + load[rb] > vrp.vehicle_capacity + kEps) continue;
    Route& a = routes[ra];
    Route& b = routes[rb];
    // Orient so that a ends with i and b starts with j.
    if (a.back() != s.i) {
      if (a.front() != s.i) continue;
      std::reverse(a.begin(), a.end());
    }
    if (b.front() != s.j) {
      if (b.back() != s.j) continue;
      std::reverse(b.begin(), b.end());
    }
    a.insert(a.end(), b.begin(), b.end());
    for (int v : b) route_of[v] = ra;
    load[ra] += load[rb];
    b.clear();
    load[rb] = 0.0;
  }
  routes.erase(std::remove_if(routes.begin(), routes.end(),
                              [](const Route& r) { return r.empty(); }),
               routes.end());
  return routes;
}

// Removes random customers and reinserts them at their cheapest feasible
// position, opening a new route when nothing fits.
void Perturb(const VrpInstance& vrp, const CostMatrix& c, std::mt19937_64& rng,
             std::vector<Route>& routes) {
  const int n = vrp.size();
  const int max_k = std::max(2, n / 4);
  const int k = std::uniform_int_distribution<int>(1, std::min(n, max_k))(rng);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<int> removed(all.begin(), all.begin() + k);
  std::vector<char> is_removed(n, 0);
  for (int j : removed) is_removed[j] = 1;
  for (Route& r : routes) {
    r.erase(std::remove_if(r.begin(), r.end(), [&](int j) { return is_removed[j]; }),
            r.end());
  }
  routes.erase(std::remove_if(routes.begin(), routes.end(),
                              [](const Route& r) { return r.empty(); }),
               routes.end());
  std::vector<double> load(routes.size(), 0.0);
  for (std::size_t r = 0; r < routes.size(); ++r) {
    for (int j : routes[r]) load[r] += vrp.customers[j].demand;
  }
  auto node = [](const Route& r, int pos) {
    return pos < 0 || pos >= static_cast<int>(r.size()) ? 0 : r[pos] + 1;
  };
  for (int j : removed) {
    const int v = j + 1;
    const double d = vrp.customers[j].demand;
    double best = 2 * c(0, v) + vrp.vehicle_fixed_cost;
    int best_r = -1;
    int best_q = 0;
    for (std::size_t r = 0; r < routes.size(); ++r) {
      if (load[r] + d > vrp.vehicle_capacity + kEps) continue;
      for (int q = 0; q <= static_cast<int>(routes[r].size()); ++q) {
        const int u = node(routes[r], q - 1);
        const int w = node(routes[r], q);
        const double delta = c(u, v) + c(v, w) - c(u, w);
        if (delta < best - kEps) {
          best = delta;
          best_r = static_cast<int>(r);
          best_q = q;
        }
      }
    }
    if (best_r < 0) {
      routes.push_back({j});
      load.push_back(d);
    } else {
      routes[best_r].insert(routes[best_r].begin() + best_q, j);
      load[best_r] += d;
    }
  }
}

}  // namespace

RoutePlan SolveVrpHeuristic(const VrpInstance& vrp,
                            const HeuristicOptions& options) {
  RoutePlan plan;
  plan.solver_tag = "heuristic";
  if (vrp.size() == 0) return plan;
  for (const VrpCustomer& cu : vrp.customers) {
    if (cu.demand > vrp.vehicle_capacity + kEps) {
      throw Error(ErrorCode::kValidation, "customer demand exceeds Q");
    }
  }
  const CostMatrix c(vrp);
  LocalSearch ls(vrp, c);
  std::vector<Route> current = ClarkeWright(vrp, c);
  ls.Descend(current);
  double current_cost = PlanCost(vrp, current);
  std::vector<Route> best = current;
  double best_cost = current_cost;

  if (vrp.size() > 1) {
    std::mt19937_64 rng(options.seed);
    for (int it = 0; it < options.iterations; ++it) {
      std::vector<Route> trial = current;
      Perturb(vrp, c, rng, trial);
      ls.Descend(trial);
      const double cost = PlanCost(vrp, trial);
      if (cost <= current_cost + kEps) {
        current = std::move(trial);
        current_cost = cost;
        if (cost < best_cost - kEps) {
          best = current;
          best_cost = cost;
        }
      }
    }
  }
  plan.routes = std::move(best);
  plan.cost = best_cost;
  return plan;
}

LabelSolver ParseLabelSolver(const std::string& name) {
  if (name == "exact") return LabelSolver::kExact;
  if (name == "heuristic") return LabelSolver::kHeuristic;
  throw Error(ErrorCode::kConfig, "unknown labeler '" + name + "'");
}

OversizePolicy ParseOversizePolicy(const std::string& name) {
  if (name == "error") return OversizePolicy::kError;
  if (name == "heuristic") return OversizePolicy::kHeuristic;
  throw Error(ErrorCode::kConfig, "unknown oversize policy '" + name + "'");
}

VrpDataset LabelDataset(const VrpDataset& ds, const LabelOptions& options) {
  VrpDataset out = ds;
  const int count = static_cast<int>(ds.samples.size());
  if (options.solver == LabelSolver::kExact &&
      options.oversize == OversizePolicy::kError) {
    std::string ids;
    for (int k = 0; k < count; ++k) {
      if (ds.samples[k].vrp.size() > options.exact_limit) {
        ids += (ids.empty() ? "" : ",") + std::to_string(k);
      }
    }
    if (!ids.empty()) {
      throw Error(ErrorCode::kSize,
                  "samples exceed exact_limit " +
                      std::to_string(options.exact_limit) + ": " + ids);
    }
  }

  auto label_one = [&](int k) {
    VrpSample& s = out.samples[k];
    const bool exact = options.solver == LabelSolver::kExact &&
                       s.vrp.size() <= std::min(options.exact_limit, kExactHardLimit);
    RoutePlan plan;
    if (exact) {
      plan = SolveVrpExact(s.vrp, options.exact_limit);
    } else {
      HeuristicOptions h = options.heuristic;
      h.seed = options.heuristic.seed + static_cast<std::uint64_t>(k);
      plan = SolveVrpHeuristic(s.vrp, h);
    }
    s.label = plan.cost;
    s.label_solver = plan.solver_tag;
  };

  const int threads = std::max(1, std::min(options.threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) label_one(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int k = next++; k < count; k = next++) label_one(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  out.provenance["labeler"] = {
      {"solver", options.solver == LabelSolver::kExact ? "exact" : "heuristic"},
      {"exact_limit", options.exact_limit},
      {"iterations", options.heuristic.iterations},
      {"seed", options.heuristic.seed}};
  return out;
}

FinalizedSolution FinalizeRoutes(const ClrpInstance& inst,
                                 const LocationAllocation& la,
                                 const RoutingOptions& options) {
  const std::vector<Violation> violations = ValidateLocationAllocation(inst, la);
  if (!violations.empty()) {
    std::string message = "location-allocation outside the feasible set:";
    for (const Violation& v : violations) message += " " + v.message + ";";
    throw Error(ErrorCode::kValidation, message);
  }
  FinalizedSolution out;
  out.depot_cost.assign(inst.num_depots(), 0.0);
  out.depot_solver.assign(inst.num_depots(), "");
  for (int i = 0; i < inst.num_depots(); ++i) {
    if (!la.open[i]) continue;
    DepotPlan dp;
    dp.depot = i;
    dp.customers = la.CustomersOf(i);
    if (!dp.customers.empty()) {
      const VrpInstance vrp = InducedVrp(inst, i, dp.customers);
      RoutePlan plan;
      if (vrp.size() <= std::min(options.exact_limit, kExactHardLimit)) {
        plan = SolveVrpExact(vrp, options.exact_limit);
      } else {
        HeuristicOptions h = options.heuristic;
        h.seed = options.heuristic.seed + static_cast<std::uint64_t>(i);
        plan = SolveVrpHeuristic(vrp, h);
      }
      for (const Route& r : plan.routes) {
        std::vector<int> mapped;
        for (int local : r) mapped.push_back(dp.customers[local]);
        dp.routes.push_back(std::move(mapped));
      }
      out.depot_cost[i] = DepotRoutingCost(inst, i, dp.routes);
      out.depot_solver[i] = plan.solver_tag;
    }
    out.solution.open.push_back(std::move(dp));
  }
  out.solution.total_cost = SolutionCost(inst, out.solution);
  return out;
}

}  // namespace neolrp
