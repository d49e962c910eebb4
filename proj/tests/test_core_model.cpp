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

#include <random>

#include "neolrp/core_model.hpp"
#include "neolrp/errors.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

ClrpInstance OneDepotOneCustomer() {
  ClrpInstance inst;
  inst.depots = {{0, {0, 0}, 100, 100}};
  inst.customers = {{1, {3, 4}, 5}};
  inst.vehicle_capacity = 10;
  inst.vehicle_fixed_cost = 10;
  inst.rounding = RoundingMode::kRaw;
  return inst;
}

TEST(ArcCost, Examples) {
  EXPECT_EQ(ArcCost({0, 0}, {3, 4}, RoundingMode::kRaw), 5.0);
  EXPECT_EQ(ArcCost({0, 0}, {3, 4}, RoundingMode::kProdhon100), 500.0);
  EXPECT_EQ(ArcCost({0, 0}, {1, 1}, RoundingMode::kProdhon100), 142.0);
}

TEST(ArcCost, RoundingNames) {
  EXPECT_EQ(ParseRoundingMode("raw"), RoundingMode::kRaw);
  EXPECT_EQ(ParseRoundingMode("prodhon100"), RoundingMode::kProdhon100);
  EXPECT_THROW(ParseRoundingMode("ceil"), Error);
}

TEST(SolutionCost, SingleOutAndBack) {
  const ClrpInstance inst = OneDepotOneCustomer();
  ClrpSolution sol;
  sol.open.push_back({0, {0}, {{0}}});
  EXPECT_TRUE(ValidateSolution(inst, sol).empty());
  EXPECT_EQ(SolutionCost(inst, sol), 120.0);
}

TEST(SolutionCost, NothingOpenNoCustomers) {
  ClrpInstance inst = OneDepotOneCustomer();
  inst.customers.clear();
  EXPECT_EQ(SolutionCost(inst, ClrpSolution{}), 0.0);
}

TEST(SolutionCost, ThreeCustomersMatchesEnumeration) {
  ClrpInstance inst;
  inst.depots = {{0, {0, 0}, 100, 50}};
  inst.customers = {{1, {4, 0}, 4}, {2, {4, 3}, 4}, {3, {-2, 5}, 4}};
  inst.vehicle_capacity = 8;
  inst.vehicle_fixed_cost = 3;
  inst.rounding = RoundingMode::kRaw;
  const VrpInstance vrp = InducedVrp(inst, 0, {0, 1, 2});
  const double oracle = testing::BruteForceVrp(vrp);

  // Best over every partition into routes of at most two customers and every order.
  double best = std::numeric_limits<double>::infinity();
  const std::vector<std::vector<std::vector<int>>> plans = {
      {{0, 1}, {2}}, {{1, 0}, {2}}, {{0, 2}, {1}}, {{2, 0}, {1}}, {{1, 2}, {0}},
      {{2, 1}, {0}}, {{0}, {1}, {2}}};
  for (const auto& routes : plans) {
    ClrpSolution sol;
    sol.open.push_back({0, {0, 1, 2}, routes});
    best = std::min(best, SolutionCost(inst, sol));
  }
  EXPECT_NEAR(best, 50.0 + oracle, 1e-9);
}

TEST(SolutionCost, InfeasibleThrows) {
  const ClrpInstance inst = OneDepotOneCustomer();
  EXPECT_THROW(
      {
        try {
          SolutionCost(inst, ClrpSolution{});
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kValidation);
          throw;
        }
      },
      Error);
}

TEST(ValidateSolution, Violations) {
  ClrpInstance inst;
  inst.depots = {{0, {0, 0}, 100, 1}, {1, {10, 0}, 100, 1}};
  inst.customers = {{2, {1, 1}, 6}, {3, {2, 2}, 5}};
  inst.vehicle_capacity = 10;
  inst.vehicle_fixed_cost = 1;

  ClrpSolution twice;
  twice.open.push_back({0, {0, 1}, {{0}, {1}}});
  twice.open.push_back({1, {0}, {{0}}});
  auto v = ValidateSolution(inst, twice);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kPartition);
  EXPECT_EQ(v[0].ids, std::vector<int>{2});

  ClrpSolution overloaded;
  overloaded.open.push_back({0, {0, 1}, {{0, 1}}});
  v = ValidateSolution(inst, overloaded);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kVehicleCapacity);
  EXPECT_EQ(v[0].ids, (std::vector<int>{2, 3}));

  inst.depots[0].capacity = 10;
  ClrpSolution depot_over;
  depot_over.open.push_back({0, {0, 1}, {{0}, {1}}});
  v = ValidateSolution(inst, depot_over);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kDepotCapacity);
}

TEST(NormalizeFeatures, Examples) {
  VrpInstance v;
  v.depot = {0, 0};
  v.vehicle_capacity = 7;
  v.customers = {{{3.5, 0}, 7}};
  NormalizedFeatures f = NormalizeFeatures(v);
  EXPECT_EQ(f.scale, 3.5);
  EXPECT_EQ(f.sigma[0], (Feature{1, 0, 1}));

  v.vehicle_capacity = 10;
  v.customers = {{{2, 1}, 5}, {{-4, 3}, 10}};
  f = NormalizeFeatures(v);
  EXPECT_EQ(f.scale, 4.0);
  EXPECT_EQ(f.sigma[0], (Feature{0.5, 0.25, 0.5}));
  EXPECT_EQ(f.sigma[1], (Feature{-1, 0.75, 1}));

  VrpInstance moved = v;
  moved.depot = {100, -40};
  for (auto& c : moved.customers) c.coord = {c.coord.x + 100, c.coord.y - 40};
  const NormalizedFeatures g = NormalizeFeatures(moved);
  EXPECT_EQ(g.scale, f.scale);
  EXPECT_EQ(g.sigma, f.sigma);
}

TEST(NormalizeFeatures, DegenerateScale) {
  VrpInstance v;
  v.depot = {5, 5};
  v.vehicle_capacity = 4;
  v.customers = {{{5, 5}, 2}};
  const NormalizedFeatures f = NormalizeFeatures(v);
  EXPECT_EQ(f.scale, 1.0);
  EXPECT_EQ(f.sigma[0], (Feature{0, 0, 0.5}));
}

TEST(NormalizeFeatures, NonPositiveCapacity) {
  VrpInstance v;
  v.customers = {{{1, 1}, 1}};
  v.vehicle_capacity = 0;
  EXPECT_THROW(NormalizeFeatures(v), Error);
}

TEST(NormalizeFeatures, RangeAndTranslationProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500, 500);
  std::uniform_int_distribution<int> shift(-1000, 1000);
  for (int t = 0; t < 200; ++t) {
    VrpInstance v = testing::RandomVrp(1 + t % 12, 100 + t, RoundingMode::kRaw, 30.0);
    for (auto& c : v.customers) c.coord = {u(rng), u(rng)};
    const NormalizedFeatures f = NormalizeFeatures(v);
    for (const Feature& s : f.sigma) {
      for (double x : s) {
        EXPECT_GE(x, -1.0);
        EXPECT_LE(x, 1.0);
      }
    }
    // Integer data and integer shifts keep every difference exact.
    VrpInstance a = testing::RandomVrp(1 + t % 12, 100 + t, RoundingMode::kRaw, 30.0);
    VrpInstance b = a;
    const double dx = shift(rng), dy = shift(rng);
    b.depot = {a.depot.x + dx, a.depot.y + dy};
    for (auto& c : b.customers) c.coord = {c.coord.x + dx, c.coord.y + dy};
    const NormalizedFeatures fa = NormalizeFeatures(a);
    const NormalizedFeatures fb = NormalizeFeatures(b);
    EXPECT_EQ(fa.scale, fb.scale);
    EXPECT_EQ(fa.sigma, fb.sigma);
  }
}

TEST(Prodhon, RoundTrip) {
  ClrpInstance inst = OneDepotOneCustomer();
  inst.rounding = RoundingMode::kProdhon100;
  const ClrpInstance back = ParseProdhon(WriteProdhon(inst));
  ASSERT_EQ(back.num_depots(), 1);
  ASSERT_EQ(back.num_customers(), 1);
  EXPECT_EQ(back.depots[0].coord, inst.depots[0].coord);
  EXPECT_EQ(back.depots[0].capacity, 100);
  EXPECT_EQ(back.depots[0].fixed_cost, 100);
  EXPECT_EQ(back.customers[0].coord, inst.customers[0].coord);
  EXPECT_EQ(back.customers[0].demand, 5);
  EXPECT_EQ(back.vehicle_capacity, 10);
  EXPECT_EQ(back.vehicle_fixed_cost, 10);
  EXPECT_EQ(back.rounding, RoundingMode::kProdhon100);
  EXPECT_EQ(WriteProdhon(back), WriteProdhon(inst));

  const ClrpInstance big = testing::RandomInstance(20, 5, 3);
  EXPECT_EQ(WriteProdhon(ParseProdhon(WriteProdhon(big))), WriteProdhon(big));
}

TEST(Prodhon, FlagSelectsRounding) {
  const std::string text = "1\n1\n0 0\n3 4\n10\n100\n5\n100\n10\n0\n";
  EXPECT_EQ(ParseProdhon(text).rounding, RoundingMode::kRaw);
  EXPECT_EQ(ParseProdhon(text, RoundingMode::kProdhon100).rounding,
            RoundingMode::kProdhon100);
}

TEST(Prodhon, TruncatedNamesSection) {
  const std::string text = "3\n1\n\n0 0\n\n1 1\n2 2\n3 3\n\n10\n\n100\n\n5\n4\n";
  try {
    ParseProdhon(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.section(), "customer demands");
    EXPECT_GT(e.line(), 0);
    EXPECT_NE(std::string(e.what()).find("customer demands"), std::string::npos);
  }
}

TEST(Prodhon, MalformedInputs) {
  EXPECT_THROW(ParseProdhon("x\n1\n"), ParseError);
  EXPECT_THROW(ParseProdhon("1\n1\n0 0\n3 4\n10\n100\n5\n100\n10\n0\n7\n"), ParseError);
  EXPECT_THROW(ParseProdhon("1\n1\n0 0\n3 4\n10\n100\nabc\n100\n10\n0\n"), ParseError);
  EXPECT_THROW(ParseProdhon("1\n1\n0 0\n3 4\n10\n100\n5\n100\n10\n2\n"), ParseError);
}

TEST(Prodhon, MissingFile) {
  try {
    LoadProdhon("/nonexistent/coord.dat");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Instance, InvariantsChecked) {
  ClrpInstance inst = OneDepotOneCustomer();
  inst.customers[0].demand = 11;  // above Q
  EXPECT_THROW(CheckInstance(inst), Error);
  inst = OneDepotOneCustomer();
  inst.customers[0].id = 0;  // clashes with the depot id
  EXPECT_THROW(CheckInstance(inst), Error);
  inst = OneDepotOneCustomer();
  inst.depots[0].capacity = 0;
  EXPECT_THROW(CheckInstance(inst), Error);
}

// Independent feasibility oracle: plain nested loops over the four conditions.
bool OracleFeasible(const ClrpInstance& inst, const ClrpSolution& sol) {
  const int n = inst.num_customers();
  for (std::size_t a = 0; a < sol.open.size(); ++a) {
    for (std::size_t b = a + 1; b < sol.open.size(); ++b) {
      if (sol.open[a].depot == sol.open[b].depot) return false;
    }
  }
  for (int j = 0; j < n; ++j) {
    int owners = 0;
    for (const DepotPlan& p : sol.open) {
      for (int k : p.customers) owners += (k == j);
    }
    if (owners != 1) return false;
  }
  for (const DepotPlan& p : sol.open) {
    double load = 0.0;
    for (int k : p.customers) load += inst.customers[k].demand;
    if (load > inst.depots[p.depot].capacity) return false;
    for (const auto& r : p.routes) {
      if (r.empty()) return false;
      double rl = 0.0;
      for (int k : r) rl += inst.customers[k].demand;
      if (rl > inst.vehicle_capacity) return false;
    }
    for (int k : p.customers) {
      int visits = 0;
      for (const auto& r : p.routes) {
        for (int q : r) visits += (q == k);
      }
      if (visits != 1) return false;
    }
    for (const auto& r : p.routes) {
      for (int q : r) {
        if (std::find(p.customers.begin(), p.customers.end(), q) == p.customers.end()) {
          return false;
        }
      }
    }
  }
  return true;
}

TEST(ValidateSolution, AgreesWithNestedLoopOracle) {
  std::mt19937_64 rng(5);
  int feasible_seen = 0;
  for (int t = 0; t < 3000; ++t) {
    const int n = 1 + t % 5, m = 1 + t % 3;
    ClrpInstance inst = testing::RandomInstance(n, m, t);
    inst.vehicle_capacity = 35;
    std::uniform_int_distribution<int> pick_depot(0, m - 1);
    std::uniform_int_distribution<int> pick_cust(0, n - 1);
    std::uniform_int_distribution<int> coin(0, 9);
    // Mostly well-formed allocations with occasional corruption.
    std::vector<int> owner(n);
    for (int j = 0; j < n; ++j) owner[j] = pick_depot(rng);
    ClrpSolution sol;
    for (int i = 0; i < m; ++i) {
      DepotPlan p;
      p.depot = i;
      for (int j = 0; j < n; ++j) {
        if (owner[j] == i) p.customers.push_back(j);
      }
      if (p.customers.empty()) continue;
      std::vector<int> route;
      for (int j : p.customers) {
        route.push_back(j);
        if (coin(rng) < 5) {
          p.routes.push_back(route);
          route.clear();
        }
      }
      if (!route.empty()) p.routes.push_back(route);
      sol.open.push_back(p);
    }
    const int corruption = coin(rng);
    if (corruption == 0 && !sol.open.empty()) sol.open[0].customers.push_back(pick_cust(rng));
    if (corruption == 1 && !sol.open.empty()) sol.open[0].routes.push_back({pick_cust(rng)});
    if (corruption == 2 && !sol.open.empty()) sol.open.pop_back();
    if (corruption == 3 && !sol.open.empty()) sol.open.push_back(sol.open[0]);
    if (corruption == 4 && !sol.open.empty()) sol.open[0].routes.push_back({});

    const bool expected = OracleFeasible(inst, sol);
    feasible_seen += expected;
    EXPECT_EQ(ValidateSolution(inst, sol).empty(), expected) << "trial " << t;
  }
  EXPECT_GT(feasible_seen, 100);
}

TEST(SolutionCost, AdditiveOverDepots) {
  for (int t = 0; t < 50; ++t) {
    const ClrpInstance inst = testing::RandomInstance(8, 3, 40 + t);
    ClrpSolution sol;
    double expected = 0.0;
    for (int i = 0; i < 3; ++i) {
      DepotPlan p{i, {}, {}};
      for (int j = i; j < 8; j += 3) {
        p.customers.push_back(j);
        p.routes.push_back({j});
      }
      expected += inst.depots[i].fixed_cost + DepotRoutingCost(inst, i, p.routes);
      sol.open.push_back(p);
    }
    EXPECT_EQ(SolutionCost(inst, sol), expected);
  }
}

}  // namespace
}  // namespace neolrp
