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

#include <cmath>
#include <numeric>

#include "neolrp/errors.hpp"
#include "neolrp/routing.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

VrpInstance Line(std::vector<VrpCustomer> customers, double q, double f) {
  VrpInstance v;
  v.depot = {0, 0};
  v.customers = std::move(customers);
  v.vehicle_capacity = q;
  v.vehicle_fixed_cost = f;
  return v;
}

TEST(Exact, SingleCustomer) {
  const VrpInstance v = Line({{{3, 4}, 2}}, 5, 10);
  const RoutePlan p = SolveVrpExact(v);
  EXPECT_EQ(p.cost, 20.0);
  ASSERT_EQ(p.routes.size(), 1u);
  EXPECT_EQ(p.solver_tag, "exact");
}

TEST(Exact, CapacityForcesSplit) {
  const VrpInstance v = Line({{{3, 4}, 5}, {{6, 8}, 5}}, 5, 10);
  const RoutePlan p = SolveVrpExact(v);
  EXPECT_EQ(p.routes.size(), 2u);
  EXPECT_EQ(p.cost, 2 * 10 + 2 * 5 + 2 * 10);
}

TEST(Exact, SizeLimit) {
  const VrpInstance v = testing::RandomVrp(11, 1, RoundingMode::kRaw);
  try {
    SolveVrpExact(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSize);
  }
  EXPECT_NO_THROW(SolveVrpExact(v, 11));
  EXPECT_THROW(SolveVrpExact(testing::RandomVrp(17, 1, RoundingMode::kRaw), 17), Error);
}

TEST(Exact, EmptyInstance) {
  const RoutePlan p = SolveVrpExact(Line({}, 5, 10));
  EXPECT_EQ(p.cost, 0.0);
  EXPECT_TRUE(p.routes.empty());
}

TEST(Exact, MatchesBruteForce) {
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 7;
    const RoundingMode mode = t % 2 ? RoundingMode::kRaw : RoundingMode::kProdhon100;
    const VrpInstance v = testing::RandomVrp(n, 500 + t, mode, 14 + t % 10, t % 3 * 20);
    const RoutePlan p = SolveVrpExact(v);
    ASSERT_TRUE(IsFeasiblePlan(v, p.routes));
    if (mode == RoundingMode::kProdhon100) {
      EXPECT_EQ(p.cost, testing::BruteForceVrp(v)) << "trial " << t;
    } else {
      EXPECT_NEAR(p.cost, testing::BruteForceVrp(v), 1e-9 * p.cost) << "trial " << t;
    }
    EXPECT_NEAR(p.cost, PlanCost(v, p.routes), 1e-9 * std::max(1.0, p.cost));
  }
}

TEST(Exact, VehicleCountBounds) {
  for (int t = 0; t < 60; ++t) {
    const VrpInstance v = testing::RandomVrp(1 + t % 9, 900 + t, RoundingMode::kRaw, 15, 0);
    const RoutePlan p = SolveVrpExact(v);
    EXPECT_LE(static_cast<int>(p.routes.size()), v.size());
    EXPECT_GE(static_cast<double>(p.routes.size()),
              std::ceil(v.total_demand() / v.vehicle_capacity - 1e-12));
  }
}

TEST(Exact, ScaleCovariance) {
  for (int t = 0; t < 30; ++t) {
    const VrpInstance v = testing::RandomVrp(2 + t % 7, 300 + t, RoundingMode::kRaw, 20, 0);
    const double base = SolveVrpExact(v).cost;
    for (double lambda : {0.37, 2.5, 1000.0}) {
      VrpInstance s = v;
      s.depot = {v.depot.x * lambda, v.depot.y * lambda};
      for (auto& c : s.customers) c.coord = {c.coord.x * lambda, c.coord.y * lambda};
      EXPECT_NEAR(SolveVrpExact(s).cost, lambda * base, 1e-9 * lambda * base);
    }
  }
}

TEST(Heuristic, SingleCustomerMatchesExact) {
  const VrpInstance v = Line({{{3, 4}, 2}}, 5, 10);
  const RoutePlan p = SolveVrpHeuristic(v);
  EXPECT_EQ(p.cost, 20.0);
  EXPECT_EQ(p.solver_tag, "heuristic");
}

TEST(Heuristic, NeverBelowExact) {
  for (int t = 0; t < 80; ++t) {
    const RoundingMode mode = t % 2 ? RoundingMode::kRaw : RoundingMode::kProdhon100;
    const VrpInstance v = testing::RandomVrp(1 + t % 8, 700 + t, mode, 20, 15);
    const RoutePlan e = SolveVrpExact(v);
    const RoutePlan h = SolveVrpHeuristic(v, {200, static_cast<std::uint64_t>(t)});
    EXPECT_TRUE(IsFeasiblePlan(v, h.routes));
    EXPECT_GE(h.cost, e.cost - 1e-9 * e.cost);
    EXPECT_NEAR(h.cost, PlanCost(v, h.routes), 1e-9 * h.cost);
  }
}

TEST(Heuristic, CollinearRadialOrder) {
  const VrpInstance v = Line({{{3, 0}, 1}, {{9, 0}, 1}, {{1, 0}, 1}, {{5, 0}, 1}}, 10, 100);
  const RoutePlan e = SolveVrpExact(v);
  const RoutePlan h = SolveVrpHeuristic(v);
  EXPECT_EQ(h.cost, e.cost);
  ASSERT_EQ(h.routes.size(), 1u);
  // Every out-and-back order ties on a ray, so compare against the radial tour.
  EXPECT_EQ(RouteCost(v, h.routes[0]), RouteCost(v, Route{2, 0, 3, 1}));
  EXPECT_EQ(e.cost, RouteCost(v, Route{2, 0, 3, 1}));
}

TEST(Heuristic, DeterministicForSeed) {
  const VrpInstance v = testing::RandomVrp(30, 4, RoundingMode::kRaw, 40, 5);
  const RoutePlan a = SolveVrpHeuristic(v, {300, 9});
  const RoutePlan b = SolveVrpHeuristic(v, {300, 9});
  EXPECT_EQ(a.routes, b.routes);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_TRUE(IsFeasiblePlan(v, a.routes));
}

TEST(Heuristic, LargeInstanceFeasible) {
  const VrpInstance v = testing::RandomVrp(100, 12, RoundingMode::kProdhon100, 35, 1000);
  const RoutePlan p = SolveVrpHeuristic(v, {100, 1});
  EXPECT_TRUE(IsFeasiblePlan(v, p.routes));
}

TEST(Plan, FeasibilityCheck) {
  const VrpInstance v = Line({{{1, 0}, 3}, {{2, 0}, 3}}, 5, 1);
  EXPECT_TRUE(IsFeasiblePlan(v, {{0}, {1}}));
  EXPECT_FALSE(IsFeasiblePlan(v, {{0, 1}}));
  EXPECT_FALSE(IsFeasiblePlan(v, {{0}}));
  EXPECT_FALSE(IsFeasiblePlan(v, {{0}, {0}, {1}}));
  EXPECT_EQ(RouteCost(v, {}), 0.0);
}

VrpDataset SingletonDataset() {
  VrpDataset ds;
  for (int k = 0; k < 5; ++k) {
    VrpSample s;
    s.vrp = Line({{{3.0 * (k + 1), 4.0 * (k + 1)}, 1}}, 5, 10);
    ds.samples.push_back(s);
  }
  return ds;
}

TEST(Label, SingletonsGetOutAndBack) {
  for (LabelSolver solver : {LabelSolver::kExact, LabelSolver::kHeuristic}) {
    LabelOptions o;
    o.solver = solver;
    const VrpDataset out = LabelDataset(SingletonDataset(), o);
    for (int k = 0; k < 5; ++k) {
      EXPECT_EQ(*out.samples[k].label, 10 + 2 * 5.0 * (k + 1));
    }
    EXPECT_EQ(*out.samples[0].label_solver,
              solver == LabelSolver::kExact ? "exact" : "heuristic");
  }
}

TEST(Label, IdempotentAndThreadCountIndependent) {
  VrpDataset ds;
  for (int k = 0; k < 12; ++k) ds.samples.push_back({testing::RandomVrp(12, k, RoundingMode::kRaw), {}, {}});
  LabelOptions o;
  o.heuristic.iterations = 50;
  const VrpDataset a = LabelDataset(ds, o);
  const VrpDataset b = LabelDataset(a, o);
  o.threads = 4;
  const VrpDataset c = LabelDataset(ds, o);
  for (int k = 0; k < 12; ++k) {
    EXPECT_EQ(a.samples[k].label, b.samples[k].label);
    EXPECT_EQ(a.samples[k].label, c.samples[k].label);
  }
}

TEST(Label, OversizePolicy) {
  VrpDataset ds;
  ds.samples.push_back({testing::RandomVrp(3, 1, RoundingMode::kRaw), {}, {}});
  ds.samples.push_back({testing::RandomVrp(12, 2, RoundingMode::kRaw), {}, {}});
  LabelOptions o;
  o.solver = LabelSolver::kExact;
  o.oversize = OversizePolicy::kError;
  try {
    LabelDataset(ds, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSize);
    EXPECT_NE(std::string(e.what()).find(": 1"), std::string::npos);
  }
  o.oversize = OversizePolicy::kHeuristic;
  o.heuristic.iterations = 20;
  const VrpDataset out = LabelDataset(ds, o);
  EXPECT_EQ(*out.samples[0].label_solver, "exact");
  EXPECT_EQ(*out.samples[1].label_solver, "heuristic");
  EXPECT_THROW(ParseLabelSolver("lkh"), Error);
  EXPECT_THROW(ParseOversizePolicy("skip"), Error);
}

ClrpInstance SmallClrp() {
  ClrpInstance inst;
  inst.depots = {{0, {0, 0}, 100, 100}, {1, {50, 50}, 100, 70}};
  inst.customers = {{2, {3, 4}, 5}};
  inst.vehicle_capacity = 10;
  inst.vehicle_fixed_cost = 10;
  return inst;
}

TEST(Finalize, OneDepotOneCustomer) {
  const ClrpInstance inst = SmallClrp();
  LocationAllocation la{{0}, {true, false}};
  const FinalizedSolution f = FinalizeRoutes(inst, la);
  EXPECT_EQ(f.solution.total_cost, 100 + 10 + 2 * 5);
  EXPECT_EQ(f.depot_cost, (std::vector<double>{20, 0}));
  EXPECT_TRUE(ValidateSolution(inst, f.solution).empty());
}

TEST(Finalize, AllClosedIsValidationError) {
  const ClrpInstance inst = SmallClrp();
  LocationAllocation la{{-1}, {false, false}};
  try {
    FinalizeRoutes(inst, la);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
  LocationAllocation closed_target{{1}, {true, false}};
  EXPECT_THROW(FinalizeRoutes(inst, closed_target), Error);
}

TEST(Finalize, MixesExactAndHeuristic) {
  const ClrpInstance inst = testing::RandomInstance(20, 2, 17);
  LocationAllocation la;
  la.open = {true, true};
  for (int j = 0; j < 20; ++j) la.depot_of.push_back(j < 6 ? 0 : 1);
  RoutingOptions ro;
  ro.heuristic.iterations = 100;
  const FinalizedSolution f = FinalizeRoutes(inst, la, ro);
  EXPECT_EQ(f.depot_solver, (std::vector<std::string>{"exact", "heuristic"}));
  EXPECT_TRUE(ValidateSolution(inst, f.solution).empty());
  EXPECT_EQ(f.solution.total_cost, inst.depots[0].fixed_cost + inst.depots[1].fixed_cost +
                                       f.depot_cost[0] + f.depot_cost[1]);
}

}  // namespace
}  // namespace neolrp
