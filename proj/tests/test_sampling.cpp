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

#include <filesystem>
#include <set>

#include "neolrp/errors.hpp"
#include "neolrp/sampling.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

ClrpInstance Source(int n, double capacity, double demand) {
  ClrpInstance inst;
  inst.name = "src";
  inst.depots = {{0, {0, 0}, capacity, 10}};
  for (int j = 0; j < n; ++j) {
    inst.customers.push_back({1 + j, {double(j), double(2 * j + 1)}, demand});
  }
  inst.vehicle_capacity = std::max(demand, 10.0);
  inst.vehicle_fixed_cost = 5;
  return inst;
}

TEST(Rscc, AcceptsCapacityFeasibleSubsets) {
  const ClrpInstance src = Source(12, 100, 10);
  const VrpDataset ds = RsccSample({src}, 300, 1);
  ASSERT_EQ(ds.size(), 300u);
  bool saw_five = false;
  for (const VrpSample& s : ds.samples) {
    EXPECT_LE(s.vrp.total_demand(), 100.0);
    saw_five |= s.vrp.size() == 5;
  }
  EXPECT_TRUE(saw_five);
}

TEST(Rscc, AllFeasibleGivesExactCountOfUniqueSamples) {
  const ClrpInstance src = Source(10, 1000, 5);
  const VrpDataset ds = RsccSample({src}, 500, 3);
  ASSERT_EQ(ds.size(), 500u);
  std::set<std::vector<double>> keys;
  for (const VrpSample& s : ds.samples) keys.insert(SampleKey(s.vrp));
  EXPECT_EQ(keys.size(), 500u);
}

TEST(Rscc, Determinism) {
  const ClrpInstance src = testing::RandomInstance(20, 5, 9);
  const std::string a = DatasetToJsonl(RsccSample({src}, 200, 42));
  const std::string b = DatasetToJsonl(RsccSample({src}, 200, 42));
  const std::string c = DatasetToJsonl(RsccSample({src}, 200, 43));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Rscc, StallsOnUnsatisfiableSource) {
  const ClrpInstance src = Source(4, 5, 10);  // every demand exceeds capacity
  try {
    RsccSample({src}, 3, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGenerationStall);
  }
  EXPECT_THROW(PsccSample({src}, 3, 0), Error);
}

TEST(Rscc, RequiresSources) {
  EXPECT_THROW(RsccSample({}, 3, 0), Error);
  EXPECT_THROW(RsccSample({Source(3, 100, 1)}, 0, 0), Error);
}

ClrpInstance TwoDepotSource(Point a, Point b, double cap_a = 100, double cap_b = 100) {
  ClrpInstance inst;
  inst.depots = {{0, a, cap_a, 1}, {1, b, cap_b, 1}};
  inst.customers = {{2, {0, 0}, 1}};
  inst.vehicle_capacity = 10;
  inst.vehicle_fixed_cost = 0;
  return inst;
}

TEST(Pscc, ChoosesCheapestFeasibleDepot) {
  // Single customer at the origin: depot totals are 120 and 95.
  VrpDataset ds = PsccSample({TwoDepotSource({120, 0}, {0, 95})}, 1, 0);
  EXPECT_EQ(ds.samples[0].vrp.depot, (Point{0, 95}));
  ds = PsccSample({TwoDepotSource({0, 95}, {120, 0})}, 1, 0);
  EXPECT_EQ(ds.samples[0].vrp.depot, (Point{0, 95}));
}

TEST(Pscc, SingleFeasibleDepot) {
  const VrpDataset ds = PsccSample({TwoDepotSource({1, 0}, {500, 0}, 0.5, 100)}, 1, 0);
  EXPECT_EQ(ds.samples[0].vrp.depot, (Point{500, 0}));
}

TEST(Pscc, TieGoesToLowerIndex) {
  const VrpDataset ds = PsccSample({TwoDepotSource({3, 4}, {-4, 3})}, 1, 0);
  EXPECT_EQ(ds.samples[0].vrp.depot, (Point{3, 4}));
}

TEST(Pscc, OptimalityAndCapacityProperty) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ClrpInstance src = testing::RandomInstance(20, 5, 70 + seed);
    const VrpDataset ds = PsccSample({src}, 200, seed);
    for (const VrpSample& s : ds.samples) {
      double chosen = -1.0, best = std::numeric_limits<double>::infinity();
      const double load = s.vrp.total_demand();
      for (const Depot& d : src.depots) {
        double sum = 0.0;
        for (const VrpCustomer& c : s.vrp.customers) sum += ArcCost(d.coord, c.coord, src.rounding);
        if (d.coord == s.vrp.depot) {
          chosen = sum;
          EXPECT_LE(load, d.capacity);
        }
        if (load <= d.capacity) best = std::min(best, sum);
      }
      EXPECT_EQ(chosen, best);
    }
  }
}

TEST(Rscc, CapacitySoundnessProperty) {
  const ClrpInstance src = testing::RandomInstance(20, 5, 81);
  const VrpDataset ds = RsccSample({src}, 400, 2);
  for (const VrpSample& s : ds.samples) {
    bool matched = false;
    for (const Depot& d : src.depots) {
      if (d.coord == s.vrp.depot && s.vrp.total_demand() <= d.capacity) matched = true;
    }
    EXPECT_TRUE(matched);
  }
}

TEST(Gvs, CenteredDepot) {
  GvsParams p;
  p.max_customers = 20;
  p.depot_positioning = "centered";
  for (const VrpSample& s : GvsSample(p, 50, 4).samples) {
    EXPECT_EQ(s.vrp.depot, (Point{500, 500}));
  }
  p.depot_positioning = "cornered";
  for (const VrpSample& s : GvsSample(p, 50, 4).samples) {
    EXPECT_EQ(s.vrp.depot, (Point{0, 0}));
  }
}

TEST(Gvs, UnitaryDemand) {
  GvsParams p;
  p.max_customers = 30;
  p.demand_scheme = "unitary";
  for (const VrpSample& s : GvsSample(p, 100, 5).samples) {
    for (const VrpCustomer& c : s.vrp.customers) EXPECT_EQ(c.demand, 1.0);
    // Q = ceil(r) with r inside the ultra-long..very-short envelope [3, 50].
    EXPECT_GE(s.vrp.vehicle_capacity, 3.0);
    EXPECT_LE(s.vrp.vehicle_capacity, 50.0);
    EXPECT_EQ(s.vrp.vehicle_capacity, std::floor(s.vrp.vehicle_capacity));
  }
  p.route_size = "very-short";
  for (const VrpSample& s : GvsSample(p, 100, 5).samples) {
    EXPECT_GE(s.vrp.vehicle_capacity, 3.0);
    EXPECT_LE(s.vrp.vehicle_capacity, 5.0);
  }
}

TEST(Gvs, RandomPositionsAreUniformAcrossQuadrants) {
  GvsParams p;
  p.min_customers = 5;
  p.max_customers = 20;
  p.customer_positioning = "random";
  const VrpDataset ds = GvsSample(p, 1000, 6);
  std::array<int, 4> counts{};
  int total = 0;
  for (const VrpSample& s : ds.samples) {
    for (const VrpCustomer& c : s.vrp.customers) {
      ++counts[(c.coord.x >= 500) + 2 * (c.coord.y >= 500)];
      ++total;
      EXPECT_GE(c.coord.x, 0);
      EXPECT_LE(c.coord.x, 1000);
    }
  }
  for (int q = 0; q < 4; ++q) {
    EXPECT_NEAR(double(counts[q]) / total, 0.25, 0.05);
  }
}

TEST(Gvs, DemandsFitVehicle) {
  GvsParams p;
  p.max_customers = 40;
  for (const VrpSample& s : GvsSample(p, 300, 7).samples) {
    ASSERT_GE(s.vrp.size(), 1);
    for (const VrpCustomer& c : s.vrp.customers) EXPECT_LE(c.demand, s.vrp.vehicle_capacity);
  }
}

TEST(Gvs, InvalidModesAreConfigErrors) {
  GvsParams p;
  p.depot_positioning = "middle";
  try {
    GvsSample(p, 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  p = GvsParams{};
  p.max_customers = 101;
  EXPECT_THROW(GvsSample(p, 1, 0), Error);
  EXPECT_THROW(GvsParams::FromJson({{"demand_scheme", "huge"}}), Error);
  EXPECT_THROW(ParseSamplingMethod("LHS"), Error);
}

TEST(Gvs, Determinism) {
  GvsParams p;
  p.max_customers = 15;
  EXPECT_EQ(DatasetToJsonl(GvsSample(p, 100, 8)), DatasetToJsonl(GvsSample(p, 100, 8)));
  EXPECT_NE(DatasetToJsonl(GvsSample(p, 100, 8)), DatasetToJsonl(GvsSample(p, 100, 9)));
}

TEST(Dataset, JsonlRoundTrip) {
  const ClrpInstance src = testing::RandomInstance(10, 3, 2);
  VrpDataset ds = RsccSample({src}, 20, 1);
  ds.samples[0].label = 1234.5;
  ds.samples[0].label_solver = "exact";
  const std::string text = DatasetToJsonl(ds);
  const VrpDataset back = DatasetFromJsonl(text);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    EXPECT_EQ(back.samples[k].vrp, ds.samples[k].vrp);
    EXPECT_EQ(back.samples[k].label, ds.samples[k].label);
    EXPECT_EQ(back.samples[k].label_solver, ds.samples[k].label_solver);
  }
  EXPECT_EQ(DatasetToJsonl(back), text);

  const std::string dir = testing::TempDir("jsonl");
  SaveDataset(ds, dir + "/d.jsonl");
  EXPECT_EQ(DatasetToJsonl(LoadDataset(dir + "/d.jsonl")), text);
}

TEST(Dataset, RecordFormat) {
  VrpSample s;
  s.vrp.depot = {1, 2};
  s.vrp.customers = {{{3, 4}, 5}};
  s.vrp.vehicle_capacity = 10;
  s.vrp.vehicle_fixed_cost = 7;
  const nlohmann::json j = SampleToJson(s);
  EXPECT_EQ(j["depot"], nlohmann::json({1.0, 2.0}));
  EXPECT_EQ(j["customers"], nlohmann::json({{3.0, 4.0, 5.0}}));
  EXPECT_EQ(j["Q"], 10.0);
  EXPECT_EQ(j["F"], 7.0);
  EXPECT_TRUE(j["label"].is_null());
  EXPECT_TRUE(j["label_solver"].is_null());
}

TEST(Dataset, BadInput) {
  EXPECT_THROW(DatasetFromJsonl("{\"seed\":1}\n{\"depot\": [1]}\n"), Error);
  EXPECT_THROW(DatasetFromJsonl("not json\n"), Error);
  try {
    LoadDataset("/nonexistent/x.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact);
  }
}

TEST(Dataset, SampleKeyIgnoresCustomerOrder) {
  VrpInstance a;
  a.depot = {0, 0};
  a.vehicle_capacity = 5;
  a.customers = {{{1, 1}, 1}, {{2, 2}, 2}};
  VrpInstance b = a;
  std::swap(b.customers[0], b.customers[1]);
  EXPECT_EQ(SampleKey(a), SampleKey(b));
  b.customers[0].demand = 3;
  EXPECT_NE(SampleKey(a), SampleKey(b));
}

}  // namespace
}  // namespace neolrp
