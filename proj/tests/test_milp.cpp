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

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>

#include "Highs.h"
#include "neolrp/errors.hpp"
#include "neolrp/milp.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

SurrogateModel TestModel(std::uint64_t seed, int rho_width = 4) {
  Hyperparams hp;
  hp.latent_dim = 4;
  hp.phi_depth = 2;
  hp.phi_width = 16;
  hp.rho_width = rho_width;
  SurrogateModel m = InitModel(hp, seed);
  std::mt19937_64 rng(seed + 7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (DenseLayer* l : {&m.phi[0], &m.phi[1], &m.phi[2], &m.rho[0]}) {
    for (int r = 0; r < l->bias.size(); ++r) l->bias(r) = u(rng);
  }
  m.rho[1].bias(0) = 0.3;
  return m;
}

// Uniform random member of X by rejection.
LocationAllocation RandomAllocation(const ClrpInstance& inst, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, inst.num_depots() - 1);
  std::bernoulli_distribution coin(0.5);
  while (true) {
    LocationAllocation la;
    la.open.assign(inst.num_depots(), false);
    for (int i = 0; i < inst.num_depots(); ++i) la.open[i] = coin(rng);
    std::vector<int> open;
    for (int i = 0; i < inst.num_depots(); ++i) {
      if (la.open[i]) open.push_back(i);
    }
    if (open.empty()) continue;
    std::uniform_int_distribution<int> which(0, static_cast<int>(open.size()) - 1);
    for (int j = 0; j < inst.num_customers(); ++j) la.depot_of.push_back(open[which(rng)]);
    if (ValidateLocationAllocation(inst, la).empty()) return la;
  }
}

SolveParams Exact() {
  SolveParams p;
  p.mip_gap = 0.0;
  p.time_limit = 60;
  return p;
}

TEST(NeoModel, BinaryCount) {
  const ClrpInstance inst = testing::RandomInstance(20, 5, 1);
  const MilpModel m = BuildNeoModel(inst, TestModel(1));
  EXPECT_EQ(m.NumBinaries(), 5 * 20 + 5 + 5 * 4);
  int z = 0;
  for (const auto& v : m.vars) z += v.name.rfind("z_", 0) == 0;
  EXPECT_EQ(z, 20);
  const MilpModel w = BuildNeoModel(inst, TestModel(1, 8));
  EXPECT_EQ(w.NumBinaries(), 5 * 20 + 5 + 5 * 8);
  for (const auto& v : w.vars) {
    EXPECT_TRUE(std::isfinite(v.lower));
    EXPECT_TRUE(std::isfinite(v.upper));
  }
}

TEST(Embeddings, MatchPhiForward) {
  const ClrpInstance inst = testing::RandomInstance(7, 3, 2);
  const SurrogateModel model = TestModel(2);
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  for (int i = 0; i < 3; ++i) {
    std::vector<Point> all;
    for (const auto& c : inst.customers) all.push_back(c.coord);
    const double p = FeatureScale(inst.depots[i].coord, all);
    EXPECT_EQ(emb.scale[i], p);
    for (int j = 0; j < 7; ++j) {
      const VrpInstance v = InducedVrp(inst, i, {j});
      const Feature s{(v.customers[0].coord.x - v.depot.x) / p,
                      (v.customers[0].coord.y - v.depot.y) / p,
                      v.customers[0].demand / v.vehicle_capacity};
      EXPECT_EQ(emb.phi[i][j], model.PhiForward(s));
    }
  }
  // With every customer assigned, the embedded forward pass is predict().
  std::vector<int> all(7);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_NEAR(EmbeddedPrediction(model, emb, 0, all), Predict(model, InducedVrp(inst, 0, all)),
              1e-9 * std::max(1.0, Predict(model, InducedVrp(inst, 0, all))));
}

TEST(Embeddings, SingleCustomer) {
  const ClrpInstance inst = testing::RandomInstance(1, 2, 3);
  const SurrogateModel model = TestModel(3);
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  ASSERT_EQ(emb.phi[0].size(), 1u);
  const NormalizedFeatures f = NormalizeFeatures(InducedVrp(inst, 0, {0}));
  EXPECT_EQ(emb.phi[0][0], model.PhiForward(f.sigma[0]));
}

TEST(Bounds, NonNegativeEmbeddingsGiveZeroLowerBound) {
  const ClrpInstance inst = testing::RandomInstance(6, 2, 4);
  SurrogateModel model = TestModel(4);
  // Make phi's output layer nonnegative: zero weights, positive biases.
  model.phi.back().weights.setZero();
  model.phi.back().bias.setConstant(0.25);
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  const NeuronBounds b = ComputeBounds(model, inst, emb);
  for (const auto& depot : b.input) {
    for (const Interval& iv : depot) EXPECT_EQ(iv.lower, 0.0);
  }
}

void ExpectWithin(const Interval& iv, double v) {
  const double tol = 1e-9 * std::max(1.0, std::abs(v));
  EXPECT_LE(iv.lower - tol, v);
  EXPECT_GE(iv.upper + tol, v);
}

TEST(Bounds, SoundForRandomAssignmentsAndEmptySet) {
  const ClrpInstance inst = testing::RandomInstance(20, 5, 5);
  const SurrogateModel model = TestModel(5);
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  const NeuronBounds b = ComputeBounds(model, inst, emb);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const LocationAllocation la = RandomAllocation(inst, rng);
    for (int i = 0; i < 5; ++i) {
      for (const std::vector<int>& cs : {la.CustomersOf(i), std::vector<int>{}}) {
        const DepotActivations a = EmbeddedForward(model, emb, i, cs);
        for (int l = 0; l < model.latent_dim; ++l) ExpectWithin(b.input[i][l], a.input(l));
        for (std::size_t k = 0; k < a.hidden.size(); ++k) {
          for (int u = 0; u < a.hidden[k].size(); ++u) ExpectWithin(b.hidden[i][k][u], a.hidden[k](u));
        }
        ExpectWithin(b.output[i], a.output);
      }
    }
  }
}

TEST(NeoModel, FixedAssignmentFidelity) {
  const ClrpInstance inst = testing::RandomInstance(12, 4, 7);
  const SurrogateModel model = TestModel(7);
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  const NeuronBounds bounds = ComputeBounds(model, inst, emb);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 15; ++t) {
    const LocationAllocation la = RandomAllocation(inst, rng);
    MilpModel m = BuildNeoModel(inst, model, emb, bounds);
    FixAssignment(m, la);
    const MilpSolution sol = SolveModel(m, Exact());
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    double expected = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (!la.open[i]) {
        EXPECT_EQ(sol.gamma[i], 0.0);
        continue;
      }
      const double g = EmbeddedPrediction(model, emb, i, la.CustomersOf(i));
      EXPECT_NEAR(sol.gamma[i], g, 1e-5 * std::max(1.0, std::abs(g)));
      expected += inst.depots[i].fixed_cost + g;
    }
    EXPECT_NEAR(sol.objective, expected, 1e-6 * expected);
    EXPECT_EQ(sol.allocation.depot_of, la.depot_of);
    EXPECT_EQ(sol.allocation.open, la.open);
  }
}

TEST(NeoModel, ObjectiveConsistency) {
  const ClrpInstance inst = testing::RandomInstance(10, 3, 9);
  const SurrogateModel model = TestModel(9);
  const MilpSolution sol = SolveModel(BuildNeoModel(inst, model), Exact());
  ASSERT_TRUE(sol.has_incumbent());
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (sol.allocation.open[i]) sum += inst.depots[i].fixed_cost;
    sum += sol.gamma[i];
  }
  EXPECT_NEAR(sol.objective, sum, 1e-6 * sum);
  EXPECT_TRUE(ValidateLocationAllocation(inst, sol.allocation).empty());
  // At the optimum every open depot's gamma is the network's value.
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  for (int i = 0; i < 3; ++i) {
    if (!sol.allocation.open[i]) continue;
    const double g = EmbeddedPrediction(model, emb, i, sol.allocation.CustomersOf(i));
    EXPECT_NEAR(sol.gamma[i], g, 1e-5 * std::max(1.0, g));
  }
}

TEST(FlpModel, OneDepotOneCustomer) {
  ClrpInstance inst;
  inst.depots = {{0, {0, 0}, 10, 100}};
  inst.customers = {{1, {3, 4}, 1}};
  inst.vehicle_capacity = 5;
  inst.vehicle_fixed_cost = 1;
  const MilpSolution sol = SolveModel(BuildFlpModel(inst), Exact());
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 105.0, 1e-9);
  EXPECT_TRUE(sol.gamma.empty());
}

TEST(FlpModel, MatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ClrpInstance inst = testing::RandomInstance(3, 2, 20 + seed);
    inst.depots[0].capacity = 40;
    inst.depots[1].capacity = 45;
    double best = std::numeric_limits<double>::infinity();
    for (int code = 0; code < 8; ++code) {
      LocationAllocation la;
      la.open = {false, false};
      for (int j = 0; j < 3; ++j) {
        la.depot_of.push_back((code >> j) & 1);
        la.open[(code >> j) & 1] = true;
      }
      if (!ValidateLocationAllocation(inst, la).empty()) continue;
      double c = 0.0;
      for (int i = 0; i < 2; ++i) c += la.open[i] ? inst.depots[i].fixed_cost : 0.0;
      for (int j = 0; j < 3; ++j) c += inst.cost(la.depot_of[j], j);
      best = std::min(best, c);
    }
    const MilpSolution sol = SolveModel(BuildFlpModel(inst), Exact());
    if (std::isinf(best)) {
      EXPECT_EQ(sol.status, SolveStatus::kInfeasible);
    } else {
      ASSERT_EQ(sol.status, SolveStatus::kOptimal);
      EXPECT_NEAR(sol.objective, best, 1e-6 * best);
    }
  }
}

TEST(SideConstraints, Incompatibility) {
  const ClrpInstance inst = testing::RandomInstance(8, 3, 11);
  MilpModel m = BuildFlpModel(inst);
  AddIncompatibility(m, {{0, 1}, {2, 3}, {0, 5}});
  const MilpSolution sol = SolveModel(m, Exact());
  ASSERT_TRUE(sol.has_incumbent());
  EXPECT_NE(sol.allocation.depot_of[0], sol.allocation.depot_of[1]);
  EXPECT_NE(sol.allocation.depot_of[2], sol.allocation.depot_of[3]);
  EXPECT_NE(sol.allocation.depot_of[0], sol.allocation.depot_of[5]);
  EXPECT_THROW(AddIncompatibility(m, {{0, 0}}), Error);
}

TEST(SideConstraints, RestrictionAndWarnings) {
  const ClrpInstance inst = testing::RandomInstance(6, 3, 12);
  MilpModel m = BuildNeoModel(inst, TestModel(12));
  std::vector<std::vector<int>> allowed(6);
  allowed[2] = {1};
  allowed[4] = {0, 2};
  EXPECT_TRUE(AddDepotRestriction(m, allowed).empty());
  const MilpSolution sol = SolveModel(m, Exact());
  ASSERT_TRUE(sol.has_incumbent());
  EXPECT_EQ(sol.allocation.depot_of[2], 1);
  EXPECT_NE(sol.allocation.depot_of[4], 1);

  // Restrictions on the same customer intersect, leaving nothing.
  std::vector<std::vector<int>> other(6);
  other[2] = {0};
  const std::vector<std::string> warnings = AddDepotRestriction(m, other);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("customer 2"), std::string::npos);
  EXPECT_EQ(SolveModel(m, Exact()).status, SolveStatus::kInfeasible);
}

TEST(SideConstraints, CliqueWithOneDepotIsInfeasible) {
  ClrpInstance inst = testing::RandomInstance(4, 1, 13);
  MilpModel m = BuildFlpModel(inst);
  std::vector<std::pair<int, int>> clique;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) clique.emplace_back(a, b);
  }
  AddIncompatibility(m, clique);
  EXPECT_EQ(SolveModel(m, Exact()).status, SolveStatus::kInfeasible);
}

TEST(Backend, SelectionByEnvironment) {
  EXPECT_EQ(MakeBackend("highs")->name(), "highs");
  ::setenv("NEOLRP_MILP_BACKEND", "nope", 1);
  try {
    MakeBackend();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackend);
  }
  ::unsetenv("NEOLRP_MILP_BACKEND");
  EXPECT_EQ(DefaultBackendName(), "highs");
}

TEST(LpDump, ReadsBackWithSameOptimum) {
  const ClrpInstance inst = testing::RandomInstance(8, 3, 14);
  const MilpModel m = BuildNeoModel(inst, TestModel(14));
  const std::string lp = m.ToLp();
  EXPECT_NE(lp.find("Minimize"), std::string::npos);
  EXPECT_NE(lp.find("Binaries"), std::string::npos);
  const std::string path = testing::TempDir("lp") + "/model.lp";
  std::ofstream(path) << lp;
  Highs h;
  h.setOptionValue("output_flag", false);
  h.setOptionValue("mip_rel_gap", 0.0);
  ASSERT_NE(h.readModel(path), HighsStatus::kError);
  ASSERT_EQ(h.run(), HighsStatus::kOk);
  ASSERT_EQ(h.getModelStatus(), HighsModelStatus::kOptimal);
  EXPECT_EQ(h.getLp().num_col_, static_cast<HighsInt>(m.vars.size()));
  const MilpSolution sol = SolveModel(m, Exact());
  EXPECT_NEAR(h.getInfo().objective_function_value, sol.objective, 1e-6 * sol.objective);
}

TEST(Model, CoefficientFloor) {
  MilpModel m;
  const int a = m.AddVariable("a", 0, 1, true);
  const int b = m.AddVariable("b", 0, 1, true);
  m.AddRow("r", {{a, 1.0}, {b, 1e-13}}, 0, 1);
  ASSERT_EQ(m.rows[0].terms.size(), 1u);
  EXPECT_EQ(m.rows[0].terms[0].first, a);
}

}  // namespace
}  // namespace neolrp
