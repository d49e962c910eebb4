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

#include "neolrp/errors.hpp"
#include "neolrp/metrics.hpp"

namespace neolrp {
namespace {

TEST(GapBks, Examples) {
  EXPECT_EQ(GapBks(54793, 54793), 0.0);
  EXPECT_NEAR(GapBks(1.1 * 1000, 1000), 10.0, 1e-12);
  // 54793 * 1.0324 rounds to 56568.
  EXPECT_NEAR(GapBks(56568, 54793), 3.24, 0.005);
  try {
    GapBks(1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMetric);
  }
  EXPECT_THROW(GapBks(1, -5), Error);
}

TEST(PredError, Examples) {
  EXPECT_EQ(PredError({10, 20, 0}, {10, 20, 7}, {true, true, false}), 0.0);
  EXPECT_EQ(PredError({10, 20}, {0, 0}, {true, true}), 100.0);
  EXPECT_THROW(PredError({10}, {10}, {false}), Error);
  EXPECT_THROW(PredError({10, 1}, {10}, {true}), Error);
}

TEST(LabelGap, Examples) {
  EXPECT_EQ(LabelGap(100, 100), 0.0);
  EXPECT_NEAR(LabelGap(100, 105), 5.0, 1e-12);
  EXPECT_THROW(LabelGap(0, 1), Error);
}

TEST(Metrics, SymmetryAndUnitInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1, 1000);
  for (int t = 0; t < 500; ++t) {
    const double b = u(rng);
    const double h = std::uniform_real_distribution<double>(0, 2 * b)(rng);
    EXPECT_NEAR(GapBks(h, b), GapBks(2 * b - h, b), 1e-9);
    const double k = u(rng);
    EXPECT_NEAR(GapBks(k * h, k * b), GapBks(h, b), 1e-9);
    EXPECT_NEAR(LabelGap(k * b, k * h), LabelGap(b, h), 1e-9);
    EXPECT_NEAR(PredError({k * b, k * h}, {k * h, k * b / 2}, {true, true}),
                PredError({b, h}, {h, b / 2}, {true, true}), 1e-9);
  }
}

TEST(Stats, MeanMedian) {
  EXPECT_EQ(Mean({1, 2, 6}), 3.0);
  EXPECT_EQ(Median({5, 1, 3}), 3.0);
  EXPECT_EQ(Median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(Mean({}), 0.0);
}

EvaluationReport SampleReport() {
  EvaluationReport rep;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 20);
  for (const char* inst : {"20-5-1a", "20-5-1b", "50-5-1"}) {
    for (const char* method : {"NEO-LRP", "FLP-VRP"}) {
      for (int run = 0; run < 5; ++run) {
        ReportRow r;
        r.instance = inst;
        r.method = method;
        r.run = run;
        r.seed = run;
        r.customers = inst[0] == '2' ? 20 : 50;
        r.bks = 1000;
        r.gap_bks = u(rng);
        r.objective = 1000 * (1 + *r.gap_bks / 100);
        if (std::string(method) == "NEO-LRP") r.pred_error = u(rng);
        r.t_la = u(rng) / 10;
        r.t_total = r.t_la + u(rng) / 10;
        rep.rows.push_back(r);
      }
    }
  }
  return rep;
}

TEST(Report, AggregatesMatchRows) {
  const EvaluationReport rep = SampleReport();
  const auto agg = rep.Aggregates();
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rep.rows) {
    groups[r.method + "/" + r.instance].push_back(&r);
    groups[r.method + "/size=" + std::to_string(r.customers)].push_back(&r);
  }
  ASSERT_EQ(agg.size(), groups.size());
  for (const auto& [key, members] : groups) {
    double gap = 0, la = 0, tot = 0, pred = 0, best = 1e300;
    int npred = 0;
    for (const ReportRow* r : members) {
      gap += *r->gap_bks;
      best = std::min(best, *r->gap_bks);
      la += r->t_la;
      tot += r->t_total;
      if (r->pred_error) {
        pred += *r->pred_error;
        ++npred;
      }
    }
    const Aggregate& a = agg.at(key);
    EXPECT_EQ(a.count, static_cast<int>(members.size()));
    EXPECT_NEAR(a.mean_gap, gap / members.size(), 1e-9);
    EXPECT_EQ(a.best_gap, best);
    EXPECT_NEAR(a.mean_t_la, la / members.size(), 1e-9);
    EXPECT_NEAR(a.mean_t_total, tot / members.size(), 1e-9);
    EXPECT_NEAR(a.mean_pred, npred ? pred / npred : 0.0, 1e-9);
    EXPECT_LE(a.mean_t_la, a.mean_t_total);
  }
  EXPECT_EQ(agg.at("NEO-LRP/size=20").count, 10);
}

TEST(Report, JsonRoundTripAndTable) {
  const EvaluationReport rep = SampleReport();
  const nlohmann::json j = rep.ToJson();
  const EvaluationReport back = EvaluationReport::FromJson(j);
  EXPECT_EQ(back.ToJson().dump(), j.dump());
  EXPECT_NEAR(j["aggregates"]["FLP-VRP/20-5-1b"]["mean_gap_bks"].get<double>(),
              rep.Aggregates().at("FLP-VRP/20-5-1b").mean_gap, 1e-12);
  const std::string table = rep.ToTable();
  EXPECT_NE(table.find("Instance"), std::string::npos);
  EXPECT_NE(table.find("NEO-LRP"), std::string::npos);
  EXPECT_NE(table.find("20-5-1b"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
}

TEST(Bks, ShippedFile) {
  const auto bks = LoadBks(std::string(NEOLRP_SOURCE_DIR) + "/data/bks.json");
  EXPECT_EQ(bks.at("20-5-1a"), 54793);
  EXPECT_EQ(bks.at("20-5-1b"), 39104);
  EXPECT_EQ(bks.at("20-5-2a"), 48908);
  EXPECT_EQ(bks.at("20-5-2b"), 37542);
  EXPECT_EQ(bks.size(), 30u);
  EXPECT_THROW(LoadBks("/nonexistent/bks.json"), Error);
}

TEST(Bks, BenchmarkNames) {
  EXPECT_EQ(BenchmarkName("coord20-5-1"), "20-5-1a");
  EXPECT_EQ(BenchmarkName("coord20-5-1b"), "20-5-1b");
  EXPECT_EQ(BenchmarkName("coord200-10-3"), "200-10-3a");
  EXPECT_EQ(BenchmarkName("toy"), "toy");
}

}  // namespace
}  // namespace neolrp
