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

// Shared fixtures and independent oracles for the test suites.

#ifndef NEOLRP_TESTS_TEST_UTIL_HPP_
#define NEOLRP_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "neolrp/core_model.hpp"

namespace neolrp::testing {

// Random CLRP instance on an integer grid.
inline ClrpInstance RandomInstance(int n, int m, std::uint64_t seed, double grid = 50.0,
                                   RoundingMode rounding = RoundingMode::kProdhon100) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(0, static_cast<int>(grid));
  std::uniform_int_distribution<int> demand(11, 20);
  ClrpInstance inst;
  inst.name = "rand" + std::to_string(seed);
  inst.vehicle_capacity = 70;
  inst.vehicle_fixed_cost = 1000;
  inst.rounding = rounding;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    Customer c;
    c.id = m + j;
    c.coord = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
    c.demand = demand(rng);
    total += c.demand;
    inst.customers.push_back(c);
  }
  std::uniform_int_distribution<int> fixed(5000, 12000);
  for (int i = 0; i < m; ++i) {
    Depot d;
    d.id = i;
    d.coord = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
    d.capacity = std::ceil(total / std::max(1, m - 2)) + 20;
    d.fixed_cost = fixed(rng);
    inst.depots.push_back(d);
  }
  return inst;
}

inline VrpInstance RandomVrp(int n, std::uint64_t seed, RoundingMode rounding,
                             double capacity = 30.0, double fixed = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(0, 40);
  std::uniform_int_distribution<int> demand(1, 12);
  VrpInstance v;
  v.depot = {static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
  v.vehicle_capacity = capacity;
  v.vehicle_fixed_cost = fixed;
  v.rounding = rounding;
  for (int j = 0; j < n; ++j) {
    v.customers.push_back({{static_cast<double>(coord(rng)), static_cast<double>(coord(rng))},
                           static_cast<double>(demand(rng))});
  }
  return v;
}

// Brute force over every set partition (restricted growth strings) and every
// visiting order of every block.
inline double BruteForceVrp(const VrpInstance& v) {
  const int n = v.size();
  if (n == 0) return 0.0;
  auto block_cost = [&](std::vector<int> block) {
    double load = 0.0;
    for (int j : block) load += v.customers[j].demand;
    if (load > v.vehicle_capacity + 1e-9) return std::numeric_limits<double>::infinity();
    std::sort(block.begin(), block.end());
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = v.vehicle_fixed_cost;
      Point prev = v.depot;
      for (int j : block) {
        c += ArcCost(prev, v.customers[j].coord, v.rounding);
        prev = v.customers[j].coord;
      }
      c += ArcCost(prev, v.depot, v.rounding);
      best = std::min(best, c);
    } while (std::next_permutation(block.begin(), block.end()));
    return best;
  };
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> rec = [&](int pos, int blocks) {
    if (pos == n) {
      double total = 0.0;
      for (int b = 0; b < blocks; ++b) {
        std::vector<int> block;
        for (int j = 0; j < n; ++j) {
          if (label[j] == b) block.push_back(j);
        }
        total += block_cost(block);
      }
      best = std::min(best, total);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[pos] = b;
      rec(pos + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return best;
}

inline std::string TempDir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / ("neolrp_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace neolrp::testing

#endif  // NEOLRP_TESTS_TEST_UTIL_HPP_
