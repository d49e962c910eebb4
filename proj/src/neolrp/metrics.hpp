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

#ifndef NEOLRP_METRICS_HPP_
#define NEOLRP_METRICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace neolrp {

// All metrics are percentages. They throw Error(kMetric) on a nonpositive
// reference value.
double GapBks(double h, double bks);
double PredError(const std::vector<double>& true_cost, const std::vector<double>& gamma,
                 const std::vector<bool>& open);
double LabelGap(double exact, double heuristic);

double Mean(const std::vector<double>& v);
double Median(std::vector<double> v);

struct ReportRow {
  std::string instance;
  std::string method;  // "NEO-LRP" or "FLP-VRP".
  int run = 0;
  std::uint64_t seed = 0;
  int customers = 0;
  double objective = 0.0;
  std::optional<double> bks;
  std::optional<double> gap_bks;
  std::optional<double> pred_error;
  double t_la = 0.0;
  double t_total = 0.0;

  nlohmann::json ToJson() const;
  static ReportRow FromJson(const nlohmann::json& j);
};

struct Aggregate {
  int count = 0;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  double best_gap = 0.0;
  double mean_pred = 0.0;
  double median_pred = 0.0;
  double mean_t_la = 0.0;
  double mean_t_total = 0.0;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;

  // Keyed by "<method>/<instance>" and "<method>/size=<n>".
  std::map<std::string, Aggregate> Aggregates() const;

  nlohmann::json ToJson() const;
  static EvaluationReport FromJson(const nlohmann::json& j);
  // Aligned table: instance, BKS, then mean gap, T_LA, T_total per method.
  std::string ToTable() const;
};

// Best-known objective values keyed by instance name ("20-5-1a", ...).
std::map<std::string, double> LoadBks(const std::string& path);

// "coord20-5-1b" -> "20-5-1b", "coord20-5-1" -> "20-5-1a".
std::string BenchmarkName(const std::string& file_stem);

}  // namespace neolrp

#endif  // NEOLRP_METRICS_HPP_
