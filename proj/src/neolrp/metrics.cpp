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

#include "neolrp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "neolrp/errors.hpp"

namespace neolrp {

double GapBks(double h, double bks) {
  if (!(bks > 0)) throw Error(ErrorCode::kMetric, "BKS must be positive");
  return std::abs(h - bks) / bks * 100.0;
}

double PredError(const std::vector<double>& true_cost, const std::vector<double>& gamma,
                 const std::vector<bool>& open) {
  if (true_cost.size() != gamma.size() || gamma.size() != open.size()) {
    throw Error(ErrorCode::kMetric, "per-depot vectors differ in length");
  }
  double truth = 0.0;
  double pred = 0.0;
  bool any_open = false;
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (!open[i]) continue;
    any_open = true;
    truth += true_cost[i];
    pred += gamma[i];
  }
  if (!any_open) throw Error(ErrorCode::kMetric, "no open depot");
  if (!(truth > 0)) throw Error(ErrorCode::kMetric, "total routing cost must be positive");
  return std::abs(truth - pred) / truth * 100.0;
}

double LabelGap(double exact, double heuristic) {
  if (!(exact > 0)) throw Error(ErrorCode::kMetric, "exact cost must be positive");
  return std::abs(exact - heuristic) / exact * 100.0;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

nlohmann::json Optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

std::optional<double> ReadOptional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

nlohmann::json ReportRow::ToJson() const {
  return {{"instance", instance},   {"method", method},
          {"run", run},             {"seed", seed},
          {"customers", customers}, {"objective", objective},
          {"bks", Optional(bks)},   {"gap_bks", Optional(gap_bks)},
          {"pred_error", Optional(pred_error)},
          {"t_la", t_la},           {"t_total", t_total}};
}

ReportRow ReportRow::FromJson(const nlohmann::json& j) {
  ReportRow r;
  r.instance = j.at("instance").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.run = j.value("run", 0);
  r.seed = j.value("seed", std::uint64_t{0});
  r.customers = j.value("customers", 0);
  r.objective = j.at("objective").get<double>();
  r.bks = ReadOptional(j, "bks");
  r.gap_bks = ReadOptional(j, "gap_bks");
  r.pred_error = ReadOptional(j, "pred_error");
  r.t_la = j.value("t_la", 0.0);
  r.t_total = j.value("t_total", 0.0);
  return r;
}

std::map<std::string, Aggregate> EvaluationReport::Aggregates() const {
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rows) {
    groups[r.method + "/" + r.instance].push_back(&r);
    groups[r.method + "/size=" + std::to_string(r.customers)].push_back(&r);
  }
  std::map<std::string, Aggregate> out;
  for (const auto& [key, members] : groups) {
    std::vector<double> gap, pred, tla, ttot;
    for (const ReportRow* r : members) {
      if (r->gap_bks) gap.push_back(*r->gap_bks);
      if (r->pred_error) pred.push_back(*r->pred_error);
      tla.push_back(r->t_la);
      ttot.push_back(r->t_total);
    }
    Aggregate a;
    a.count = static_cast<int>(members.size());
    a.mean_gap = Mean(gap);
    a.median_gap = Median(gap);
    a.best_gap = gap.empty() ? 0.0 : *std::min_element(gap.begin(), gap.end());
    a.mean_pred = Mean(pred);
    a.median_pred = Median(pred);
    a.mean_t_la = Mean(tla);
    a.mean_t_total = Mean(ttot);
    out[key] = a;
  }
  return out;
}

nlohmann::json EvaluationReport::ToJson() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : rows) j["rows"].push_back(r.ToJson());
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [key, a] : Aggregates()) {
    agg[key] = {{"count", a.count},         {"mean_gap_bks", a.mean_gap},
                {"median_gap_bks", a.median_gap}, {"best_gap_bks", a.best_gap},
                {"mean_pred_error", a.mean_pred}, {"median_pred_error", a.median_pred},
                {"mean_t_la", a.mean_t_la}, {"mean_t_total", a.mean_t_total}};
  }
  j["aggregates"] = agg;
  return j;
}

EvaluationReport EvaluationReport::FromJson(const nlohmann::json& j) {
  EvaluationReport r;
  for (const auto& row : j.at("rows")) r.rows.push_back(ReportRow::FromJson(row));
  return r;
}

std::string EvaluationReport::ToTable() const {
  std::vector<std::string> instances;
  std::vector<std::string> methods;
  std::map<std::string, double> bks;
  for (const ReportRow& r : rows) {
    if (std::find(instances.begin(), instances.end(), r.instance) == instances.end()) {
      instances.push_back(r.instance);
    }
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    if (r.bks) bks[r.instance] = *r.bks;
  }
  const auto agg = Aggregates();
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-12s %10s", "Instance", "BKS");
  out += buf;
  for (const std::string& m : methods) {
    std::snprintf(buf, sizeof(buf), " | %-8s %8s %9s %9s", m.c_str(), "gap(%)", "T_LA(s)",
                  "T_tot(s)");
    out += buf;
  }
  out += "\n";
  for (const std::string& inst : instances) {
    std::snprintf(buf, sizeof(buf), "%-12s %10s", inst.c_str(),
                  bks.count(inst) ? std::to_string(static_cast<long long>(bks[inst])).c_str()
                                  : "-");
    out += buf;
    for (const std::string& m : methods) {
      auto it = agg.find(m + "/" + inst);
      if (it == agg.end()) {
        std::snprintf(buf, sizeof(buf), " | %-8s %8s %9s %9s", "", "-", "-", "-");
      } else {
        std::snprintf(buf, sizeof(buf), " | %-8s %8.2f %9.2f %9.2f", "", it->second.mean_gap,
                      it->second.mean_t_la, it->second.mean_t_total);
      }
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::map<std::string, double> LoadBks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing BKS file " + path);
  nlohmann::json j;
  try {
    in >> j;
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.at("bks").items()) out[k] = v.get<double>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "BKS file " + path + ": " + e.what());
  }
}

std::string BenchmarkName(const std::string& file_stem) {
  std::string s = file_stem;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s.rfind("coord", 0) == 0) s = s.substr(5);
  if (s.size() >= 4 && s.ends_with(".dat")) s.resize(s.size() - 4);
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0]))) return file_stem;
  if (s.ends_with("bis") || s.ends_with("a") || s.ends_with("b")) return s;
  return s + "a";
}

}  // namespace neolrp
