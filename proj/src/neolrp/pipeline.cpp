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

#include "neolrp/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "neolrp/errors.hpp"
#include "neolrp/metrics.hpp"

namespace neolrp {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopLevelKeys = {
    "name",     "instances", "bks_file", "rounding", "seed",  "out_dir", "sampling",
    "labeling", "training",  "surrogate_mode",       "solve", "routing", "runs",
    "ablate"};

const std::vector<std::string> kStages = {"sample", "label",    "train", "solve",
                                          "route",  "evaluate", "ablate"};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string ResolvePath(const std::string& p, const std::string& base) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing file " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

void WriteText(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

void WriteJson(const std::string& path, const nlohmann::json& j) {
  WriteText(path, j.dump(1) + "\n");
}

void RequireFile(const std::string& path, const std::string& stage) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact,
                "stage '" + stage + "' requires missing artifact " + path);
  }
}

std::string ArtifactPath(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

void WriteProvenance(const ExperimentConfig& c, const std::string& artifact,
                     const std::string& stage, nlohmann::json extra) {
  nlohmann::json prov = {{"stage", stage},
                         {"artifact", fs::path(artifact).filename().string()},
                         {"config_hash", c.Hash()},
                         {"seed", c.seed},
                         {"config", c.raw}};
  for (auto it = extra.begin(); it != extra.end(); ++it) prov[it.key()] = it.value();
  WriteJson(artifact + ".prov.json", prov);
}

std::vector<std::string> DatasetTags(const ExperimentConfig& c) {
  if (c.surrogate_mode != "customized") return {""};
  std::vector<std::string> tags;
  for (const std::string& p : c.instances) tags.push_back("_" + InstanceKey(p));
  return tags;
}

std::string ModelPathFor(const ExperimentConfig& c, const std::string& instance) {
  const std::string tag = c.surrogate_mode == "customized" ? "_" + InstanceKey(instance) : "";
  return ArtifactPath(c, "model" + tag + ".json");
}

SamplingConfig MakeSamplingConfig(const ExperimentConfig& c,
                                  const std::vector<std::string>& sources,
                                  std::uint64_t seed, int n_data) {
  SamplingConfig s;
  s.method = c.sampling_method;
  s.n_data = n_data;
  s.seed = seed;
  for (const std::string& p : sources) s.sources.push_back(InstanceKey(p));
  s.gvs = c.gvs;
  return s;
}

VrpDataset SampleFrom(const ExperimentConfig& c, const std::vector<std::string>& paths,
                      std::uint64_t seed, int n_data) {
  std::vector<ClrpInstance> sources;
  if (c.sampling_method != SamplingMethod::kGvs) {
    for (const std::string& p : paths) sources.push_back(LoadConfiguredInstance(c, p));
  }
  return GenerateDataset(MakeSamplingConfig(c, paths, seed, n_data), sources);
}

LabelOptions LabelingFor(const ExperimentConfig& c) {
  LabelOptions o = c.labeling;
  o.heuristic.seed = c.seed;
  return o;
}

nlohmann::json StageSample(const ExperimentConfig& c) {
  nlohmann::json out = {{"artifacts", nlohmann::json::array()}};
  for (const std::string& tag : DatasetTags(c)) {
    Stopwatch sw;
    std::vector<std::string> paths = c.instances;
    if (!tag.empty()) {
      paths.clear();
      for (const std::string& p : c.instances) {
        if ("_" + InstanceKey(p) == tag) paths.push_back(p);
      }
    }
    const VrpDataset ds = SampleFrom(c, paths, c.seed, c.n_data);
    const std::string path = ArtifactPath(c, "dataset" + tag + ".jsonl");
    fs::create_directories(c.out_dir);
    SaveDataset(ds, path);
    WriteProvenance(c, path, "sample", {{"samples", ds.size()}, {"seconds", sw.Seconds()}});
    out["artifacts"].push_back(path);
  }
  return out;
}

nlohmann::json StageLabel(const ExperimentConfig& c) {
  nlohmann::json out = {{"artifacts", nlohmann::json::array()}};
  for (const std::string& tag : DatasetTags(c)) {
    const std::string in = ArtifactPath(c, "dataset" + tag + ".jsonl");
    RequireFile(in, "label");
    Stopwatch sw;
    const VrpDataset labeled = LabelDataset(LoadDataset(in), LabelingFor(c));
    const std::string path = ArtifactPath(c, "labeled" + tag + ".jsonl");
    SaveDataset(labeled, path);
    WriteProvenance(c, path, "label",
                    {{"input", fs::path(in).filename().string()},
                     {"input_hash", HashString(DatasetToJsonl(LoadDataset(in)))},
                     {"seconds", sw.Seconds()}});
    out["artifacts"].push_back(path);
  }
  return out;
}

// Fresh labeled samples from the same generator, disjoint from `train`.
VrpDataset HeldOutSet(const ExperimentConfig& c, const std::vector<std::string>& paths,
                      const VrpDataset& train) {
  std::set<std::vector<double>> seen;
  for (const VrpSample& s : train.samples) seen.insert(SampleKey(s.vrp));
  VrpDataset raw = SampleFrom(c, paths, c.seed + 0x7e57ULL, c.n_test + c.n_data);
  VrpDataset test;
  test.provenance = raw.provenance;
  for (VrpSample& s : raw.samples) {
    if (static_cast<int>(test.size()) >= c.n_test) break;
    if (!seen.count(SampleKey(s.vrp))) test.samples.push_back(std::move(s));
  }
  return LabelDataset(test, LabelingFor(c));
}

nlohmann::json StageTrain(const ExperimentConfig& c) {
  nlohmann::json out = {{"artifacts", nlohmann::json::array()}};
  for (const std::string& tag : DatasetTags(c)) {
    const std::string in = ArtifactPath(c, "labeled" + tag + ".jsonl");
    RequireFile(in, "train");
    Stopwatch sw;
    const VrpDataset ds = LoadDataset(in);
    SearchResult search = HyperparamSearch(ds, c.trials, c.space, c.seed);
    nlohmann::json extra = {{"input", fs::path(in).filename().string()},
                            {"trials", search.trials},
                            {"best_trial", search.best_trial},
                            {"best_val_mse", search.best.best_val_mse}};
    if (c.n_test > 0) {
      std::vector<std::string> paths;
      for (const std::string& p : c.instances) {
        if (tag.empty() || "_" + InstanceKey(p) == tag) paths.push_back(p);
      }
      const MapeResult m = EvaluateMape(search.best.model, HeldOutSet(c, paths, ds));
      extra["test_mape"] = m.mape;
      extra["test_samples"] = m.evaluated;
      extra["test_skipped_zero"] = m.skipped_zero;
      out["test_mape"] = m.mape;
    }
    extra["seconds"] = sw.Seconds();
    const std::string path = ArtifactPath(c, "model" + tag + ".json");
    search.best.model.Save(path);
    WriteProvenance(c, path, "train", extra);
    out["artifacts"].push_back(path);
    out["best_val_mse"] = search.best.best_val_mse;
  }
  return out;
}

std::string RunName(const std::string& method, const std::string& inst, int run) {
  return method + "_" + InstanceKey(inst) + "_run" + std::to_string(run);
}

nlohmann::json StageSolve(const ExperimentConfig& c) {
  nlohmann::json out = {{"artifacts", nlohmann::json::array()}};
  for (const std::string& inst_path : c.instances) {
    const ClrpInstance inst = LoadConfiguredInstance(c, inst_path);
    for (const std::string& method : c.methods) {
      SurrogateModel model;
      if (method == "neo") {
        const std::string mp = ModelPathFor(c, inst_path);
        RequireFile(mp, "solve");
        model = SurrogateModel::Load(mp);
      }
      for (int r = 0; r < c.runs; ++r) {
        Stopwatch sw;
        MilpModel milp;
        std::vector<double> scale;
        if (method == "neo") {
          const Embeddings emb = PrecomputeEmbeddings(inst, model);
          milp = BuildNeoModel(inst, model, emb, ComputeBounds(model, inst, emb));
          scale = emb.scale;
        } else {
          milp = BuildFlpModel(inst);
        }
        SolveParams params = c.solve;
        params.seed = static_cast<int>((c.seed + r) & 0x7fffffff);
        const MilpSolution sol = SolveModel(milp, params, c.backend);
        const double t_la = sw.Seconds();
        nlohmann::json a = {{"instance", InstanceKey(inst_path)},
                            {"method", method},
                            {"run", r},
                            {"seed", c.seed + r},
                            {"status", std::string(SolveStatusName(sol.status))},
                            {"backend", sol.backend}};
        if (sol.has_incumbent()) {
          a["objective"] = sol.objective;
          a["depot_of"] = sol.allocation.depot_of;
          std::vector<int> open;
          for (bool o : sol.allocation.open) open.push_back(o ? 1 : 0);
          a["open"] = open;
          a["gamma"] = sol.gamma;
          a["scale"] = scale;
        }
        const std::string path = ArtifactPath(c, "assign_" + RunName(method, inst_path, r) + ".json");
        WriteJson(path, a);
        WriteProvenance(c, path, "solve",
                        {{"t_la", t_la}, {"variables", milp.vars.size()},
                         {"rows", milp.rows.size()}, {"binaries", milp.NumBinaries()},
                         {"diagnostics", sol.diagnostics}});
        out["artifacts"].push_back(path);
      }
    }
  }
  return out;
}

nlohmann::json StageRoute(const ExperimentConfig& c) {
  nlohmann::json out = {{"artifacts", nlohmann::json::array()}};
  for (const std::string& inst_path : c.instances) {
    const ClrpInstance inst = LoadConfiguredInstance(c, inst_path);
    for (const std::string& method : c.methods) {
      for (int r = 0; r < c.runs; ++r) {
        const std::string in = ArtifactPath(c, "assign_" + RunName(method, inst_path, r) + ".json");
        RequireFile(in, "route");
        const nlohmann::json a = ReadJsonFile(in);
        if (!a.contains("depot_of")) {
          throw Error(ErrorCode::kValidation, "no feasible location-allocation in " + in +
                                                  " (status " +
                                                  a.value("status", std::string("?")) + ")");
        }
        LocationAllocation la;
        la.depot_of = a["depot_of"].get<std::vector<int>>();
        for (int o : a["open"].get<std::vector<int>>()) la.open.push_back(o != 0);
        Stopwatch sw;
        RoutingOptions ro = c.routing;
        ro.heuristic.seed = c.seed + r;
        const FinalizedSolution fin = FinalizeRoutes(inst, la, ro);
        const double t_route = sw.Seconds();
        nlohmann::json depots = nlohmann::json::array();
        for (const DepotPlan& dp : fin.solution.open) {
          nlohmann::json routes = nlohmann::json::array();
          for (const auto& route : dp.routes) {
            std::vector<int> ids;
            for (int j : route) ids.push_back(inst.customers[j].id);
            routes.push_back(ids);
          }
          depots.push_back({{"depot", inst.depots[dp.depot].id},
                            {"routing_cost", fin.depot_cost[dp.depot]},
                            {"solver", fin.depot_solver[dp.depot]},
                            {"routes", routes}});
        }
        nlohmann::json s = {{"instance", a["instance"]}, {"method", method}, {"run", r},
                            {"seed", a["seed"]},         {"total_cost", fin.solution.total_cost},
                            {"depot_cost", fin.depot_cost}, {"depots", depots}};
        if (method == "neo") {
          s["gamma"] = a["gamma"];
          s["pred_error"] = PredError(fin.depot_cost, a["gamma"].get<std::vector<double>>(),
                                      la.open);
        }
        const std::string path =
            ArtifactPath(c, "solution_" + RunName(method, inst_path, r) + ".json");
        WriteJson(path, s);
        WriteProvenance(c, path, "route", {{"t_route", t_route}});
        out["artifacts"].push_back(path);
      }
    }
  }
  return out;
}

std::string MethodLabel(const std::string& method) {
  return method == "neo" ? "NEO-LRP" : "FLP-VRP";
}

EvaluationReport BuildReport(const ExperimentConfig& c) {
  std::map<std::string, double> bks;
  if (!c.bks_file.empty()) bks = LoadBks(c.bks_file);
  EvaluationReport report;
  for (const std::string& inst_path : c.instances) {
    const ClrpInstance inst = LoadConfiguredInstance(c, inst_path);
    const std::string bench = BenchmarkName(InstanceKey(inst_path));
    for (const std::string& method : c.methods) {
      for (int r = 0; r < c.runs; ++r) {
        const std::string name = RunName(method, inst_path, r);
        const std::string sol_path = ArtifactPath(c, "solution_" + name + ".json");
        const std::string assign_path = ArtifactPath(c, "assign_" + name + ".json");
        RequireFile(sol_path, "evaluate");
        const nlohmann::json s = ReadJsonFile(sol_path);
        const nlohmann::json sp = ReadJsonFile(sol_path + ".prov.json");
        const nlohmann::json ap = ReadJsonFile(assign_path + ".prov.json");
        ReportRow row;
        row.instance = bench;
        row.method = MethodLabel(method);
        row.run = r;
        row.seed = s.value("seed", std::uint64_t{0});
        row.customers = inst.num_customers();
        row.objective = s.at("total_cost").get<double>();
        if (bks.count(bench)) {
          row.bks = bks[bench];
          row.gap_bks = GapBks(row.objective, *row.bks);
        }
        if (s.contains("pred_error")) row.pred_error = s["pred_error"].get<double>();
        row.t_la = ap.value("t_la", 0.0);
        row.t_total = row.t_la + sp.value("t_route", 0.0);
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

nlohmann::json StageEvaluate(const ExperimentConfig& c) {
  const EvaluationReport report = BuildReport(c);
  const std::string json_path = ArtifactPath(c, "report.json");
  const std::string txt_path = ArtifactPath(c, "report.txt");
  nlohmann::json j = report.ToJson();
  j["config_hash"] = c.Hash();
  j["seed"] = c.seed;
  WriteJson(json_path, j);
  WriteText(txt_path, report.ToTable());
  WriteProvenance(c, json_path, "evaluate", {});
  return {{"artifacts", {json_path, txt_path}}, {"aggregates", j["aggregates"]},
          {"table", report.ToTable()}};
}

const std::map<std::string, nlohmann::json::json_pointer>& AblationAxes() {
  static const std::map<std::string, nlohmann::json::json_pointer> axes = {
      {"sampling", nlohmann::json::json_pointer("/sampling/method")},
      {"sample_size", nlohmann::json::json_pointer("/sampling/n_data")},
      {"labeler", nlohmann::json::json_pointer("/labeling/solver")},
      {"surrogate_mode", nlohmann::json::json_pointer("/surrogate_mode")}};
  return axes;
}

nlohmann::json StageAblate(const ExperimentConfig& c) {
  const auto& axes = AblationAxes();
  auto axis = axes.find(c.ablate_axis);
  if (axis == axes.end()) {
    throw Error(ErrorCode::kConfig, "unknown ablation axis '" + c.ablate_axis +
                                        "' (sampling, sample_size, labeler, surrogate_mode)");
  }
  if (!c.ablate_values.is_array() || c.ablate_values.empty()) {
    throw Error(ErrorCode::kConfig, "ablate.values must be a nonempty list");
  }
  nlohmann::json cells = nlohmann::json::array();
  std::string table = "axis=" + c.ablate_axis + "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %4s %14s %14s %12s\n", "value", "rep",
                "med_gap_bks(%)", "med_pred(%)", "test_mape(%)");
  table += buf;
  for (const auto& value : c.ablate_values) {
    const std::string label = value.is_string() ? value.get<std::string>() : value.dump();
    for (int rep = 0; rep < c.ablate_repeats; ++rep) {
      nlohmann::json raw = c.raw;
      raw[axis->second] = value;
      raw["seed"] = c.seed + rep;
      raw.erase("ablate");
      if (raw.value("training", nlohmann::json::object()).value("n_test", 0) <= 0) {
        raw["training"]["n_test"] = 200;
      }
      ExperimentConfig cell = ExperimentConfig::FromJson(raw, "/");
      cell.instances = c.instances;
      cell.bks_file = c.bks_file;
      cell.out_dir =
          (fs::path(c.out_dir) / "ablate" / (c.ablate_axis + "-" + label) / ("rep" + std::to_string(rep)))
              .string();
      nlohmann::json trained;
      for (const std::string& stage : {"sample", "label", "train", "solve", "route"}) {
        nlohmann::json r = RunStage(stage, cell);
        if (std::string(stage) == "train") trained = r;
      }
      const EvaluationReport report = BuildReport(cell);
      StageEvaluate(cell);
      std::vector<double> gaps, preds;
      for (const ReportRow& row : report.rows) {
        if (row.gap_bks) gaps.push_back(*row.gap_bks);
        if (row.pred_error) preds.push_back(*row.pred_error);
      }
      nlohmann::json cellj = {{"value", value},
                              {"repeat", rep},
                              {"median_gap_bks", Median(gaps)},
                              {"median_pred_error", Median(preds)},
                              {"test_mape", trained.value("test_mape", -1.0)},
                              {"out_dir", cell.out_dir}};
      cells.push_back(cellj);
      std::snprintf(buf, sizeof(buf), "%-14s %4d %14.2f %14.2f %12.2f\n", label.c_str(), rep,
                    Median(gaps), Median(preds), trained.value("test_mape", -1.0));
      table += buf;
    }
  }
  const nlohmann::json result = {{"axis", c.ablate_axis}, {"cells", cells},
                                 {"config_hash", c.Hash()}};
  const std::string json_path = ArtifactPath(c, "ablation.json");
  WriteJson(json_path, result);
  WriteText(ArtifactPath(c, "ablation.txt"), table);
  WriteProvenance(c, json_path, "ablate", {});
  return {{"artifacts", {json_path, ArtifactPath(c, "ablation.txt")}},
          {"cells", cells},
          {"table", table}};
}

template <typename T>
T Get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string InstanceKey(const std::string& path) {
  return fs::path(path).stem().string();
}

ClrpInstance LoadConfiguredInstance(const ExperimentConfig& config, const std::string& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact, "instance file not found: " + path);
  }
  std::optional<RoundingMode> force;
  if (config.rounding != "file") force = ParseRoundingMode(config.rounding);
  ClrpInstance inst = LoadProdhon(path, force);
  CheckInstance(inst);
  return inst;
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j,
                                            const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kTopLevelKeys.count(it.key())) {
      throw Error(ErrorCode::kConfig, "unknown config key '" + it.key() + "'");
    }
  }
  ExperimentConfig c;
  c.raw = j;
  c.name = Get<std::string>(j, "name", c.name);
  for (const std::string& p : Get<std::vector<std::string>>(j, "instances", {})) {
    c.instances.push_back(ResolvePath(p, base_dir));
  }
  c.bks_file = ResolvePath(Get<std::string>(j, "bks_file", ""), base_dir);
  c.rounding = Get<std::string>(j, "rounding", c.rounding);
  if (c.rounding != "file") ParseRoundingMode(c.rounding);
  c.seed = Get<std::uint64_t>(j, "seed", c.seed);
  c.out_dir = ResolvePath(Get<std::string>(j, "out_dir", c.out_dir), base_dir);

  const nlohmann::json s = Get<nlohmann::json>(j, "sampling", nlohmann::json::object());
  c.sampling_method = ParseSamplingMethod(Get<std::string>(s, "method", "RSCC"));
  c.n_data = Get<int>(s, "n_data", c.n_data);
  if (c.n_data <= 0) throw Error(ErrorCode::kConfig, "sampling.n_data must be positive");
  if (s.contains("gvs")) c.gvs = GvsParams::FromJson(s["gvs"]);

  const nlohmann::json l = Get<nlohmann::json>(j, "labeling", nlohmann::json::object());
  c.labeling.solver = ParseLabelSolver(Get<std::string>(l, "solver", "heuristic"));
  c.labeling.exact_limit = Get<int>(l, "exact_limit", c.labeling.exact_limit);
  c.labeling.oversize = ParseOversizePolicy(Get<std::string>(l, "oversize", "heuristic"));
  c.labeling.heuristic.iterations = Get<int>(l, "iterations", c.labeling.heuristic.iterations);
  c.labeling.threads = Get<int>(l, "threads", c.labeling.threads);

  const nlohmann::json t = Get<nlohmann::json>(j, "training", nlohmann::json::object());
  c.trials = Get<int>(t, "trials", c.trials);
  if (c.trials < 1) throw Error(ErrorCode::kConfig, "training.trials must be >= 1");
  if (t.contains("space")) c.space = HyperparamSpace::FromJson(t["space"]);
  c.n_test = Get<int>(t, "n_test", c.n_test);

  c.surrogate_mode = Get<std::string>(j, "surrogate_mode", c.surrogate_mode);
  if (c.surrogate_mode != "single" && c.surrogate_mode != "customized") {
    throw Error(ErrorCode::kConfig, "surrogate_mode must be 'single' or 'customized'");
  }

  const nlohmann::json so = Get<nlohmann::json>(j, "solve", nlohmann::json::object());
  c.methods = Get<std::vector<std::string>>(so, "methods", c.methods);
  for (const std::string& m : c.methods) {
    if (m != "neo" && m != "flp") {
      throw Error(ErrorCode::kConfig, "unknown solve method '" + m + "' (neo, flp)");
    }
  }
  c.solve.time_limit = Get<double>(so, "time_limit", c.solve.time_limit);
  c.solve.mip_gap = Get<double>(so, "mip_gap", c.solve.mip_gap);
  c.solve.threads = Get<int>(so, "threads", c.solve.threads);
  c.backend = Get<std::string>(so, "backend", c.backend);

  const nlohmann::json ro = Get<nlohmann::json>(j, "routing", nlohmann::json::object());
  c.routing.exact_limit = Get<int>(ro, "exact_limit", c.routing.exact_limit);
  c.routing.heuristic.iterations = Get<int>(ro, "iterations", c.routing.heuristic.iterations);

  c.runs = Get<int>(j, "runs", c.runs);
  if (c.runs < 1) throw Error(ErrorCode::kConfig, "runs must be >= 1");

  const nlohmann::json ab = Get<nlohmann::json>(j, "ablate", nlohmann::json::object());
  c.ablate_axis = Get<std::string>(ab, "axis", "");
  c.ablate_values = Get<nlohmann::json>(ab, "values", nlohmann::json::array());
  c.ablate_repeats = Get<int>(ab, "repeats", c.ablate_repeats);
  return c;
}

std::string ExperimentConfig::Hash() const {
  nlohmann::json j = raw;
  j.erase("out_dir");
  return HashString(j.dump());
}

ExperimentConfig LoadExperimentConfig(const std::string& path, const nlohmann::json& overrides) {
  if (!fs::exists(path)) throw Error(ErrorCode::kMissingArtifact, "config file not found: " + path);
  nlohmann::json j = ReadJsonFile(path);
  if (overrides.is_object()) j.merge_patch(overrides);
  const std::string base = fs::absolute(path).parent_path().string();
  return ExperimentConfig::FromJson(j, base);
}

nlohmann::json RunStage(const std::string& stage, const ExperimentConfig& config) {
  if (std::find(kStages.begin(), kStages.end(), stage) == kStages.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown stage '" + stage + "'");
  }
  if (config.instances.empty() &&
      !(stage == "sample" && config.sampling_method == SamplingMethod::kGvs &&
        config.surrogate_mode == "single")) {
    throw Error(ErrorCode::kConfig, "config lists no instances");
  }
  fs::create_directories(config.out_dir);
  WriteJson(ArtifactPath(config, "config.json"), config.raw);
  nlohmann::json r;
  if (stage == "sample") r = StageSample(config);
  if (stage == "label") r = StageLabel(config);
  if (stage == "train") r = StageTrain(config);
  if (stage == "solve") r = StageSolve(config);
  if (stage == "route") r = StageRoute(config);
  if (stage == "evaluate") r = StageEvaluate(config);
  if (stage == "ablate") r = StageAblate(config);
  r["stage"] = stage;
  r["config_hash"] = config.Hash();
  r["seed"] = config.seed;
  return r;
}

}  // namespace neolrp
