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

#include "neolrp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "Highs.h"
#include "neolrp/errors.hpp"

namespace neolrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Name(const char* prefix, int a) {
  return std::string(prefix) + "_" + std::to_string(a);
}

std::string Name(const char* prefix, int a, int b) {
  return Name(prefix, a) + "_" + std::to_string(b);
}

std::string Name(const char* prefix, int a, int b, int c) {
  return Name(prefix, a, b) + "_" + std::to_string(c);
}

void CheckFinite(double v, const std::string& what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInternal, "non-finite big-M constant for " + what);
  }
}

}  // namespace

int MilpModel::AddVariable(const std::string& name, double lower, double upper,
                           bool integer, double cost) {
  vars.push_back({name, lower, upper, integer});
  objective.push_back(cost);
  return static_cast<int>(vars.size()) - 1;
}

int MilpModel::AddRow(const std::string& name, std::vector<std::pair<int, double>> terms,
                      double lower, double upper) {
  std::erase_if(terms, [](const auto& t) { return std::abs(t.second) < kCoefficientFloor; });
  rows.push_back({name, std::move(terms), lower, upper});
  return static_cast<int>(rows.size()) - 1;
}

int MilpModel::NumBinaries() const {
  return static_cast<int>(std::count_if(vars.begin(), vars.end(), [](const MilpVariable& v) {
    return v.integer && v.lower >= 0.0 && v.upper <= 1.0;
  }));
}

namespace {

void WriteNumber(std::ostream& os, double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  os << s.str();
}

void WriteExpr(std::ostream& os, const MilpModel& m,
               const std::vector<std::pair<int, double>>& terms) {
  if (terms.empty()) {
    os << " 0 " << m.vars.front().name;
    return;
  }
  int on_line = 0;
  for (const auto& [var, coef] : terms) {
    os << (coef < 0 ? " - " : " + ");
    if (std::abs(coef) != 1.0) {
      WriteNumber(os, std::abs(coef));
      os << " ";
    }
    os << m.vars[var].name;
    if (++on_line % 8 == 0) os << "\n  ";
  }
}

}  // namespace

std::string MilpModel::ToLp() const {
  std::ostringstream os;
  os << "\\ neolrp " << kind << " model: " << vars.size() << " variables, "
     << rows.size() << " rows\n";
  os << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t v = 0; v < objective.size(); ++v) {
    if (objective[v] != 0.0) obj.emplace_back(static_cast<int>(v), objective[v]);
  }
  WriteExpr(os, *this, obj);
  os << "\nSubject To\n";
  for (const MilpRow& r : rows) {
    if (r.lower == r.upper) {
      os << " " << r.name << ":";
      WriteExpr(os, *this, r.terms);
      os << " = ";
      WriteNumber(os, r.upper);
      os << "\n";
      continue;
    }
    if (r.lower > -kInf) {
      os << " " << r.name << (r.upper < kInf ? "_lo" : "") << ":";
      WriteExpr(os, *this, r.terms);
      os << " >= ";
      WriteNumber(os, r.lower);
      os << "\n";
    }
    if (r.upper < kInf) {
      os << " " << r.name << (r.lower > -kInf ? "_hi" : "") << ":";
      WriteExpr(os, *this, r.terms);
      os << " <= ";
      WriteNumber(os, r.upper);
      os << "\n";
    }
  }
  os << "Bounds\n";
  for (const MilpVariable& v : vars) {
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) continue;
    os << " ";
    if (v.lower == -kInf) {
      os << "-inf";
    } else {
      WriteNumber(os, v.lower);
    }
    os << " <= " << v.name << " <= ";
    if (v.upper == kInf) {
      os << "+inf";
    } else {
      WriteNumber(os, v.upper);
    }
    os << "\n";
  }
  os << "Binaries\n";
  for (const MilpVariable& v : vars) {
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) os << " " << v.name << "\n";
  }
  os << "Generals\n";
  for (const MilpVariable& v : vars) {
    if (v.integer && !(v.lower == 0.0 && v.upper == 1.0)) os << " " << v.name << "\n";
  }
  os << "End\n";
  return os.str();
}

Embeddings PrecomputeEmbeddings(const ClrpInstance& inst, const SurrogateModel& model) {
  model.CheckShapes();
  Embeddings emb;
  std::vector<Point> coords;
  for (const Customer& c : inst.customers) coords.push_back(c.coord);
  for (const Depot& d : inst.depots) {
    const double p = FeatureScale(d.coord, coords);
    emb.scale.push_back(p);
    std::vector<Eigen::VectorXd> row;
    for (const Customer& c : inst.customers) {
      row.push_back(model.PhiForward(
          CustomerFeature(d.coord, c.coord, c.demand, inst.vehicle_capacity, p)));
    }
    emb.phi.push_back(std::move(row));
  }
  return emb;
}

namespace {

std::vector<Interval> Propagate(const DenseLayer& layer, const std::vector<Interval>& in,
                                bool clamp_input) {
  std::vector<Interval> out(layer.rows());
  for (int r = 0; r < layer.rows(); ++r) {
    double lo = layer.bias(r);
    double hi = layer.bias(r);
    for (int c = 0; c < layer.cols(); ++c) {
      double a = in[c].lower;
      double b = in[c].upper;
      if (clamp_input) {
        a = std::max(0.0, a);
        b = std::max(0.0, b);
      }
      const double w = layer.weights(r, c);
      lo += w >= 0 ? w * a : w * b;
      hi += w >= 0 ? w * b : w * a;
    }
    out[r] = {lo, hi};
  }
  return out;
}

}  // namespace

NeuronBounds ComputeBounds(const SurrogateModel& model, const ClrpInstance& inst,
                           const Embeddings& emb) {
  NeuronBounds nb;
  for (int i = 0; i < inst.num_depots(); ++i) {
    std::vector<Interval> input(model.latent_dim);
    for (int l = 0; l < model.latent_dim; ++l) {
      double lo = 0.0;
      double hi = 0.0;
      for (int j = 0; j < inst.num_customers(); ++j) {
        lo += std::min(0.0, emb.phi[i][j](l));
        hi += std::max(0.0, emb.phi[i][j](l));
      }
      input[l] = {lo, hi};
    }
    std::vector<std::vector<Interval>> hidden;
    std::vector<Interval> prev = input;
    bool clamp = false;
    for (std::size_t k = 0; k + 1 < model.rho.size(); ++k) {
      prev = Propagate(model.rho[k], prev, clamp);
      hidden.push_back(prev);
      clamp = true;
    }
    const std::vector<Interval> out = Propagate(model.rho.back(), prev, clamp);
    nb.input.push_back(std::move(input));
    nb.hidden.push_back(std::move(hidden));
    nb.output.push_back(out[0]);
  }
  return nb;
}

DepotActivations EmbeddedForward(const SurrogateModel& model, const Embeddings& emb,
                                  int depot, const std::vector<int>& customers) {
  DepotActivations a;
  a.input = Eigen::VectorXd::Zero(model.latent_dim);
  for (int j : customers) a.input += emb.phi[depot][j];
  std::vector<Eigen::VectorXd> pre;
  model.RhoForward(a.input, &pre);
  a.output = pre.back()(0);
  pre.pop_back();
  a.hidden = std::move(pre);
  return a;
}

double EmbeddedPrediction(const SurrogateModel& model, const Embeddings& emb, int depot,
                          const std::vector<int>& customers) {
  const DepotActivations a = EmbeddedForward(model, emb, depot, customers);
  return emb.scale[depot] * std::max(0.0, a.output);
}

namespace {

// Variables and rows of the feasible location-allocation set.
void AddLocationAllocation(const ClrpInstance& inst, MilpModel& m) {
  const int n = inst.num_customers();
  const int md = inst.num_depots();
  m.num_depots = md;
  m.num_customers = n;
  m.x.assign(md, std::vector<int>(n, -1));
  for (int i = 0; i < md; ++i) {
    m.y.push_back(m.AddVariable(Name("y", i), 0.0, 1.0, true, inst.depots[i].fixed_cost));
  }
  for (int i = 0; i < md; ++i) {
    for (int j = 0; j < n; ++j) m.x[i][j] = m.AddVariable(Name("x", i, j), 0.0, 1.0, true);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> t;
    for (int i = 0; i < md; ++i) t.emplace_back(m.x[i][j], 1.0);
    m.AddRow(Name("assign", j), std::move(t), 1.0, 1.0);
  }
  for (int i = 0; i < md; ++i) {
    for (int j = 0; j < n; ++j) {
      m.AddRow(Name("link", i, j), {{m.x[i][j], 1.0}, {m.y[i], -1.0}}, -kInf, 0.0);
    }
  }
  for (int i = 0; i < md; ++i) {
    std::vector<std::pair<int, double>> t;
    for (int j = 0; j < n; ++j) t.emplace_back(m.x[i][j], inst.customers[j].demand);
    t.emplace_back(m.y[i], -inst.depots[i].capacity);
    m.AddRow(Name("cap", i), std::move(t), -kInf, 0.0);
  }
}

}  // namespace

MilpModel BuildNeoModel(const ClrpInstance& inst, const SurrogateModel& model) {
  const Embeddings emb = PrecomputeEmbeddings(inst, model);
  return BuildNeoModel(inst, model, emb, ComputeBounds(model, inst, emb));
}

MilpModel BuildNeoModel(const ClrpInstance& inst, const SurrogateModel& model,
                        const Embeddings& emb, const NeuronBounds& bounds) {
  model.CheckShapes();
  MilpModel m;
  m.kind = "neo";
  AddLocationAllocation(inst, m);
  m.scale = emb.scale;
  const int L = model.latent_dim;
  for (int i = 0; i < m.num_depots; ++i) {
    // Input layer.
    std::vector<int> prev;
    for (int l = 0; l < L; ++l) {
      const Interval b = bounds.input[i][l];
      CheckFinite(b.lower, "input layer");
      CheckFinite(b.upper, "input layer");
      const int t = m.AddVariable(Name("theta0", i, l), b.lower, b.upper, false);
      std::vector<std::pair<int, double>> terms = {{t, -1.0}};
      for (int j = 0; j < m.num_customers; ++j) {
        terms.emplace_back(m.x[i][j], emb.phi[i][j](l));
      }
      m.AddRow(Name("input", i, l), std::move(terms), 0.0, 0.0);
      prev.push_back(t);
    }
    m.theta0.push_back(prev);

    // Hidden ReLU layers: w.theta + b = theta - nu, theta <= U+ z, nu <= (-L)+ (1 - z).
    std::vector<std::vector<HiddenUnit>> layers;
    for (std::size_t k = 0; k + 1 < model.rho.size(); ++k) {
      const DenseLayer& layer = model.rho[k];
      std::vector<HiddenUnit> units;
      std::vector<int> next;
      for (int u = 0; u < layer.rows(); ++u) {
        const Interval b = bounds.hidden[i][k][u];
        CheckFinite(b.lower, "hidden unit");
        CheckFinite(b.upper, "hidden unit");
        const double up = std::max(0.0, b.upper);
        const double down = std::max(0.0, -b.lower);
        HiddenUnit h;
        h.theta = m.AddVariable(Name("theta", i, static_cast<int>(k) + 1, u), 0.0, up, false);
        h.nu = m.AddVariable(Name("nu", i, static_cast<int>(k) + 1, u), 0.0, down, false);
        h.z = m.AddVariable(Name("z", i, static_cast<int>(k) + 1, u), 0.0, 1.0, true);
        std::vector<std::pair<int, double>> terms;
        for (int c = 0; c < layer.cols(); ++c) terms.emplace_back(prev[c], layer.weights(u, c));
        terms.emplace_back(h.theta, -1.0);
        terms.emplace_back(h.nu, 1.0);
        m.AddRow(Name("relu", i, static_cast<int>(k) + 1, u), std::move(terms),
                 -layer.bias(u), -layer.bias(u));
        m.AddRow(Name("on", i, static_cast<int>(k) + 1, u), {{h.theta, 1.0}, {h.z, -up}},
                 -kInf, 0.0);
        m.AddRow(Name("off", i, static_cast<int>(k) + 1, u), {{h.nu, 1.0}, {h.z, down}},
                 -kInf, down);
        units.push_back(h);
        next.push_back(h.theta);
      }
      layers.push_back(std::move(units));
      prev = std::move(next);
    }
    m.hidden.push_back(std::move(layers));

    // Output: gamma_i = P_i * max(0, w.theta + b) when y_i = 1, else 0. The
    // ReLU is encoded by its epigraph, which is exact at any minimizer.
    const DenseLayer& out = model.rho.back();
    const double p = emb.scale[i];
    const Interval ob = bounds.output[i];
    CheckFinite(ob.upper, "output unit");
    const double big_m = p * std::max(0.0, ob.upper);
    const int g = m.AddVariable(Name("gamma", i), 0.0, big_m, false, 1.0);
    m.gamma.push_back(g);
    std::vector<std::pair<int, double>> terms = {{g, 1.0}};
    for (int c = 0; c < out.cols(); ++c) terms.emplace_back(prev[c], -p * out.weights(0, c));
    terms.emplace_back(m.y[i], -big_m);
    m.AddRow(Name("out", i), std::move(terms), p * out.bias(0) - big_m, kInf);
    m.AddRow(Name("out_closed", i), {{g, 1.0}, {m.y[i], -big_m}}, -kInf, 0.0);
  }
  return m;
}

MilpModel BuildFlpModel(const ClrpInstance& inst) {
  MilpModel m;
  m.kind = "flp";
  AddLocationAllocation(inst, m);
  for (int i = 0; i < m.num_depots; ++i) {
    for (int j = 0; j < m.num_customers; ++j) m.objective[m.x[i][j]] = inst.cost(i, j);
  }
  return m;
}

void AddIncompatibility(MilpModel& model, const std::vector<std::pair<int, int>>& pairs) {
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= model.num_customers || b >= model.num_customers || a == b) {
      throw Error(ErrorCode::kInvalidArgument, "invalid conflicting pair (" +
                                                   std::to_string(a) + ", " +
                                                   std::to_string(b) + ")");
    }
    for (int i = 0; i < model.num_depots; ++i) {
      model.AddRow(Name("conflict", i, a, b), {{model.x[i][a], 1.0}, {model.x[i][b], 1.0}},
                   -kInf, 1.0);
    }
  }
}

std::vector<std::string> AddDepotRestriction(MilpModel& model,
                                             const std::vector<std::vector<int>>& allowed) {
  std::vector<std::string> warnings;
  for (std::size_t j = 0; j < allowed.size(); ++j) {
    if (allowed[j].empty()) continue;
    if (static_cast<int>(j) >= model.num_customers) {
      throw Error(ErrorCode::kInvalidArgument, "restriction for unknown customer " +
                                                   std::to_string(j));
    }
    std::vector<bool> ok(model.num_depots, false);
    for (int i : allowed[j]) {
      if (i < 0 || i >= model.num_depots) {
        throw Error(ErrorCode::kInvalidArgument, "restriction names unknown depot " +
                                                     std::to_string(i));
      }
      ok[i] = true;
    }
    for (int i = 0; i < model.num_depots; ++i) {
      if (!ok[i]) model.vars[model.x[i][j]].upper = 0.0;
    }
  }
  for (int j = 0; j < model.num_customers; ++j) {
    bool servable = false;
    for (int i = 0; i < model.num_depots; ++i) {
      servable = servable || model.vars[model.x[i][j]].upper > 0.0;
    }
    if (!servable) {
      warnings.push_back("customer " + std::to_string(j) +
                         " has no admissible depot; the model is infeasible");
    }
  }
  return warnings;
}

void FixAssignment(MilpModel& model, const LocationAllocation& la) {
  for (int i = 0; i < model.num_depots; ++i) {
    const double open = la.open.at(i) ? 1.0 : 0.0;
    model.vars[model.y[i]].lower = open;
    model.vars[model.y[i]].upper = open;
    for (int j = 0; j < model.num_customers; ++j) {
      const double v = la.depot_of.at(j) == i ? 1.0 : 0.0;
      model.vars[model.x[i][j]].lower = v;
      model.vars[model.x[i][j]].upper = v;
    }
  }
}

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleAtLimit:
      return "feasible-at-limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kNoSolution:
      return "no-solution";
    case SolveStatus::kError:
      return "error";
  }
  return "?";
}

namespace {

class HighsBackend : public MilpBackend {
 public:
  HighsBackend() {
    highs_.setOptionValue("output_flag", false);
    lp_.sense_ = ObjSense::kMinimize;
    lp_.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp_.a_matrix_.start_ = {0};
  }

  std::string name() const override { return "highs"; }

  int AddVariable(double lower, double upper, bool integer) override {
    lp_.col_lower_.push_back(lower);
    lp_.col_upper_.push_back(upper);
    lp_.col_cost_.push_back(0.0);
    lp_.integrality_.push_back(integer ? HighsVarType::kInteger : HighsVarType::kContinuous);
    return lp_.num_col_++;
  }

  void AddConstraint(const std::vector<int>& index, const std::vector<double>& value,
                     double lower, double upper) override {
    for (std::size_t k = 0; k < index.size(); ++k) {
      lp_.a_matrix_.index_.push_back(index[k]);
      lp_.a_matrix_.value_.push_back(value[k]);
    }
    lp_.a_matrix_.start_.push_back(static_cast<HighsInt>(lp_.a_matrix_.index_.size()));
    lp_.row_lower_.push_back(lower);
    lp_.row_upper_.push_back(upper);
    ++lp_.num_row_;
  }

  void SetObjective(const std::vector<double>& cost) override {
    if (static_cast<int>(cost.size()) != lp_.num_col_) {
      throw Error(ErrorCode::kBackend, "objective length differs from column count");
    }
    lp_.col_cost_ = cost;
  }

  void SetTimeLimit(double seconds) override { highs_.setOptionValue("time_limit", seconds); }
  void SetRelativeGap(double gap) override { highs_.setOptionValue("mip_rel_gap", gap); }
  void SetThreads(int threads) override { highs_.setOptionValue("threads", threads); }
  void SetSeed(int seed) override { highs_.setOptionValue("random_seed", seed); }

  SolveStatus Solve() override {
    lp_.a_matrix_.num_col_ = lp_.num_col_;
    lp_.a_matrix_.num_row_ = lp_.num_row_;
    bool any_integer = false;
    for (HighsVarType t : lp_.integrality_) any_integer |= t == HighsVarType::kInteger;
    if (!any_integer) lp_.integrality_.clear();
    HighsStatus st = highs_.passModel(lp_);
    if (st == HighsStatus::kError) {
      diagnostics_ = "HiGHS rejected the model";
      return SolveStatus::kError;
    }
    st = highs_.run();
    const HighsModelStatus ms = highs_.getModelStatus();
    diagnostics_ = "HiGHS model status: " + highs_.modelStatusToString(ms);
    if (st == HighsStatus::kError) return SolveStatus::kError;
    const HighsInfo& info = highs_.getInfo();
    const bool feasible = info.primal_solution_status == kSolutionStatusFeasible;
    switch (ms) {
      case HighsModelStatus::kOptimal:
        return SolveStatus::kOptimal;
      case HighsModelStatus::kInfeasible:
      case HighsModelStatus::kUnboundedOrInfeasible:
        return SolveStatus::kInfeasible;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
      case HighsModelStatus::kUnknown:
        return feasible ? SolveStatus::kFeasibleAtLimit : SolveStatus::kNoSolution;
      default:
        return SolveStatus::kError;
    }
  }

  std::vector<double> Values() const override { return highs_.getSolution().col_value; }
  double Objective() const override { return highs_.getInfo().objective_function_value; }
  std::string Diagnostics() const override { return diagnostics_; }

 private:
  Highs highs_;
  HighsLp lp_;
  std::string diagnostics_;
};

}  // namespace

std::string DefaultBackendName() {
  const char* env = std::getenv("NEOLRP_MILP_BACKEND");
  return env && *env ? env : "highs";
}

std::unique_ptr<MilpBackend> MakeBackend(const std::string& name) {
  const std::string chosen = name.empty() ? DefaultBackendName() : name;
  if (chosen == "highs") return std::make_unique<HighsBackend>();
  throw Error(ErrorCode::kBackend, "unknown MILP backend '" + chosen + "'");
}

MilpSolution SolveModel(const MilpModel& model, MilpBackend& backend,
                        const SolveParams& params) {
  for (const MilpVariable& v : model.vars) backend.AddVariable(v.lower, v.upper, v.integer);
  for (const MilpRow& r : model.rows) {
    std::vector<int> idx;
    std::vector<double> val;
    for (const auto& [var, coef] : r.terms) {
      idx.push_back(var);
      val.push_back(coef);
    }
    backend.AddConstraint(idx, val, r.lower, r.upper);
  }
  backend.SetObjective(model.objective);
  backend.SetTimeLimit(params.time_limit);
  backend.SetRelativeGap(params.mip_gap);
  backend.SetThreads(params.threads);
  backend.SetSeed(params.seed);

  MilpSolution sol;
  sol.backend = backend.name();
  sol.status = backend.Solve();
  sol.diagnostics = backend.Diagnostics();
  if (sol.status == SolveStatus::kError) {
    throw Error(ErrorCode::kBackend, "MILP backend failure: " + sol.diagnostics);
  }
  if (!sol.has_incumbent()) return sol;
  sol.values = backend.Values();
  sol.objective = backend.Objective();
  sol.allocation.depot_of.assign(model.num_customers, -1);
  sol.allocation.open.assign(model.num_depots, false);
  for (int i = 0; i < model.num_depots; ++i) {
    sol.allocation.open[i] = sol.values[model.y[i]] > 0.5;
    for (int j = 0; j < model.num_customers; ++j) {
      if (sol.values[model.x[i][j]] > 0.5) sol.allocation.depot_of[j] = i;
    }
  }
  for (int g : model.gamma) sol.gamma.push_back(sol.values[g]);
  return sol;
}

MilpSolution SolveModel(const MilpModel& model, const SolveParams& params,
                        const std::string& backend_name) {
  std::unique_ptr<MilpBackend> backend = MakeBackend(backend_name);
  return SolveModel(model, *backend, params);
}

}  // namespace neolrp
