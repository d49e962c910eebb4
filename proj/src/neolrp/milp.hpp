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

// Location-allocation MILPs.
//
// BuildNeoModel embeds the trained rho network per depot: the latent input
// theta0_i = sum_j phi(s_ij) x_ij is a linear expression in x, every hidden
// ReLU unit gets a binary z with big-M constants from interval bounds, and the
// output gamma_i carries the per-depot scale P_i so the objective is in cost
// units. BuildFlpModel replaces routing by direct depot-customer costs.

#ifndef NEOLRP_MILP_HPP_
#define NEOLRP_MILP_HPP_

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "neolrp/core_model.hpp"
#include "neolrp/surrogate.hpp"

namespace neolrp {

// Coefficients below this magnitude are dropped from rows.
inline constexpr double kCoefficientFloor = 1e-12;

struct MilpVariable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool integer = false;
};

struct MilpRow {
  std::string name;
  std::vector<std::pair<int, double>> terms;
  double lower = 0.0;
  double upper = 0.0;
};

struct HiddenUnit {
  int theta = -1;  // Post-activation, >= 0.
  int nu = -1;     // Slack, >= 0.
  int z = -1;      // Active indicator.
};

struct MilpModel {
  std::string kind;  // "neo" or "flp".
  std::vector<MilpVariable> vars;
  std::vector<MilpRow> rows;
  std::vector<double> objective;  // One coefficient per variable.

  int num_depots = 0;
  int num_customers = 0;
  std::vector<std::vector<int>> x;  // x[i][j]
  std::vector<int> y;
  std::vector<int> gamma;                       // neo only
  std::vector<std::vector<int>> theta0;         // [i][l], neo only
  std::vector<std::vector<std::vector<HiddenUnit>>> hidden;  // [i][k][m]
  std::vector<double> scale;                    // P_i, neo only

  int AddVariable(const std::string& name, double lower, double upper, bool integer,
                  double cost = 0.0);
  int AddRow(const std::string& name, std::vector<std::pair<int, double>> terms,
             double lower, double upper);

  int NumBinaries() const;
  // CPLEX LP text.
  std::string ToLp() const;
};

// phi(s_ij) for every depot i and customer j, using one scale P_i per depot
// computed over all customers.
struct Embeddings {
  std::vector<double> scale;                      // P_i
  std::vector<std::vector<Eigen::VectorXd>> phi;  // [i][j], width L
};

Embeddings PrecomputeEmbeddings(const ClrpInstance& inst, const SurrogateModel& model);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Pre-activation bounds per depot: input layer, each rho hidden layer, output.
struct NeuronBounds {
  std::vector<std::vector<Interval>> input;                // [i][l]
  std::vector<std::vector<std::vector<Interval>>> hidden;  // [i][k][m]
  std::vector<Interval> output;                            // [i]
};

NeuronBounds ComputeBounds(const SurrogateModel& model, const ClrpInstance& inst,
                           const Embeddings& emb);

// Activations of depot i for a given assignment: theta0, hidden
// pre-activations and the output pre-activation.
struct DepotActivations {
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> hidden;
  double output = 0.0;
};

DepotActivations EmbeddedForward(const SurrogateModel& model, const Embeddings& emb,
                                 int depot, const std::vector<int>& customers);

// P_i * rho(theta0) for the given customers of depot i.
double EmbeddedPrediction(const SurrogateModel& model, const Embeddings& emb, int depot,
                          const std::vector<int>& customers);

MilpModel BuildNeoModel(const ClrpInstance& inst, const SurrogateModel& model);
MilpModel BuildNeoModel(const ClrpInstance& inst, const SurrogateModel& model,
                        const Embeddings& emb, const NeuronBounds& bounds);
MilpModel BuildFlpModel(const ClrpInstance& inst);

// Pairs of customer indices that may not share a depot.
void AddIncompatibility(MilpModel& model, const std::vector<std::pair<int, int>>& pairs);

// allowed[j] lists the depots that may serve customer j; an empty list leaves j
// unrestricted. Returns warnings for customers left with no admissible depot.
std::vector<std::string> AddDepotRestriction(MilpModel& model,
                                             const std::vector<std::vector<int>>& allowed);

// Fixes x and y by bounds.
void FixAssignment(MilpModel& model, const LocationAllocation& la);

enum class SolveStatus { kOptimal, kFeasibleAtLimit, kInfeasible, kNoSolution, kError };

std::string_view SolveStatusName(SolveStatus status);

struct SolveParams {
  double time_limit = 300.0;
  double mip_gap = 1e-4;
  int threads = 1;
  int seed = 0;
};

// Minimal engine interface.
class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual std::string name() const = 0;
  virtual int AddVariable(double lower, double upper, bool integer) = 0;
  virtual void AddConstraint(const std::vector<int>& index,
                             const std::vector<double>& value, double lower,
                             double upper) = 0;
  virtual void SetObjective(const std::vector<double>& cost) = 0;
  virtual void SetTimeLimit(double seconds) = 0;
  virtual void SetRelativeGap(double gap) = 0;
  virtual void SetThreads(int threads) = 0;
  virtual void SetSeed(int seed) = 0;
  virtual SolveStatus Solve() = 0;
  virtual std::vector<double> Values() const = 0;
  virtual double Objective() const = 0;
  virtual std::string Diagnostics() const = 0;
};

// Backend selection: `name` if non-empty, else $NEOLRP_MILP_BACKEND, else
// "highs". Throws Error(kBackend) for unknown names.
std::unique_ptr<MilpBackend> MakeBackend(const std::string& name = "");
std::string DefaultBackendName();

struct MilpSolution {
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  std::vector<double> values;
  LocationAllocation allocation;
  std::vector<double> gamma;  // Empty for FLP models.
  std::string backend;
  std::string diagnostics;

  bool has_incumbent() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kFeasibleAtLimit;
  }
};

MilpSolution SolveModel(const MilpModel& model, MilpBackend& backend,
                        const SolveParams& params);
MilpSolution SolveModel(const MilpModel& model, const SolveParams& params,
                        const std::string& backend_name = "");

}  // namespace neolrp

#endif  // NEOLRP_MILP_HPP_
