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

// Permutation-invariant cost regressor rho(sum_j phi(sigma_j)).
//
// phi maps a 3-dim customer feature through ReLU hidden layers to a linear
// latent vector of width L. rho has a single ReLU hidden layer and a ReLU
// scalar output. The network predicts cost / P, where P is the feature scale
// of the instance, so Predict() multiplies by P.

#ifndef NEOLRP_SURROGATE_HPP_
#define NEOLRP_SURROGATE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "neolrp/core_model.hpp"
#include "neolrp/sampling.hpp"

namespace neolrp {

enum class Activation { kRelu, kLinear };

struct DenseLayer {
  Eigen::MatrixXd weights;  // rows = outputs, cols = inputs.
  Eigen::VectorXd bias;
  Activation activation = Activation::kRelu;

  int rows() const { return static_cast<int>(weights.rows()); }
  int cols() const { return static_cast<int>(weights.cols()); }
};

struct SurrogateModel {
  int latent_dim = 0;
  std::vector<DenseLayer> phi;
  std::vector<DenseLayer> rho;
  nlohmann::json metadata = nlohmann::json::object();

  // Throws Error(kShape) when the layer stack is inconsistent.
  void CheckShapes() const;

  Eigen::VectorXd PhiForward(const Feature& sigma) const;
  // Hidden pre-activations of rho are appended to `pre` when non-null.
  double RhoForward(const Eigen::VectorXd& theta,
                    std::vector<Eigen::VectorXd>* pre = nullptr) const;

  nlohmann::json ToJson() const;
  static SurrogateModel FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static SurrogateModel Load(const std::string& path);
};

// rho(sum_j phi(sigma_j)), with the sum taken in a canonical feature order so
// the result does not depend on how customers are listed.
double PredictNormalized(const SurrogateModel& model,
                         const std::vector<Feature>& sigma);

// Same, over a padded feature list where only entries with mask[k] count.
double PredictPadded(const SurrogateModel& model,
                     const std::vector<Feature>& padded,
                     const std::vector<bool>& mask);

double Predict(const SurrogateModel& model, const VrpInstance& vrp);

struct Hyperparams {
  int latent_dim = 6;
  int phi_depth = 2;  // Hidden layers in phi.
  int phi_width = 64;
  int rho_width = 6;
  int patience = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int epochs = 200;

  nlohmann::json ToJson() const;
  static Hyperparams FromJson(const nlohmann::json& j);
};

// Discrete choice sets. Defaults are the full published ranges.
struct HyperparamSpace {
  std::vector<int> latent_dim = {4, 6, 8};
  std::vector<int> phi_depth = {2, 3, 4, 5, 6};
  std::vector<int> phi_width = {32, 64, 128, 256, 512, 1024, 2048};
  std::vector<int> rho_width = {4, 6, 8};
  std::vector<int> patience = {15, 20};
  std::vector<int> epochs = {50, 100, 200, 400, 600, 800, 1000};

  // Throws Error(kConfig) when a choice lies outside the published ranges.
  void Validate() const;
  Hyperparams Sample(std::mt19937_64& rng) const;

  nlohmann::json ToJson() const;
  static HyperparamSpace FromJson(const nlohmann::json& j);
};

struct TrainResult {
  SurrogateModel model;
  double best_val_mse = 0.0;
  int best_epoch = 0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> best_val_curve;  // Running minimum of val_loss.
};

// Deterministic for a fixed seed. Throws Error(kTraining) when the dataset is
// empty or has unlabeled samples.
TrainResult Train(const VrpDataset& ds, const Hyperparams& hp, std::uint64_t seed);

struct SearchResult {
  TrainResult best;
  int best_trial = 0;
  nlohmann::json trials = nlohmann::json::array();
};

// Random search. All trials share one 90/10 split derived from `seed`; ties
// on validation MSE go to the earliest trial.
SearchResult HyperparamSearch(const VrpDataset& ds, int n_trials,
                              const HyperparamSpace& space, std::uint64_t seed);

struct MapeResult {
  double mape = 0.0;  // Percent.
  int evaluated = 0;
  int skipped_zero = 0;
};

MapeResult EvaluateMape(const SurrogateModel& model, const VrpDataset& ds);

// A batch in normalized units, for gradient checks.
struct NormalizedBatch {
  std::vector<std::vector<Feature>> features;
  std::vector<double> targets;
};

NormalizedBatch MakeBatch(const VrpDataset& ds);

// Mean squared error in double precision and its gradient with respect to
// FlattenParameters(model).
double LossAndGradient(const SurrogateModel& model, const NormalizedBatch& batch,
                       std::vector<double>* gradient);
std::vector<double> FlattenParameters(const SurrogateModel& model);
void SetParameters(SurrogateModel& model, const std::vector<double>& params);

// Fresh He-uniform initialized network.
SurrogateModel InitModel(const Hyperparams& hp, std::uint64_t seed);

}  // namespace neolrp

#endif  // NEOLRP_SURROGATE_HPP_
