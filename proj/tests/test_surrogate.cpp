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

#include <algorithm>
#include <cmath>
#include <random>

#include "neolrp/errors.hpp"
#include "neolrp/routing.hpp"
#include "neolrp/sampling.hpp"
#include "neolrp/surrogate.hpp"
#include "test_util.hpp"

namespace neolrp {
namespace {

DenseLayer Layer(std::vector<std::vector<double>> w, std::vector<double> b, Activation a) {
  DenseLayer l;
  l.weights.resize(w.size(), w[0].size());
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (std::size_t c = 0; c < w[0].size(); ++c) l.weights(r, c) = w[r][c];
  }
  l.bias = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
  l.activation = a;
  return l;
}

// phi sums the demand component; rho computes 2*t + 0.5.
SurrogateModel HandModel() {
  SurrogateModel m;
  m.latent_dim = 1;
  m.phi = {Layer({{0, 0, 1}}, {0}, Activation::kRelu), Layer({{1}}, {0}, Activation::kLinear)};
  m.rho = {Layer({{1}}, {0}, Activation::kRelu), Layer({{2}}, {0.5}, Activation::kRelu)};
  m.CheckShapes();
  return m;
}

Hyperparams SmallHp() {
  Hyperparams hp;
  hp.latent_dim = 4;
  hp.phi_depth = 2;
  hp.phi_width = 16;
  hp.rho_width = 4;
  hp.epochs = 30;
  hp.patience = 15;
  return hp;
}

SurrogateModel RandomModel(std::uint64_t seed) {
  SurrogateModel m = InitModel(SmallHp(), seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (DenseLayer* l : {&m.phi[0], &m.phi[1], &m.phi[2], &m.rho[0], &m.rho[1]}) {
    for (int r = 0; r < l->bias.size(); ++r) l->bias(r) = u(rng);
  }
  m.rho[1].bias(0) = 2.0;  // keep the output unit active
  return m;
}

VrpDataset LabeledDataset(int n, std::uint64_t seed) {
  const ClrpInstance src = testing::RandomInstance(15, 3, seed, 50, RoundingMode::kRaw);
  LabelOptions o;
  o.heuristic.iterations = 20;
  return LabelDataset(RsccSample({src}, n, seed), o);
}

TEST(Predict, HandSetWeights) {
  VrpInstance v;
  v.depot = {0, 0};
  v.vehicle_capacity = 10;
  v.customers = {{{2, 1}, 5}, {{-4, 3}, 10}};
  // P = 4, demand features 0.5 and 1, rho(1.5) = 3.5.
  EXPECT_EQ(Predict(HandModel(), v), 14.0);
}

TEST(Predict, PermutationAndTranslationBitExact) {
  const SurrogateModel m = RandomModel(3);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> shift(-10000, 10000);
  for (int t = 0; t < 200; ++t) {
    const VrpInstance v = testing::RandomVrp(1 + t % 20, 50 + t, RoundingMode::kRaw, 40);
    const double base = Predict(m, v);
    VrpInstance perm = v;
    std::shuffle(perm.customers.begin(), perm.customers.end(), rng);
    EXPECT_EQ(Predict(m, perm), base);
    VrpInstance moved = v;
    const double dx = shift(rng), dy = shift(rng);
    moved.depot = {v.depot.x + dx, v.depot.y + dy};
    for (auto& c : moved.customers) c.coord = {c.coord.x + dx, c.coord.y + dy};
    EXPECT_EQ(Predict(m, moved), base);
  }
}

TEST(Predict, PaddingContributesNothing) {
  const SurrogateModel m = RandomModel(5);
  const VrpInstance v = testing::RandomVrp(6, 2, RoundingMode::kRaw, 40);
  const NormalizedFeatures f = NormalizeFeatures(v);
  std::vector<Feature> padded = f.sigma;
  std::vector<bool> mask(padded.size(), true);
  for (int k = 0; k < 5; ++k) {
    padded.push_back({0, 0, 0});
    mask.push_back(false);
  }
  EXPECT_EQ(PredictPadded(m, padded, mask), PredictNormalized(m, f.sigma));
  // phi(0) is not zero, so literal zero padding would change the sum.
  EXPECT_NE(PredictNormalized(m, padded), PredictNormalized(m, f.sigma));
  EXPECT_THROW(PredictPadded(m, padded, {true}), Error);
}

TEST(Predict, NonNegative) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    SurrogateModel m = InitModel(SmallHp(), s);
    m.rho[1].bias(0) = -0.5;
    for (int t = 0; t < 20; ++t) {
      EXPECT_GE(Predict(m, testing::RandomVrp(1 + t, s * 100 + t, RoundingMode::kRaw, 40)), 0.0);
    }
  }
}

TEST(Model, ShapeErrors) {
  SurrogateModel m = HandModel();
  m.latent_dim = 2;
  EXPECT_THROW(m.CheckShapes(), Error);
  m = HandModel();
  m.rho.push_back(m.rho.back());
  try {
    m.CheckShapes();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  m = HandModel();
  m.phi.back().activation = Activation::kRelu;
  EXPECT_THROW(m.CheckShapes(), Error);
  EXPECT_THROW(HandModel().RhoForward(Eigen::VectorXd::Zero(3)), Error);
}

TEST(Model, JsonRoundTripBitExact) {
  SurrogateModel m = RandomModel(8);
  m.metadata = {{"seed", 8}};
  const std::string dir = testing::TempDir("model");
  m.Save(dir + "/m.json");
  const SurrogateModel back = SurrogateModel::Load(dir + "/m.json");
  EXPECT_EQ(FlattenParameters(back), FlattenParameters(m));
  EXPECT_EQ(back.ToJson().dump(), m.ToJson().dump());
  const nlohmann::json j = m.ToJson();
  EXPECT_EQ(j["L"], 4);
  EXPECT_EQ(j["phi"][0]["rows"], 16);
  EXPECT_EQ(j["phi"][0]["cols"], 3);
  EXPECT_EQ(j["rho"][1]["activation"], "relu");
  try {
    SurrogateModel::Load(dir + "/missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingArtifact);
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  const VrpDataset ds = LabeledDataset(3, 21);
  const NormalizedBatch batch = MakeBatch(ds);
  ASSERT_EQ(batch.targets.size(), 3u);
  SurrogateModel m = RandomModel(9);
  std::vector<double> grad;
  LossAndGradient(m, batch, &grad);
  const std::vector<double> theta = FlattenParameters(m);
  ASSERT_EQ(grad.size(), theta.size());
  int nonzero = 0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[k]));
    std::vector<double> p = theta;
    p[k] = theta[k] + h;
    SetParameters(m, p);
    const double up = LossAndGradient(m, batch, nullptr);
    p[k] = theta[k] - h;
    SetParameters(m, p);
    const double down = LossAndGradient(m, batch, nullptr);
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(numeric), std::abs(grad[k]));
    if (scale == 0.0) continue;
    ++nonzero;
    EXPECT_LE(std::abs(numeric - grad[k]), 1e-4 * scale) << "parameter " << k;
  }
  SetParameters(m, theta);
  EXPECT_GT(nonzero, static_cast<int>(theta.size()) / 2);
}

TEST(Train, ConstantFit) {
  VrpDataset ds;
  VrpInstance v = testing::RandomVrp(5, 3, RoundingMode::kRaw, 40);
  const double y = 123.0;
  for (int k = 0; k < 64; ++k) ds.samples.push_back({v, y, "exact"});
  Hyperparams hp = SmallHp();
  hp.epochs = 100;
  const TrainResult r = Train(ds, hp, 1);
  EXPECT_NEAR(Predict(r.model, v), y, 0.01 * y);
}

TEST(Train, DeterministicAndMonotoneBestCurve) {
  const VrpDataset ds = LabeledDataset(120, 5);
  const TrainResult a = Train(ds, SmallHp(), 77);
  const TrainResult b = Train(ds, SmallHp(), 77);
  EXPECT_EQ(FlattenParameters(a.model), FlattenParameters(b.model));
  EXPECT_EQ(a.val_loss, b.val_loss);
  ASSERT_FALSE(a.best_val_curve.empty());
  for (std::size_t k = 1; k < a.best_val_curve.size(); ++k) {
    EXPECT_LE(a.best_val_curve[k], a.best_val_curve[k - 1]);
  }
  EXPECT_EQ(a.best_val_mse, a.best_val_curve.back());
  EXPECT_TRUE(a.model.metadata.contains("seed"));
  EXPECT_EQ(a.model.metadata["val_loss"].size(), a.val_loss.size());
  const TrainResult c = Train(ds, SmallHp(), 78);
  EXPECT_NE(FlattenParameters(a.model), FlattenParameters(c.model));
}

TEST(Train, RestoresBestWeights) {
  const VrpDataset ds = LabeledDataset(80, 6);
  Hyperparams hp = SmallHp();
  hp.epochs = 60;
  const TrainResult r = Train(ds, hp, 3);
  EXPECT_EQ(r.val_loss[r.best_epoch - 1], r.best_val_mse);
}

TEST(Train, RejectsEmptyOrUnlabeled) {
  try {
    Train(VrpDataset{}, SmallHp(), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTraining);
  }
  VrpDataset ds;
  ds.samples.push_back({testing::RandomVrp(3, 1, RoundingMode::kRaw), {}, {}});
  EXPECT_THROW(Train(ds, SmallHp(), 0), Error);
}

HyperparamSpace TinySpace() {
  HyperparamSpace s;
  s.latent_dim = {4, 6};
  s.phi_depth = {2};
  s.phi_width = {32};
  s.rho_width = {4, 8};
  s.patience = {15};
  s.epochs = {50};
  return s;
}

TEST(Search, SingleTrial) {
  const VrpDataset ds = LabeledDataset(60, 7);
  const SearchResult r = HyperparamSearch(ds, 1, TinySpace(), 2);
  EXPECT_EQ(r.best_trial, 0);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.trials[0]["best_val_mse"].get<double>(), r.best.best_val_mse);
}

TEST(Search, BestAndDeterminism) {
  const VrpDataset ds = LabeledDataset(60, 8);
  const SearchResult a = HyperparamSearch(ds, 4, TinySpace(), 5);
  const SearchResult b = HyperparamSearch(ds, 4, TinySpace(), 5);
  for (const auto& t : a.trials) {
    EXPECT_LE(a.best.best_val_mse, t["best_val_mse"].get<double>());
  }
  EXPECT_EQ(a.trials.dump(), b.trials.dump());
  EXPECT_EQ(a.best_trial, b.best_trial);
  EXPECT_EQ(FlattenParameters(a.best.model), FlattenParameters(b.best.model));
  EXPECT_THROW(HyperparamSearch(ds, 0, TinySpace(), 5), Error);
}

TEST(Search, SpaceValidation) {
  HyperparamSpace s;
  EXPECT_NO_THROW(s.Validate());
  s.latent_dim = {5};
  EXPECT_THROW(s.Validate(), Error);
  s = HyperparamSpace{};
  s.phi_width = {4096};
  EXPECT_THROW(s.Validate(), Error);
  s = HyperparamSpace{};
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Hyperparams hp = s.Sample(rng);
    EXPECT_GE(hp.phi_depth, 2);
    EXPECT_LE(hp.phi_depth, 6);
    EXPECT_EQ(hp.batch_size, 32);
    EXPECT_EQ(hp.learning_rate, 1e-3);
  }
}

TEST(Mape, Examples) {
  const SurrogateModel m = RandomModel(10);
  VrpDataset ds;
  for (int k = 0; k < 10; ++k) {
    const VrpInstance v = testing::RandomVrp(1 + k, 200 + k, RoundingMode::kRaw, 40);
    const double p = Predict(m, v);
    ASSERT_GT(p, 0.0);
    ds.samples.push_back({v, p, "exact"});
  }
  EXPECT_EQ(EvaluateMape(m, ds).mape, 0.0);
  VrpDataset scaled = ds;
  for (auto& s : scaled.samples) s.label = *s.label / 1.1;
  EXPECT_NEAR(EvaluateMape(m, scaled).mape, 10.0, 1e-9);
  scaled.samples[0].label = 0.0;
  const MapeResult r = EvaluateMape(m, scaled);
  EXPECT_EQ(r.skipped_zero, 1);
  EXPECT_EQ(r.evaluated, 9);
}

}  // namespace
}  // namespace neolrp
