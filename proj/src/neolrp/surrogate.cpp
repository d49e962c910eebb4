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

#include "neolrp/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "neolrp/errors.hpp"

namespace neolrp {
namespace {

const char* ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "linear";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "linear") return Activation::kLinear;
  throw Error(ErrorCode::kParse, "unknown activation '" + name + "'");
}

nlohmann::json LayerToJson(const DenseLayer& layer) {
  std::vector<double> w;
  w.reserve(layer.weights.size());
  for (int r = 0; r < layer.rows(); ++r) {
    for (int c = 0; c < layer.cols(); ++c) w.push_back(layer.weights(r, c));
  }
  std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
  return {{"rows", layer.rows()},
          {"cols", layer.cols()},
          {"weights", w},
          {"bias", b},
          {"activation", ActivationName(layer.activation)}};
}

DenseLayer LayerFromJson(const nlohmann::json& j) {
  DenseLayer layer;
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (rows <= 0 || cols <= 0 || static_cast<int>(w.size()) != rows * cols ||
      static_cast<int>(b.size()) != rows) {
    throw Error(ErrorCode::kShape, "layer weight/bias sizes do not match rows x cols");
  }
  layer.weights.resize(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) layer.weights(r, c) = w[r * cols + c];
  }
  layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
  layer.activation = ParseActivation(j.at("activation").get<std::string>());
  return layer;
}

Eigen::VectorXd Apply(const DenseLayer& layer, const Eigen::VectorXd& in) {
  Eigen::VectorXd z = layer.weights * in + layer.bias;
  if (layer.activation == Activation::kRelu) z = z.cwiseMax(0.0);
  return z;
}

}  // namespace

void SurrogateModel::CheckShapes() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kShape, m); };
  if (latent_dim <= 0) fail("latent dimension must be positive");
  if (phi.empty()) fail("phi has no layers");
  if (rho.size() != 2) fail("rho must have exactly one hidden layer and one output");
  int width = 3;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (phi[k].cols() != width || phi[k].bias.size() != phi[k].rows()) {
      fail("phi layer " + std::to_string(k) + " has incompatible shape");
    }
    const bool last = k + 1 == phi.size();
    if (phi[k].activation != (last ? Activation::kLinear : Activation::kRelu)) {
      fail("phi hidden layers must be ReLU and its output linear");
    }
    width = phi[k].rows();
  }
  if (width != latent_dim) fail("phi output width differs from L");
  if (rho[0].cols() != latent_dim || rho[0].bias.size() != rho[0].rows() ||
      rho[1].cols() != rho[0].rows() || rho[1].rows() != 1 ||
      rho[1].bias.size() != 1) {
    fail("rho layers have incompatible shapes");
  }
  if (rho[0].activation != Activation::kRelu || rho[1].activation != Activation::kRelu) {
    fail("rho layers must be ReLU");
  }
}

Eigen::VectorXd SurrogateModel::PhiForward(const Feature& sigma) const {
  Eigen::VectorXd h(3);
  h << sigma[0], sigma[1], sigma[2];
  for (const DenseLayer& layer : phi) h = Apply(layer, h);
  return h;
}

double SurrogateModel::RhoForward(const Eigen::VectorXd& theta,
                                  std::vector<Eigen::VectorXd>* pre) const {
  if (theta.size() != latent_dim) {
    throw Error(ErrorCode::kShape, "rho input width " + std::to_string(theta.size()) +
                                       " differs from L=" + std::to_string(latent_dim));
  }
  Eigen::VectorXd h = theta;
  for (const DenseLayer& layer : rho) {
    Eigen::VectorXd z = layer.weights * h + layer.bias;
    if (pre) pre->push_back(z);
    h = layer.activation == Activation::kRelu ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return h(0);
}

nlohmann::json SurrogateModel::ToJson() const {
  nlohmann::json j;
  j["L"] = latent_dim;
  j["phi"] = nlohmann::json::array();
  for (const DenseLayer& l : phi) j["phi"].push_back(LayerToJson(l));
  j["rho"] = nlohmann::json::array();
  for (const DenseLayer& l : rho) j["rho"].push_back(LayerToJson(l));
  j["metadata"] = metadata;
  return j;
}

SurrogateModel SurrogateModel::FromJson(const nlohmann::json& j) {
  SurrogateModel m;
  try {
    m.latent_dim = j.at("L").get<int>();
    for (const auto& l : j.at("phi")) m.phi.push_back(LayerFromJson(l));
    for (const auto& l : j.at("rho")) m.rho.push_back(LayerFromJson(l));
    m.metadata = j.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
  m.CheckShapes();
  return m;
}

void SurrogateModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model " + path);
  out << ToJson().dump(1) << "\n";
}

SurrogateModel SurrogateModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, "model file " + path + ": " + e.what());
  }
  return FromJson(j);
}

double PredictNormalized(const SurrogateModel& model,
                         const std::vector<Feature>& sigma) {
  std::vector<Feature> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(model.latent_dim);
  for (const Feature& s : sorted) {
    const Eigen::VectorXd z = model.PhiForward(s);
    if (z.size() != model.latent_dim) {
      throw Error(ErrorCode::kShape, "phi output width differs from L");
    }
    theta += z;
  }
  return model.RhoForward(theta);
}

double PredictPadded(const SurrogateModel& model,
                     const std::vector<Feature>& padded,
                     const std::vector<bool>& mask) {
  if (mask.size() != padded.size()) {
    throw Error(ErrorCode::kShape, "mask length differs from feature count");
  }
  std::vector<Feature> active;
  for (std::size_t k = 0; k < padded.size(); ++k) {
    if (mask[k]) active.push_back(padded[k]);
  }
  return PredictNormalized(model, active);
}

double Predict(const SurrogateModel& model, const VrpInstance& vrp) {
  const NormalizedFeatures nf = NormalizeFeatures(vrp);
  return nf.scale * PredictNormalized(model, nf.sigma);
}

nlohmann::json Hyperparams::ToJson() const {
  return {{"latent_dim", latent_dim}, {"phi_depth", phi_depth},
          {"phi_width", phi_width},   {"rho_width", rho_width},
          {"patience", patience},     {"batch_size", batch_size},
          {"learning_rate", learning_rate}, {"epochs", epochs}};
}

Hyperparams Hyperparams::FromJson(const nlohmann::json& j) {
  Hyperparams h;
  h.latent_dim = j.value("latent_dim", h.latent_dim);
  h.phi_depth = j.value("phi_depth", h.phi_depth);
  h.phi_width = j.value("phi_width", h.phi_width);
  h.rho_width = j.value("rho_width", h.rho_width);
  h.patience = j.value("patience", h.patience);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.epochs = j.value("epochs", h.epochs);
  if (h.latent_dim <= 0 || h.phi_depth <= 0 || h.phi_width <= 0 || h.rho_width <= 0 ||
      h.patience <= 0 || h.batch_size <= 0 || h.epochs <= 0 || !(h.learning_rate > 0)) {
    throw Error(ErrorCode::kConfig, "hyperparameters must be positive");
  }
  return h;
}

void HyperparamSpace::Validate() const {
  const HyperparamSpace full;
  auto check = [](const std::vector<int>& chosen, const std::vector<int>& allowed,
                  const char* name) {
    if (chosen.empty()) {
      throw Error(ErrorCode::kConfig, std::string("empty choice set for ") + name);
    }
    for (int v : chosen) {
      if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
        throw Error(ErrorCode::kConfig, std::string(name) + " choice " +
                                            std::to_string(v) +
                                            " outside the allowed range");
      }
    }
  };
  check(latent_dim, full.latent_dim, "latent_dim");
  check(phi_depth, full.phi_depth, "phi_depth");
  check(phi_width, full.phi_width, "phi_width");
  check(rho_width, full.rho_width, "rho_width");
  check(patience, full.patience, "patience");
  check(epochs, full.epochs, "epochs");
}

Hyperparams HyperparamSpace::Sample(std::mt19937_64& rng) const {
  auto pick = [&rng](const std::vector<int>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  Hyperparams h;
  h.latent_dim = pick(latent_dim);
  h.phi_depth = pick(phi_depth);
  h.phi_width = pick(phi_width);
  h.rho_width = pick(rho_width);
  h.patience = pick(patience);
  h.epochs = pick(epochs);
  return h;
}

nlohmann::json HyperparamSpace::ToJson() const {
  return {{"latent_dim", latent_dim}, {"phi_depth", phi_depth},
          {"phi_width", phi_width},   {"rho_width", rho_width},
          {"patience", patience},     {"epochs", epochs}};
}

HyperparamSpace HyperparamSpace::FromJson(const nlohmann::json& j) {
  HyperparamSpace s;
  s.latent_dim = j.value("latent_dim", s.latent_dim);
  s.phi_depth = j.value("phi_depth", s.phi_depth);
  s.phi_width = j.value("phi_width", s.phi_width);
  s.rho_width = j.value("rho_width", s.rho_width);
  s.patience = j.value("patience", s.patience);
  s.epochs = j.value("epochs", s.epochs);
  s.Validate();
  return s;
}

namespace {

// Flat layer stack: the first `n_phi` layers are phi, the rest rho.
template <typename T>
struct Net {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  std::vector<Mat> w;
  std::vector<Vec> b;
  std::vector<bool> relu;
  int n_phi = 0;

  int size() const { return static_cast<int>(w.size()); }
};

template <typename T>
Net<T> ToNet(const SurrogateModel& m) {
  Net<T> net;
  auto add = [&net](const DenseLayer& l) {
    net.w.push_back(l.weights.cast<T>());
    net.b.push_back(l.bias.cast<T>());
    net.relu.push_back(l.activation == Activation::kRelu);
  };
  for (const DenseLayer& l : m.phi) add(l);
  for (const DenseLayer& l : m.rho) add(l);
  net.n_phi = static_cast<int>(m.phi.size());
  return net;
}

template <typename T>
void FromNet(const Net<T>& net, SurrogateModel& m) {
  for (int k = 0; k < net.size(); ++k) {
    DenseLayer& l = k < net.n_phi ? m.phi[k] : m.rho[k - net.n_phi];
    l.weights = net.w[k].template cast<double>();
    l.bias = net.b[k].template cast<double>();
  }
}

// Customers of all samples in a batch, stacked column-wise, with segment
// offsets. Sample s owns columns [offset[s], offset[s+1]).
template <typename T>
struct Packed {
  typename Net<T>::Mat x;
  std::vector<int> offset;
  typename Net<T>::Mat y;  // 1 x B
};

template <typename T>
Packed<T> Pack(const std::vector<const std::vector<Feature>*>& feats,
               const std::vector<double>& targets) {
  Packed<T> p;
  int total = 0;
  p.offset.push_back(0);
  for (const auto* f : feats) {
    total += static_cast<int>(f->size());
    p.offset.push_back(total);
  }
  p.x.resize(3, total);
  int col = 0;
  for (const auto* f : feats) {
    for (const Feature& s : *f) {
      for (int r = 0; r < 3; ++r) p.x(r, col) = static_cast<T>(s[r]);
      ++col;
    }
  }
  p.y.resize(1, static_cast<int>(targets.size()));
  for (std::size_t s = 0; s < targets.size(); ++s) p.y(0, s) = static_cast<T>(targets[s]);
  return p;
}

template <typename T>
struct Tape {
  std::vector<typename Net<T>::Mat> z;  // Pre-activations.
  std::vector<typename Net<T>::Mat> h;  // h[0] is the input, h[k+1] the output of layer k.
};

template <typename T>
typename Net<T>::Mat Forward(const Net<T>& net, const Packed<T>& p, Tape<T>* tape) {
  using Mat = typename Net<T>::Mat;
  Mat h = p.x;
  if (tape) tape->h.push_back(h);
  for (int k = 0; k < net.size(); ++k) {
    if (k == net.n_phi) {
      const int batch = static_cast<int>(p.offset.size()) - 1;
      Mat agg = Mat::Zero(h.rows(), batch);
      for (int s = 0; s < batch; ++s) {
        const int len = p.offset[s + 1] - p.offset[s];
        if (len > 0) agg.col(s) = h.middleCols(p.offset[s], len).rowwise().sum();
      }
      h = std::move(agg);
      if (tape) tape->h.push_back(h);
    }
    Mat z = (net.w[k] * h).colwise() + net.b[k];
    h = net.relu[k] ? Mat(z.cwiseMax(T(0))) : z;
    if (tape) {
      tape->z.push_back(std::move(z));
      tape->h.push_back(h);
    }
  }
  return h;
}

// Tape layout: h[0] input, then for phi layers h[k+1]; after phi an extra
// aggregated entry, so rho layer k reads h[k+1] and writes h[k+2].
template <typename T>
int InputSlot(const Net<T>& net, int k) {
  return k < net.n_phi ? k : k + 1;
}

template <typename T>
T Backward(const Net<T>& net, const Packed<T>& p, std::vector<typename Net<T>::Mat>* gw,
           std::vector<typename Net<T>::Vec>* gb) {
  using Mat = typename Net<T>::Mat;
  Tape<T> tape;
  const Mat out = Forward(net, p, &tape);
  const int batch = static_cast<int>(out.cols());
  const Mat diff = out - p.y;
  const T loss = diff.squaredNorm() / T(batch);
  gw->resize(net.size());
  gb->resize(net.size());
  Mat grad = diff * (T(2) / T(batch));
  for (int k = net.size() - 1; k >= 0; --k) {
    if (net.relu[k]) {
      grad = grad.cwiseProduct((tape.z[k].array() > T(0)).template cast<T>().matrix());
    }
    const Mat& in = tape.h[InputSlot(net, k)];
    (*gw)[k] = grad * in.transpose();
    (*gb)[k] = grad.rowwise().sum();
    if (k == 0) break;
    Mat gin = net.w[k].transpose() * grad;
    if (k == net.n_phi) {
      Mat spread(gin.rows(), p.x.cols());
      for (int s = 0; s < batch; ++s) {
        for (int c = p.offset[s]; c < p.offset[s + 1]; ++c) spread.col(c) = gin.col(s);
      }
      gin = std::move(spread);
    }
    grad = std::move(gin);
  }
  return loss;
}

struct Prepared {
  std::vector<std::vector<Feature>> features;
  std::vector<double> targets;  // cost / P
};

Prepared Prepare(const VrpDataset& ds) {
  if (ds.samples.empty()) throw Error(ErrorCode::kTraining, "empty training dataset");
  Prepared p;
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    const VrpSample& s = ds.samples[k];
    if (!s.label) {
      throw Error(ErrorCode::kTraining, "sample " + std::to_string(k) + " is unlabeled");
    }
    if (s.vrp.customers.empty()) {
      throw Error(ErrorCode::kTraining, "sample " + std::to_string(k) + " has no customers");
    }
    NormalizedFeatures nf = NormalizeFeatures(s.vrp);
    p.features.push_back(std::move(nf.sigma));
    p.targets.push_back(*s.label / nf.scale);
  }
  return p;
}

struct Split {
  std::vector<int> train;
  std::vector<int> val;
};

Split MakeSplit(int n, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Split s;
  if (n < 2) {
    s.train = idx;
    s.val = idx;
    return s;
  }
  const int n_val = std::max(1, static_cast<int>(std::lround(0.1 * n)));
  s.val.assign(idx.begin(), idx.begin() + n_val);
  s.train.assign(idx.begin() + n_val, idx.end());
  return s;
}

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
Packed<T> PackIndices(const Prepared& data, const std::vector<int>& idx, std::size_t begin,
                      std::size_t end) {
  std::vector<const std::vector<Feature>*> f;
  std::vector<double> t;
  for (std::size_t k = begin; k < end; ++k) {
    f.push_back(&data.features[idx[k]]);
    t.push_back(data.targets[idx[k]]);
  }
  return Pack<T>(f, t);
}

TrainResult TrainOnSplit(const Prepared& data, const Split& split, const Hyperparams& hp,
                         std::uint64_t seed) {
  using Net32 = Net<float>;
  SurrogateModel model = InitModel(hp, seed);
  double mean_target = 0.0;
  for (int k : split.train) mean_target += data.targets[k];
  mean_target /= static_cast<double>(split.train.size());
  model.rho.back().bias(0) = static_cast<float>(mean_target);

  Net32 net = ToNet<float>(model);
  Net32 best = net;
  std::vector<Net32::Mat> m_w, v_w, g_w;
  std::vector<Net32::Vec> m_b, v_b, g_b;
  for (int k = 0; k < net.size(); ++k) {
    m_w.push_back(Net32::Mat::Zero(net.w[k].rows(), net.w[k].cols()));
    v_w.push_back(m_w.back());
    m_b.push_back(Net32::Vec::Zero(net.b[k].size()));
    v_b.push_back(m_b.back());
  }
  const float lr = static_cast<float>(hp.learning_rate);
  const float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-7f;
  float beta1_t = 1.0f, beta2_t = 1.0f;

  const Packed<float> val = PackIndices<float>(data, split.val, 0, split.val.size());
  std::mt19937_64 rng(Mix(seed));
  std::vector<int> order = split.train;

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      const Packed<float> batch = PackIndices<float>(data, order, start, end);
      const float loss = Backward(net, batch, &g_w, &g_b);
      loss_sum += static_cast<double>(loss) * static_cast<double>(end - start);
      beta1_t *= beta1;
      beta2_t *= beta2;
      const float a = lr * std::sqrt(1.0f - beta2_t) / (1.0f - beta1_t);
      const float eps_hat = eps * std::sqrt(1.0f - beta2_t);
      for (int k = 0; k < net.size(); ++k) {
        m_w[k] = beta1 * m_w[k] + (1 - beta1) * g_w[k];
        v_w[k] = beta2 * v_w[k] + (1 - beta2) * g_w[k].cwiseAbs2();
        net.w[k].array() -= a * m_w[k].array() / (v_w[k].array().sqrt() + eps_hat);
        m_b[k] = beta1 * m_b[k] + (1 - beta1) * g_b[k];
        v_b[k] = beta2 * v_b[k] + (1 - beta2) * g_b[k].cwiseAbs2();
        net.b[k].array() -= a * m_b[k].array() / (v_b[k].array().sqrt() + eps_hat);
      }
    }
    const Net32::Mat out = Forward(net, val, static_cast<Tape<float>*>(nullptr));
    const double val_mse =
        static_cast<double>((out - val.y).squaredNorm()) / static_cast<double>(out.cols());
    result.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    result.val_loss.push_back(val_mse);
    if (val_mse < best_val) {
      best_val = val_mse;
      best = net;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      result.best_val_curve.push_back(best_val);
      break;
    }
    result.best_val_curve.push_back(best_val);
    if (!std::isfinite(val_mse)) {
      throw Error(ErrorCode::kTraining, "training diverged (non-finite loss)");
    }
  }
  FromNet(best, model);
  result.best_val_mse = best_val;
  model.metadata = {{"seed", seed},
                    {"hyperparams", hp.ToJson()},
                    {"target", "cost/P"},
                    {"n_train", split.train.size()},
                    {"n_val", split.val.size()},
                    {"epochs_run", result.val_loss.size()},
                    {"best_epoch", result.best_epoch},
                    {"best_val_mse", best_val},
                    {"train_loss", result.train_loss},
                    {"val_loss", result.val_loss}};
  result.model = std::move(model);
  return result;
}

}  // namespace

SurrogateModel InitModel(const Hyperparams& hp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto layer = [&rng](int in, int out, Activation act) {
    DenseLayer l;
    const double limit = std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> u(-limit, limit);
    l.weights.resize(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) {
        l.weights(r, c) = static_cast<double>(static_cast<float>(u(rng)));
      }
    }
    l.bias = Eigen::VectorXd::Zero(out);
    l.activation = act;
    return l;
  };
  SurrogateModel m;
  m.latent_dim = hp.latent_dim;
  int width = 3;
  for (int k = 0; k < hp.phi_depth; ++k) {
    m.phi.push_back(layer(width, hp.phi_width, Activation::kRelu));
    width = hp.phi_width;
  }
  m.phi.push_back(layer(width, hp.latent_dim, Activation::kLinear));
  m.rho.push_back(layer(hp.latent_dim, hp.rho_width, Activation::kRelu));
  m.rho.push_back(layer(hp.rho_width, 1, Activation::kRelu));
  return m;
}

TrainResult Train(const VrpDataset& ds, const Hyperparams& hp, std::uint64_t seed) {
  const Prepared data = Prepare(ds);
  const Split split = MakeSplit(static_cast<int>(data.targets.size()), seed);
  return TrainOnSplit(data, split, hp, Mix(seed ^ 0x5eedULL));
}

SearchResult HyperparamSearch(const VrpDataset& ds, int n_trials,
                              const HyperparamSpace& space, std::uint64_t seed) {
  if (n_trials < 1) throw Error(ErrorCode::kConfig, "n_trials must be >= 1");
  space.Validate();
  const Prepared data = Prepare(ds);
  const Split split = MakeSplit(static_cast<int>(data.targets.size()), seed);
  std::mt19937_64 rng(seed);
  SearchResult out;
  for (int t = 0; t < n_trials; ++t) {
    const Hyperparams hp = space.Sample(rng);
    const std::uint64_t trial_seed = rng();
    TrainResult r = TrainOnSplit(data, split, hp, trial_seed);
    out.trials.push_back({{"trial", t},
                          {"seed", trial_seed},
                          {"hyperparams", hp.ToJson()},
                          {"best_val_mse", r.best_val_mse},
                          {"best_epoch", r.best_epoch},
                          {"epochs_run", r.val_loss.size()}});
    if (t == 0 || r.best_val_mse < out.best.best_val_mse) {
      out.best = std::move(r);
      out.best_trial = t;
    }
  }
  out.best.model.metadata["search"] = {{"n_trials", n_trials},
                                       {"seed", seed},
                                       {"best_trial", out.best_trial},
                                       {"space", space.ToJson()}};
  return out;
}

MapeResult EvaluateMape(const SurrogateModel& model, const VrpDataset& ds) {
  MapeResult r;
  double sum = 0.0;
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    const VrpSample& s = ds.samples[k];
    if (!s.label) {
      throw Error(ErrorCode::kMetric, "sample " + std::to_string(k) + " is unlabeled");
    }
    if (*s.label == 0.0) {
      ++r.skipped_zero;
      continue;
    }
    sum += std::abs(*s.label - Predict(model, s.vrp)) / std::abs(*s.label);
    ++r.evaluated;
  }
  r.mape = r.evaluated > 0 ? 100.0 * sum / r.evaluated : 0.0;
  return r;
}

NormalizedBatch MakeBatch(const VrpDataset& ds) {
  Prepared p = Prepare(ds);
  return {std::move(p.features), std::move(p.targets)};
}

double LossAndGradient(const SurrogateModel& model, const NormalizedBatch& batch,
                       std::vector<double>* gradient) {
  model.CheckShapes();
  const Net<double> net = ToNet<double>(model);
  std::vector<const std::vector<Feature>*> f;
  for (const auto& v : batch.features) f.push_back(&v);
  const Packed<double> p = Pack<double>(f, batch.targets);
  std::vector<Net<double>::Mat> gw;
  std::vector<Net<double>::Vec> gb;
  const double loss = Backward(net, p, &gw, &gb);
  if (gradient) {
    gradient->clear();
    for (int k = 0; k < net.size(); ++k) {
      for (int r = 0; r < gw[k].rows(); ++r) {
        for (int c = 0; c < gw[k].cols(); ++c) gradient->push_back(gw[k](r, c));
      }
      for (int r = 0; r < gb[k].size(); ++r) gradient->push_back(gb[k](r));
    }
  }
  return loss;
}

std::vector<double> FlattenParameters(const SurrogateModel& model) {
  std::vector<double> out;
  auto add = [&out](const DenseLayer& l) {
    for (int r = 0; r < l.rows(); ++r) {
      for (int c = 0; c < l.cols(); ++c) out.push_back(l.weights(r, c));
    }
    for (int r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  };
  for (const DenseLayer& l : model.phi) add(l);
  for (const DenseLayer& l : model.rho) add(l);
  return out;
}

void SetParameters(SurrogateModel& model, const std::vector<double>& params) {
  std::size_t pos = 0;
  auto set = [&](DenseLayer& l) {
    for (int r = 0; r < l.rows(); ++r) {
      for (int c = 0; c < l.cols(); ++c) l.weights(r, c) = params.at(pos++);
    }
    for (int r = 0; r < l.bias.size(); ++r) l.bias(r) = params.at(pos++);
  };
  for (DenseLayer& l : model.phi) set(l);
  for (DenseLayer& l : model.rho) set(l);
  if (pos != params.size()) throw Error(ErrorCode::kShape, "parameter vector length mismatch");
}

}  // namespace neolrp
