// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/nnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"

namespace fndstack::nnet {

namespace {

constexpr double kProbFloor = 1e-15;

std::string_view kind_name(LayerSpec::Kind k) {
  switch (k) {
    case LayerSpec::Kind::Dense: return "dense";
    case LayerSpec::Kind::Dropout: return "dropout";
    case LayerSpec::Kind::Output: return "output";
  }
  return "?";
}

template <typename T>
void check_blocks(std::span<const Mat<T>> inputs, std::size_t expected) {
  if (inputs.size() != expected)
    throw Error(ErrorCode::DimMismatch, "expected " + std::to_string(expected) + " input blocks, got " +
                                            std::to_string(inputs.size()));
}

}  // namespace

// ---- layer specs -----------------------------------------------------------

NetSpecBuilder& NetSpecBuilder::dense(std::size_t units, Activation act) {
  layers_.push_back(LayerSpec::dense(width_, units, act));
  width_ = units;
  return *this;
}

NetSpecBuilder& NetSpecBuilder::dropout(double rate) {
  layers_.push_back(LayerSpec::dropout(rate));
  return *this;
}

NetSpecBuilder& NetSpecBuilder::output(std::size_t units, Squash squash) {
  layers_.push_back(LayerSpec::output(width_, units, squash));
  width_ = units;
  return *this;
}

void validate_layers(const std::vector<LayerSpec>& layers) {
  if (layers.empty()) throw Error(ErrorCode::InvalidArgument, "network has no layers");
  std::optional<std::size_t> width;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layer " + std::to_string(i) + ": ";
    if (l.kind == LayerSpec::Kind::Dropout) {
      if (!(l.rate >= 0.0 && l.rate < 1.0))
        throw Error(ErrorCode::InvalidArgument, where + "dropout rate must be in [0, 1)");
      continue;
    }
    if (l.in_dim == 0 || l.out_dim == 0) throw Error(ErrorCode::InvalidArgument, where + "zero width");
    if (width && *width != l.in_dim)
      throw Error(ErrorCode::InvalidArgument, where + "expects width " + std::to_string(l.in_dim) +
                                                  ", previous layer emits " + std::to_string(*width));
    if (l.kind == LayerSpec::Kind::Output && i + 1 != layers.size())
      throw Error(ErrorCode::InvalidArgument, where + "output layer must be last");
    width = l.out_dim;
  }
  if (!width) throw Error(ErrorCode::InvalidArgument, "network has no parametrised layer");
}

nlohmann::json layers_to_json(const std::vector<LayerSpec>& layers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : layers) {
    nlohmann::json j{{"kind", kind_name(l.kind)}};
    switch (l.kind) {
      case LayerSpec::Kind::Dense:
        j["in"] = l.in_dim;
        j["out"] = l.out_dim;
        j["activation"] = l.activation == Activation::ReLU ? "relu" : "none";
        break;
      case LayerSpec::Kind::Dropout:
        j["rate"] = l.rate;
        break;
      case LayerSpec::Kind::Output:
        j["in"] = l.in_dim;
        j["units"] = l.out_dim;
        j["squash"] = l.squash == Squash::Softmax ? "softmax" : "sigmoid";
        break;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<LayerSpec> layers_from_json(const nlohmann::json& j) {
  std::vector<LayerSpec> out;
  try {
    for (const auto& e : j) {
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "dense") {
        const auto act = e.at("activation").get<std::string>();
        if (act != "relu" && act != "none") throw Error(ErrorCode::InvalidArgument, "activation " + act);
        out.push_back(LayerSpec::dense(e.at("in").get<std::size_t>(), e.at("out").get<std::size_t>(),
                                       act == "relu" ? Activation::ReLU : Activation::None));
      } else if (kind == "dropout") {
        out.push_back(LayerSpec::dropout(e.at("rate").get<double>()));
      } else if (kind == "output") {
        const auto sq = e.at("squash").get<std::string>();
        if (sq != "softmax" && sq != "sigmoid") throw Error(ErrorCode::InvalidArgument, "squash " + sq);
        out.push_back(LayerSpec::output(e.at("in").get<std::size_t>(), e.at("units").get<std::size_t>(),
                                        sq == "softmax" ? Squash::Softmax : Squash::Sigmoid));
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown layer kind " + kind);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad layer list: ") + e.what());
  }
  validate_layers(out);
  return out;
}

// ---- squashing and loss -----------------------------------------------------

template <typename T>
Mat<T> softmax_rows(const Mat<T>& logits) {
  Mat<T> out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const T m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <typename T>
Mat<T> sigmoid(const Mat<T>& logits) {
  return logits.unaryExpr([](T z) {
    return z >= T(0) ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
  });
}

template <typename T>
LossAndGradient<T> cross_entropy(const Mat<T>& logits, std::span<const int> labels, Squash squash) {
  const auto rows = static_cast<std::size_t>(logits.rows());
  if (rows != labels.size())
    throw Error(ErrorCode::DimMismatch, std::to_string(rows) + " rows vs " +
                                            std::to_string(labels.size()) + " labels");
  if (rows == 0) throw Error(ErrorCode::EmptyData, "cross-entropy over an empty batch");
  const auto k = logits.cols();
  const double inv_b = 1.0 / static_cast<double>(rows);

  LossAndGradient<T> out;
  out.d_logits = Mat<T>::Zero(logits.rows(), k);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const int t = labels[r];
    if (t < 0 || t >= k) throw Error(ErrorCode::InvalidArgument, "label out of range");
    const auto ri = static_cast<Eigen::Index>(r);
    if (squash == Squash::Softmax) {
      double m = -std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) m = std::max(m, static_cast<double>(logits(ri, c)));
      double sum = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) sum += std::exp(static_cast<double>(logits(ri, c)) - m);
      const double lse = m + std::log(sum);
      total += lse - static_cast<double>(logits(ri, t));
      for (Eigen::Index c = 0; c < k; ++c) {
        const double p = std::exp(static_cast<double>(logits(ri, c)) - lse);
        out.d_logits(ri, c) = static_cast<T>((p - (c == t ? 1.0 : 0.0)) * inv_b);
      }
    } else {
      // Independent sigmoids renormalised to a distribution, which is what a
      // sigmoid output trained with categorical cross-entropy computes:
      // p_c = s_c / S, loss = -log s_t + log S.
      auto log_sig = [](double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); };
      double m = -std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) m = std::max(m, log_sig(static_cast<double>(logits(ri, c))));
      double sum = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) sum += std::exp(log_sig(static_cast<double>(logits(ri, c))) - m);
      const double log_s = m + std::log(sum);
      total += log_s - log_sig(static_cast<double>(logits(ri, t)));
      const double S = std::exp(log_s);
      for (Eigen::Index c = 0; c < k; ++c) {
        const double sc = std::exp(log_sig(static_cast<double>(logits(ri, c))));
        double g = sc * (1.0 - sc) / S;
        if (c == t) g -= 1.0 - sc;
        out.d_logits(ri, c) = static_cast<T>(g * inv_b);
      }
    }
  }
  out.loss = total * inv_b;
  return out;
}

// ---- network ------------------------------------------------------------------

template <typename T>
BasicDenseNet<T>::BasicDenseNet(std::vector<LayerSpec> layers, std::uint64_t seed)
    : layers_(std::move(layers)), seed_(seed) {
  validate_layers(layers_);
  param_of_layer_.assign(layers_.size(), -1);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (!l.has_parameters()) continue;
    param_of_layer_[i] = static_cast<int>(params_.size());
    DenseParams<T> p;
    p.weight.resize(static_cast<Eigen::Index>(l.in_dim), static_cast<Eigen::Index>(l.out_dim));
    p.bias = Mat<T>::Zero(1, static_cast<Eigen::Index>(l.out_dim));
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in_dim + l.out_dim));
    Rng rng(mix_seed(seed, i));
    for (Eigen::Index r = 0; r < p.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < p.weight.cols(); ++c)
        p.weight(r, c) = static_cast<T>(rng.uniform(-limit, limit));
    params_.push_back(std::move(p));
  }
}

template <typename T>
std::size_t BasicDenseNet<T>::input_dim() const {
  for (const auto& l : layers_)
    if (l.has_parameters()) return l.in_dim;
  return 0;
}

template <typename T>
std::size_t BasicDenseNet<T>::output_dim() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
    if (it->has_parameters()) return it->out_dim;
  return 0;
}

template <typename T>
bool BasicDenseNet<T>::has_output_layer() const {
  return !layers_.empty() && layers_.back().kind == LayerSpec::Kind::Output;
}

template <typename T>
Squash BasicDenseNet<T>::squash() const {
  if (!has_output_layer()) throw Error(ErrorCode::InvalidArgument, "network has no output layer");
  return layers_.back().squash;
}

template <typename T>
std::uint64_t BasicDenseNet<T>::parameter_count() const {
  std::uint64_t n = 0;
  for (const auto& l : layers_) n += l.parameter_count();
  return n;
}

template <typename T>
std::vector<Mat<T>*> BasicDenseNet<T>::parameter_tensors() {
  std::vector<Mat<T>*> out;
  for (auto& p : params_) {
    out.push_back(&p.weight);
    out.push_back(&p.bias);
  }
  return out;
}

template <typename T>
void BasicDenseNet<T>::zero_parameters() {
  for (auto& p : params_) {
    p.weight.setZero();
    p.bias.setZero();
  }
}

template <typename T>
Gradients<T> BasicDenseNet<T>::zero_gradients() const {
  Gradients<T> g(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    g[i].weight = Mat<T>::Zero(params_[i].weight.rows(), params_[i].weight.cols());
    g[i].bias = Mat<T>::Zero(1, params_[i].bias.cols());
  }
  return g;
}

template <typename T>
Mat<T> BasicDenseNet<T>::forward(const Mat<T>& x, std::uint64_t mask_seed, Cache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim())
    throw Error(ErrorCode::DimMismatch, "input has " + std::to_string(x.cols()) +
                                            " columns, network expects " + std::to_string(input_dim()));
  if (cache) {
    cache->activations.clear();
    cache->masks.assign(layers_.size(), Mat<T>());
    cache->logits.resize(0, 0);
  }
  Mat<T> a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (cache) cache->activations.push_back(a);
    switch (l.kind) {
      case LayerSpec::Kind::Dense: {
        const auto& p = params_[static_cast<std::size_t>(param_of_layer_[i])];
        Mat<T> z = a * p.weight;
        z.rowwise() += p.bias.row(0);
        if (l.activation == Activation::ReLU) z = z.cwiseMax(T(0));
        a = std::move(z);
        break;
      }
      case LayerSpec::Kind::Dropout: {
        if (mode_ != Mode::Train || l.rate == 0.0) break;
        Rng rng(mix_seed(mask_seed, i));
        const T keep_scale = static_cast<T>(1.0 / (1.0 - l.rate));
        Mat<T> mask(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < mask.rows(); ++r)
          for (Eigen::Index c = 0; c < mask.cols(); ++c)
            mask(r, c) = rng.uniform() >= l.rate ? keep_scale : T(0);
        a = a.cwiseProduct(mask);
        if (cache) cache->masks[i] = std::move(mask);
        break;
      }
      case LayerSpec::Kind::Output: {
        const auto& p = params_[static_cast<std::size_t>(param_of_layer_[i])];
        Mat<T> z = a * p.weight;
        z.rowwise() += p.bias.row(0);
        if (l.squash == Squash::Softmax) {
          a = softmax_rows<T>(z);
        } else {
          a = sigmoid<T>(z);
          for (Eigen::Index r = 0; r < a.rows(); ++r) a.row(r) /= a.row(r).sum();
        }
        if (cache) cache->logits = std::move(z);
        break;
      }
    }
  }
  if (cache) cache->activations.push_back(a);
  return a;
}

template <typename T>
Mat<T> BasicDenseNet<T>::backward(const Cache& cache, const Mat<T>& d_top, Gradients<T>& grads) const {
  if (cache.activations.size() != layers_.size() + 1)
    throw Error(ErrorCode::InvalidArgument, "cache does not belong to this network");
  bool shapes_ok = grads.size() == params_.size();
  for (std::size_t i = 0; shapes_ok && i < params_.size(); ++i)
    shapes_ok = grads[i].weight.rows() == params_[i].weight.rows() &&
                grads[i].weight.cols() == params_[i].weight.cols();
  if (!shapes_ok) grads = zero_gradients();

  Mat<T> d = d_top;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    if (l.kind == LayerSpec::Kind::Dropout) {
      if (cache.masks[i].size() != 0) d = d.cwiseProduct(cache.masks[i]);
      continue;
    }
    if (l.kind == LayerSpec::Kind::Dense && l.activation == Activation::ReLU) {
      const Mat<T>& out = cache.activations[i + 1];
      d = d.cwiseProduct(out.unaryExpr([](T v) { return v > T(0) ? T(1) : T(0); }));
    }
    const auto pi = static_cast<std::size_t>(param_of_layer_[i]);
    grads[pi].weight.noalias() += cache.activations[i].transpose() * d;
    grads[pi].bias += d.colwise().sum();
    d = (d * params_[pi].weight.transpose()).eval();
  }
  return d;
}

template <typename T>
template <typename U>
BasicDenseNet<U> BasicDenseNet<T>::cast() const {
  BasicDenseNet<U> out;
  out.layers_ = layers_;
  out.param_of_layer_ = param_of_layer_;
  out.seed_ = seed_;
  out.mode_ = mode_;
  for (const auto& p : params_) out.params_.push_back({p.weight.template cast<U>(), p.bias.template cast<U>()});
  return out;
}

template <typename T>
NetLossAndGrad<T> loss_and_grad(const BasicDenseNet<T>& net, const Mat<T>& batch,
                                const Mat<T>& onehot_targets, std::uint64_t mask_seed) {
  if (!net.has_output_layer()) throw Error(ErrorCode::InvalidArgument, "network has no output layer");
  if (onehot_targets.rows() != batch.rows() ||
      static_cast<std::size_t>(onehot_targets.cols()) != net.output_dim())
    throw Error(ErrorCode::DimMismatch, "targets do not match batch rows and output width");
  std::vector<int> labels(static_cast<std::size_t>(batch.rows()));
  for (Eigen::Index r = 0; r < onehot_targets.rows(); ++r) {
    int hot = -1;
    for (Eigen::Index c = 0; c < onehot_targets.cols(); ++c) {
      const T v = onehot_targets(r, c);
      if (v == T(1) && hot < 0) {
        hot = static_cast<int>(c);
      } else if (v != T(0)) {
        throw Error(ErrorCode::NonOneHotTarget, "row " + std::to_string(r));
      }
    }
    if (hot < 0) throw Error(ErrorCode::NonOneHotTarget, "row " + std::to_string(r) + " has no hot entry");
    labels[static_cast<std::size_t>(r)] = hot;
  }
  typename BasicDenseNet<T>::Cache cache;
  net.forward(batch, mask_seed, &cache);
  auto ce = cross_entropy<T>(cache.logits, labels, net.squash());
  NetLossAndGrad<T> out;
  out.loss = ce.loss;
  out.grads = net.zero_gradients();
  out.d_input = net.backward(cache, ce.d_logits, out.grads);
  return out;
}

// ---- optimisation --------------------------------------------------------------

template <typename T>
Adam<T>::Adam(AdamConfig cfg, const std::vector<Mat<T>*>& params) : cfg_(cfg) {
  for (const auto* p : params) {
    m_.push_back(Mat<T>::Zero(p->rows(), p->cols()));
    v_.push_back(Mat<T>::Zero(p->rows(), p->cols()));
  }
}

template <typename T>
void Adam<T>::step(const std::vector<Mat<T>*>& params, const std::vector<const Mat<T>*>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw Error(ErrorCode::InvalidArgument, "optimizer state does not match parameters");
  ++t_;
  const double t = static_cast<double>(t_);
  const T b1 = static_cast<T>(cfg_.beta1), b2 = static_cast<T>(cfg_.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta2, t)));
  const T lr = static_cast<T>(cfg_.lr), eps = static_cast<T>(cfg_.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& g = grads[i]->array();
    m_[i].array() = b1 * m_[i].array() + (T(1) - b1) * g;
    v_[i].array() = b2 * v_[i].array() + (T(1) - b2) * g.square();
    params[i]->array() -= lr * (m_[i].array() * c1) / ((v_[i].array() * c2).sqrt() + eps);
  }
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.adam.lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (!(cfg.adam.beta1 >= 0.0 && cfg.adam.beta1 < 1.0) || !(cfg.adam.beta2 >= 0.0 && cfg.adam.beta2 < 1.0))
    throw Error(ErrorCode::InvalidArgument, "Adam betas must lie in [0, 1)");
  if (!(cfg.adam.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "Adam eps must be positive");
  if (cfg.batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (cfg.epochs == 0) throw Error(ErrorCode::InvalidArgument, "epochs must be positive");
  if (cfg.early_stopping && cfg.early_stopping->patience == 0)
    throw Error(ErrorCode::InvalidArgument, "early-stopping patience must be positive");
}

nlohmann::json to_json(const TrainConfig& cfg) {
  nlohmann::json j{{"optimizer", {{"name", "adam"},
                                  {"lr", cfg.adam.lr},
                                  {"beta1", cfg.adam.beta1},
                                  {"beta2", cfg.adam.beta2},
                                  {"eps", cfg.adam.eps}}},
                   {"loss", "categorical_cross_entropy"},
                   {"batch_size", cfg.batch_size},
                   {"epochs", cfg.epochs},
                   {"seed", cfg.seed}};
  j["early_stopping_patience"] = cfg.early_stopping ? nlohmann::json(cfg.early_stopping->patience) : nlohmann::json();
  return j;
}

template <typename T>
Dataset<T> Dataset<T>::rows(std::span<const std::size_t> idx) const {
  Dataset<T> out;
  for (const auto& block : inputs) {
    Mat<T> m(static_cast<Eigen::Index>(idx.size()), block.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = block.row(static_cast<Eigen::Index>(idx[r]));
    out.inputs.push_back(std::move(m));
  }
  out.labels.reserve(idx.size());
  for (auto i : idx) out.labels.push_back(labels[i]);
  return out;
}

template <typename T>
Mat<T> one_hot(std::span<const int> labels, std::size_t classes) {
  Mat<T> m = Mat<T>::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(classes));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= classes)
      throw Error(ErrorCode::InvalidArgument, "label out of range");
    m(static_cast<Eigen::Index>(r), labels[r]) = T(1);
  }
  return m;
}

template <typename T>
Mat<T> NetObjective<T>::probabilities(std::span<const Mat<T>> inputs) const {
  check_blocks(inputs, 1);
  return net_.forward(inputs[0]);
}

template <typename T>
double NetObjective<T>::loss_and_grad(std::span<const Mat<T>> inputs, std::span<const int> labels,
                                      std::uint64_t mask_seed, std::vector<Mat<T>>& grads) {
  check_blocks(inputs, 1);
  typename BasicDenseNet<T>::Cache cache;
  net_.forward(inputs[0], mask_seed, &cache);
  auto ce = cross_entropy<T>(cache.logits, labels, net_.squash());
  Gradients<T> g = net_.zero_gradients();
  net_.backward(cache, ce.d_logits, g);
  grads.clear();
  for (auto& p : g) {
    grads.push_back(std::move(p.weight));
    grads.push_back(std::move(p.bias));
  }
  return ce.loss;
}

template <typename T>
Evaluation evaluate(Trainable<T>& model, const Dataset<T>& data) {
  if (data.size() == 0) throw Error(ErrorCode::EmptyData, "evaluation set is empty");
  model.set_mode(Mode::Eval);
  const Mat<T> probs = model.probabilities(data.inputs);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double p = probs(ri, data.labels[r]);
    loss -= std::log(std::max(p, kProbFloor));
    if (std::isnan(p)) loss = std::numeric_limits<double>::quiet_NaN();
    if (static_cast<int>(predicted_class(probs.row(ri))) == data.labels[r]) ++correct;
  }
  const double n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

template <typename T>
TrainResult train(Trainable<T>& model, const Dataset<T>& train_data, const Dataset<T>* val_data,
                  const TrainConfig& cfg) {
  validate(cfg);
  const std::size_t n = train_data.size();
  if (n == 0) throw Error(ErrorCode::EmptyData, "training set is empty");
  for (const auto& block : train_data.inputs)
    if (static_cast<std::size_t>(block.rows()) != n)
      throw Error(ErrorCode::DimMismatch, "input block rows differ from label count");
  if (cfg.early_stopping && (!val_data || val_data->size() == 0))
    throw Error(ErrorCode::InvalidArgument, "early stopping needs validation data");

  const auto params = model.parameter_tensors();
  Adam<T> optimizer(cfg.adam, params);
  std::vector<Mat<T>> grads;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  const std::uint64_t mask_base = derive_seed(cfg.seed, "dropout");
  std::uint64_t step = 0;

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Mat<T>> best_params;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.set_mode(Mode::Train);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[shuffle_rng.below(i + 1)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const auto batch = train_data.rows(std::span(order).subspan(start, end - start));
      const double loss = model.loss_and_grad(batch.inputs, batch.labels, mix_seed(mask_base, step++), grads);
      loss_sum += loss * static_cast<double>(end - start);
      std::vector<const Mat<T>*> grad_ptrs;
      for (const auto& g : grads) grad_ptrs.push_back(&g);
      optimizer.step(params, grad_ptrs);
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = evaluate(model, train_data).accuracy;
    if (val_data && val_data->size() > 0) {
      const auto v = evaluate(model, *val_data);
      stats.val_loss = v.loss;
      stats.val_accuracy = v.accuracy;
    }
    result.history.push_back(stats);
    result.best_epoch = epoch;

    if (cfg.early_stopping) {
      if (*stats.val_loss < best_val) {
        best_val = *stats.val_loss;
        best_params.clear();
        for (const auto* p : params) best_params.push_back(*p);
        since_best = 0;
      } else if (++since_best >= cfg.early_stopping->patience) {
        result.stopped_early = true;
        break;
      }
    }
  }

  if (cfg.early_stopping && !best_params.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best_params[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < result.history.size(); ++e) {
      if (*result.history[e].val_loss < best) {
        best = *result.history[e].val_loss;
        result.best_epoch = e;
      }
    }
  }
  model.set_mode(Mode::Eval);
  return result;
}

template <typename T>
LrSweepResult lr_sweep(const std::vector<LayerSpec>& layers, std::uint64_t init_seed,
                       const Dataset<T>& train_data, const Dataset<T>& val_data,
                       std::span<const double> candidates, TrainConfig cfg) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no learning rates to sweep");
  LrSweepResult out;
  double best_loss = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (double lr : candidates) {
    BasicDenseNet<T> net(layers, init_seed);
    cfg.adam.lr = lr;
    train(net, train_data, &val_data, cfg);
    NetObjective<T> objective(net);
    double loss = evaluate(objective, val_data).loss;
    if (!std::isfinite(loss)) loss = std::numeric_limits<double>::infinity();
    out.candidates.push_back(lr);
    out.final_val_loss.push_back(loss);
    if (!have_best || loss < best_loss || (loss == best_loss && lr < out.best_lr)) {
      best_loss = loss;
      out.best_lr = lr;
      have_best = true;
    }
  }
  return out;
}

// ---- checkpoints ------------------------------------------------------------------

namespace {

constexpr std::uint16_t kCheckpointVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (in.size() - pos < 4) throw Error(ErrorCode::TruncatedFile, "checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const DenseNet& net, const nlohmann::json& metadata) {
  nlohmann::json manifest{{"format", "fndstack-net"},
                          {"layers", layers_to_json(net.layers())},
                          {"seed", net.seed()},
                          {"metadata", metadata}};
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out{'S', 'F', 'N', 'N'};
  out.push_back(static_cast<std::uint8_t>(kCheckpointVersion & 0xff));
  out.push_back(static_cast<std::uint8_t>(kCheckpointVersion >> 8));
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& p : net.params()) {
    for (Eigen::Index i = 0; i < p.weight.size(); ++i) put_u32(out, std::bit_cast<std::uint32_t>(p.weight.data()[i]));
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) put_u32(out, std::bit_cast<std::uint32_t>(p.bias.data()[i]));
  }
  return out;
}

DenseNet decode_checkpoint(std::span<const std::uint8_t> bytes, nlohmann::json* metadata) {
  if (bytes.size() < 10) throw Error(ErrorCode::TruncatedFile, "checkpoint header truncated");
  if (std::memcmp(bytes.data(), "SFNN", 4) != 0) throw Error(ErrorCode::BadMagic, "expected 'SFNN'");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::BadMagic, "unsupported checkpoint version " + std::to_string(version));
  std::size_t pos = 6;
  const auto len = get_u32(bytes, pos);
  if (bytes.size() - pos < len) throw Error(ErrorCode::TruncatedFile, "checkpoint manifest truncated");
  const auto manifest = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                              bytes.begin() + static_cast<std::ptrdiff_t>(pos + len),
                                              nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("layers") || !manifest.contains("seed"))
    throw Error(ErrorCode::BadMagic, "checkpoint manifest is not valid");
  pos += len;

  DenseNet net(layers_from_json(manifest.at("layers")), manifest.at("seed").get<std::uint64_t>());
  for (auto& p : net.params()) {
    for (Eigen::Index i = 0; i < p.weight.size(); ++i) p.weight.data()[i] = std::bit_cast<float>(get_u32(bytes, pos));
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias.data()[i] = std::bit_cast<float>(get_u32(bytes, pos));
  }
  if (pos != bytes.size()) throw Error(ErrorCode::DimMismatch, "trailing bytes after checkpoint weights");
  if (metadata) *metadata = manifest.value("metadata", nlohmann::json());
  return net;
}

void save_checkpoint(const DenseNet& net, const std::filesystem::path& path, const nlohmann::json& metadata) {
  const auto bytes = encode_checkpoint(net, metadata);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileUnreadable, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::FileUnreadable, "write failed: " + path.string());
}

DenseNet load_checkpoint(const std::filesystem::path& path, nlohmann::json* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, metadata);
}

bool identical(const DenseNet& a, const DenseNet& b) {
  if (a.layers() != b.layers() || a.params().size() != b.params().size()) return false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    const auto& pa = a.params()[i];
    const auto& pb = b.params()[i];
    if (pa.weight.size() != pb.weight.size() || pa.bias.size() != pb.bias.size()) return false;
    if (std::memcmp(pa.weight.data(), pb.weight.data(), sizeof(float) * static_cast<std::size_t>(pa.weight.size())) != 0 ||
        std::memcmp(pa.bias.data(), pb.bias.data(), sizeof(float) * static_cast<std::size_t>(pa.bias.size())) != 0)
      return false;
  }
  return true;
}

// ---- instantiations ------------------------------------------------------------------

#define FNDSTACK_INSTANTIATE(T)                                                                          \
  template Mat<T> softmax_rows<T>(const Mat<T>&);                                                        \
  template Mat<T> sigmoid<T>(const Mat<T>&);                                                             \
  template LossAndGradient<T> cross_entropy<T>(const Mat<T>&, std::span<const int>, Squash);             \
  template class BasicDenseNet<T>;                                                                       \
  template NetLossAndGrad<T> loss_and_grad<T>(const BasicDenseNet<T>&, const Mat<T>&, const Mat<T>&,     \
                                              std::uint64_t);                                            \
  template class Adam<T>;                                                                                \
  template struct Dataset<T>;                                                                            \
  template Mat<T> one_hot<T>(std::span<const int>, std::size_t);                                         \
  template class NetObjective<T>;                                                                        \
  template Evaluation evaluate<T>(Trainable<T>&, const Dataset<T>&);                                     \
  template TrainResult train<T>(Trainable<T>&, const Dataset<T>&, const Dataset<T>*, const TrainConfig&); \
  template LrSweepResult lr_sweep<T>(const std::vector<LayerSpec>&, std::uint64_t, const Dataset<T>&,    \
                                     const Dataset<T>&, std::span<const double>, TrainConfig);

FNDSTACK_INSTANTIATE(float)
FNDSTACK_INSTANTIATE(double)

#undef FNDSTACK_INSTANTIATE

template BasicDenseNet<double> BasicDenseNet<float>::cast<double>() const;
template BasicDenseNet<float> BasicDenseNet<double>::cast<float>() const;

}  // namespace fndstack::nnet
