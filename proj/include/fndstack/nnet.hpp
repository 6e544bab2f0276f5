// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace fndstack::nnet {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint8_t { None, ReLU };
enum class Squash : std::uint8_t { Softmax, Sigmoid };
enum class Mode : std::uint8_t { Train, Eval };

struct LayerSpec {
  enum class Kind : std::uint8_t { Dense, Dropout, Output };

  Kind kind = Kind::Dense;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::None;  // Dense only
  double rate = 0.0;                         // Dropout only
  Squash squash = Squash::Softmax;           // Output only

  static LayerSpec dense(std::size_t in, std::size_t out, Activation act = Activation::None) {
    return {Kind::Dense, in, out, act, 0.0, Squash::Softmax};
  }
  static LayerSpec dropout(double rate) { return {Kind::Dropout, 0, 0, Activation::None, rate, Squash::Softmax}; }
  static LayerSpec output(std::size_t in, std::size_t units, Squash squash = Squash::Softmax) {
    return {Kind::Output, in, units, Activation::None, 0.0, squash};
  }

  bool has_parameters() const noexcept { return kind != Kind::Dropout; }
  std::uint64_t parameter_count() const noexcept {
    return has_parameters() ? in_dim * out_dim + out_dim : 0;
  }
  bool operator==(const LayerSpec&) const = default;
};

/// Fluent construction that threads widths from layer to layer.
class NetSpecBuilder {
 public:
  explicit NetSpecBuilder(std::size_t input_dim) : width_(input_dim) {}
  NetSpecBuilder& dense(std::size_t units, Activation act = Activation::None);
  NetSpecBuilder& dropout(double rate);
  NetSpecBuilder& output(std::size_t units, Squash squash = Squash::Softmax);
  std::vector<LayerSpec> build() const { return layers_; }

 private:
  std::size_t width_;
  std::vector<LayerSpec> layers_;
};

/// Throws InvalidArgument on incompatible widths, bad dropout rates, a
/// misplaced Output layer or a zero width.
void validate_layers(const std::vector<LayerSpec>& layers);

nlohmann::json layers_to_json(const std::vector<LayerSpec>& layers);
std::vector<LayerSpec> layers_from_json(const nlohmann::json& j);

/// Weight is in_dim x out_dim (y = x W + b), bias is 1 x out_dim.
template <typename T>
struct DenseParams {
  Mat<T> weight;
  Mat<T> bias;
};

template <typename T>
using Gradients = std::vector<DenseParams<T>>;

/// Row-wise softmax, max-shifted.
template <typename T>
Mat<T> softmax_rows(const Mat<T>& logits);

template <typename T>
Mat<T> sigmoid(const Mat<T>& logits);

/// Class index with the largest probability; ties go to the higher index, so
/// an exact 0.5/0.5 binary split resolves to class 1 (Fake).
template <typename Row>
std::size_t predicted_class(const Row& probs) {
  std::size_t best = 0;
  for (Eigen::Index k = 1; k < probs.size(); ++k)
    if (probs(k) >= probs(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(k);
  return best;
}

template <typename T>
struct LossAndGradient {
  double loss = 0.0;
  Mat<T> d_logits;  // gradient of the mean loss w.r.t. pre-squash logits
};

/// Mean categorical cross-entropy -(1/B) sum log p[target] and its gradient
/// w.r.t. the logits. Loss is accumulated in double. Under Sigmoid, p is the
/// row of sigmoids divided by its sum (the forward pass emits the same).
template <typename T>
LossAndGradient<T> cross_entropy(const Mat<T>& logits, std::span<const int> labels, Squash squash);

/// Feedforward stack of Dense, Dropout and (optionally, last) Output layers.
/// Dropout is inverted: kept activations are scaled by 1/(1-rate) in Train
/// mode and Eval mode is the identity.
template <typename T>
class BasicDenseNet {
 public:
  struct Cache {
    std::vector<Mat<T>> activations;  // input to layer i is activations[i]
    std::vector<Mat<T>> masks;        // per layer, empty unless dropout in Train mode
    Mat<T> logits;                    // pre-squash output (Output layer only)
  };

  BasicDenseNet() = default;
  /// Weights uniform in +-sqrt(6/(in+out)) from a per-layer seeded stream; biases zero.
  BasicDenseNet(std::vector<LayerSpec> layers, std::uint64_t seed);

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  bool has_output_layer() const;
  Squash squash() const;

  Mode mode() const noexcept { return mode_; }
  void set_mode(Mode m) noexcept { mode_ = m; }

  /// Sum over parametrised layers of in*out + out.
  std::uint64_t parameter_count() const;

  std::vector<DenseParams<T>>& params() noexcept { return params_; }
  const std::vector<DenseParams<T>>& params() const noexcept { return params_; }
  /// weight, bias, weight, bias, ... in layer order.
  std::vector<Mat<T>*> parameter_tensors();
  void zero_parameters();

  /// Probabilities when the net ends in an Output layer, raw activations
  /// otherwise. `mask_seed` drives dropout masks in Train mode.
  Mat<T> forward(const Mat<T>& x, std::uint64_t mask_seed = 0, Cache* cache = nullptr) const;

  /// Back-propagates `d_top` (w.r.t. logits for an Output net, w.r.t. the
  /// final activations otherwise). Accumulates into `grads`, which is resized
  /// and zeroed when shapes do not match, and returns the input gradient.
  Mat<T> backward(const Cache& cache, const Mat<T>& d_top, Gradients<T>& grads) const;

  Gradients<T> zero_gradients() const;

  template <typename U>
  BasicDenseNet<U> cast() const;

 private:
  template <typename U>
  friend class BasicDenseNet;

  std::vector<LayerSpec> layers_;
  std::vector<DenseParams<T>> params_;
  std::vector<int> param_of_layer_;  // -1 for dropout
  std::uint64_t seed_ = 0;
  Mode mode_ = Mode::Eval;
};

using DenseNet = BasicDenseNet<float>;

template <typename T>
struct NetLossAndGrad {
  double loss = 0.0;
  Gradients<T> grads;
  Mat<T> d_input;
};

/// Loss and exact gradients of a net ending in an Output layer for one-hot
/// targets, in the net's current mode. Throws DimMismatch or NonOneHotTarget.
template <typename T>
NetLossAndGrad<T> loss_and_grad(const BasicDenseNet<T>& net, const Mat<T>& batch,
                                const Mat<T>& onehot_targets, std::uint64_t mask_seed = 0);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
class Adam {
 public:
  Adam(AdamConfig cfg, const std::vector<Mat<T>*>& params);
  void step(const std::vector<Mat<T>*>& params, const std::vector<const Mat<T>*>& grads);
  std::uint64_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<Mat<T>> m_, v_;
  std::uint64_t t_ = 0;
};

struct EarlyStopping {
  std::size_t patience = 3;
};

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 8;
  std::size_t epochs = 3;
  std::uint64_t seed = 0;
  /// Needs validation data; restores the weights of the best validation epoch.
  std::optional<EarlyStopping> early_stopping;
};

/// Throws InvalidArgument for lr <= 0, betas outside [0,1), zero batch size or zero epochs.
void validate(const TrainConfig& cfg);

nlohmann::json to_json(const TrainConfig& cfg);

/// Aligned input blocks (one matrix per network input) and class labels.
template <typename T>
struct Dataset {
  std::vector<Mat<T>> inputs;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  Dataset<T> rows(std::span<const std::size_t> idx) const;
};

template <typename T>
Mat<T> one_hot(std::span<const int> labels, std::size_t classes);

/// Anything the trainer can fit: a parameter list, a train-mode loss with
/// gradients ordered like the parameters, and eval-mode probabilities.
template <typename T>
class Trainable {
 public:
  virtual ~Trainable() = default;
  virtual std::vector<Mat<T>*> parameter_tensors() = 0;
  virtual void set_mode(Mode m) = 0;
  virtual Mat<T> probabilities(std::span<const Mat<T>> inputs) const = 0;
  virtual double loss_and_grad(std::span<const Mat<T>> inputs, std::span<const int> labels,
                               std::uint64_t mask_seed, std::vector<Mat<T>>& grads) = 0;
};

/// Adapts a single-input net that ends in an Output layer.
template <typename T>
class NetObjective final : public Trainable<T> {
 public:
  explicit NetObjective(BasicDenseNet<T>& net) : net_(net) {}
  std::vector<Mat<T>*> parameter_tensors() override { return net_.parameter_tensors(); }
  void set_mode(Mode m) override { net_.set_mode(m); }
  Mat<T> probabilities(std::span<const Mat<T>> inputs) const override;
  double loss_and_grad(std::span<const Mat<T>> inputs, std::span<const int> labels,
                       std::uint64_t mask_seed, std::vector<Mat<T>>& grads) override;

 private:
  BasicDenseNet<T>& net_;
};

struct EpochStats {
  double train_loss = 0.0;  // mean over the epoch's mini-batches (Train mode)
  double train_accuracy = 0.0;  // Eval-mode pass after the epoch
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;

  bool operator==(const EpochStats&) const = default;
};

struct TrainResult {
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 0-based; last epoch when no early stopping
  bool stopped_early = false;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Eval-mode mean loss and accuracy.
template <typename T>
Evaluation evaluate(Trainable<T>& model, const Dataset<T>& data);

/// Mini-batch Adam. Shuffling, dropout masks and therefore the final weights
/// are a deterministic function of cfg.seed. Leaves the model in Eval mode.
/// Without early stopping the history has exactly cfg.epochs entries.
template <typename T>
TrainResult train(Trainable<T>& model, const Dataset<T>& train_data, const Dataset<T>* val_data,
                  const TrainConfig& cfg);

template <typename T>
TrainResult train(BasicDenseNet<T>& net, const Dataset<T>& train_data, const Dataset<T>* val_data,
                  const TrainConfig& cfg) {
  NetObjective<T> objective(net);
  return train<T>(objective, train_data, val_data, cfg);
}

struct LrSweepResult {
  double best_lr = 0.0;
  std::vector<double> candidates;
  std::vector<double> final_val_loss;  // +inf when training diverged
};

/// Learning rates tried in the default sweep grid.
inline const std::vector<double> kDefaultLrGrid{1e-4, 3e-4, 1e-3, 3e-3};

/// Trains a fresh net (same layers and init seed) per candidate and returns
/// the argmin of final-epoch validation loss; ties go to the smaller lr.
template <typename T>
LrSweepResult lr_sweep(const std::vector<LayerSpec>& layers, std::uint64_t init_seed,
                       const Dataset<T>& train_data, const Dataset<T>& val_data,
                       std::span<const double> candidates, TrainConfig cfg);

/// Checkpoint: "SFNN", u16 version, u32 manifest length, manifest JSON
/// (layers, seed, metadata), then per parametrised layer the weight
/// (row-major in x out) and bias as little-endian binary32.
std::vector<std::uint8_t> encode_checkpoint(const DenseNet& net, const nlohmann::json& metadata = {});
DenseNet decode_checkpoint(std::span<const std::uint8_t> bytes, nlohmann::json* metadata = nullptr);
void save_checkpoint(const DenseNet& net, const std::filesystem::path& path,
                     const nlohmann::json& metadata = {});
DenseNet load_checkpoint(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

/// Exact equality of layers and weight bits.
bool identical(const DenseNet& a, const DenseNet& b);

}  // namespace fndstack::nnet
