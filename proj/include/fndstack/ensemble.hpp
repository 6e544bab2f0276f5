// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fndstack/backbone.hpp"
#include "fndstack/corpus.hpp"
#include "fndstack/nnet.hpp"

namespace fndstack::ensemble {

/// Each text embedding is projected to this width before stacking.
inline constexpr std::size_t kProjectionUnits = 128;
inline constexpr std::size_t kStackedWidth = 2 * kProjectionUnits;

/// Hidden widths of the classifier heads. Every hidden layer is Dense + ReLU
/// followed by Dropout(dropout); heads end in a 2-unit Output.
struct HeadConfig {
  std::vector<std::size_t> text_hidden{128, 64};
  std::vector<std::size_t> image_hidden{128};
  double dropout = 0.3;
  nnet::Squash squash = nnet::Squash::Softmax;
  std::uint64_t seed = 0;

  bool operator==(const HeadConfig&) const = default;
};

nlohmann::json to_json(const HeadConfig& cfg);
HeadConfig head_config_from_json(const nlohmann::json& j);

std::vector<nnet::LayerSpec> projection_layers(std::size_t input_dim);
std::vector<nnet::LayerSpec> text_head_layers(const HeadConfig& cfg);
std::vector<nnet::LayerSpec> image_head_layers(std::size_t image_dim, const HeadConfig& cfg);

/// Index 0 = Real, 1 = Fake.
using Probs = std::array<double, 2>;

struct Decision {
  Probs probs{};
  corpus::Label label = corpus::Label::Fake;
};

/// Throws NotAProbabilityVector unless components lie in [0,1] and sum to 1 +- 1e-6.
void check_probability_vector(const Probs& p);

/// Equal-weight decision-level fusion. An exact tie resolves to Fake.
Decision fuse(const Probs& p_text, const Probs& p_image);

corpus::Label decide(const Probs& p);

/// Two projections whose outputs are concatenated (a first, then b) and fed
/// to the text head. Trained end to end.
class TextBranch final : public nnet::Trainable<float> {
 public:
  TextBranch() = default;
  TextBranch(nnet::DenseNet proj_a, nnet::DenseNet proj_b, nnet::DenseNet head);

  nnet::DenseNet proj_a;
  nnet::DenseNet proj_b;
  nnet::DenseNet head;

  std::vector<nnet::Mat<float>*> parameter_tensors() override;
  void set_mode(nnet::Mode m) override;
  nnet::Mat<float> probabilities(std::span<const nnet::Mat<float>> inputs) const override;
  double loss_and_grad(std::span<const nnet::Mat<float>> inputs, std::span<const int> labels,
                       std::uint64_t mask_seed, std::vector<nnet::Mat<float>>& grads) override;

  /// The 256-wide stacked representation.
  nnet::Mat<float> stacked(const nnet::Mat<float>& a, const nnet::Mat<float>& b) const;
};

struct ParameterLedger {
  struct Trainable {
    std::string component;
    std::uint64_t parameters = 0;
  };
  struct Imported {
    std::string role;  // text_a, text_b, image
    backbone::BackboneDescriptor descriptor;
  };

  std::vector<Trainable> trainable;
  std::vector<Imported> imported;

  std::uint64_t trainable_total() const;
  std::uint64_t trainable_text() const;
  std::uint64_t trainable_image() const;
  std::uint64_t imported_total() const;
  std::uint64_t imported_text() const;
  std::uint64_t imported_image() const;
};

class Model {
 public:
  TextBranch text;
  nnet::DenseNet image_head;
  backbone::BackboneDescriptor text_a_descriptor;
  backbone::BackboneDescriptor text_b_descriptor;
  backbone::BackboneDescriptor image_descriptor;
  HeadConfig head_config;
  std::string fusion = "EqualAverage";

  Probs text_probs(std::span<const float> a, std::span<const float> b) const;
  Probs image_probs(std::span<const float> img) const;
  Decision classify(std::span<const float> a, std::span<const float> b, std::span<const float> img) const;

  /// Batched Eval-mode probabilities, one row per item.
  nnet::Mat<float> text_probs(const nnet::Mat<float>& a, const nnet::Mat<float>& b) const;
  nnet::Mat<float> image_probs(const nnet::Mat<float>& img) const;

  void zero_parameters();
  /// FNV-1a over the encoded checkpoints and the bundle manifest, as hex.
  std::string fingerprint() const;
};

/// The three embedding stores a model reads from.
struct StoreSet {
  const backbone::EmbeddingStore& text_a;
  const backbone::EmbeddingStore& text_b;
  const backbone::EmbeddingStore& image;
};

/// Sizes projections from the store widths, instantiates the heads and
/// resolves backbone metadata. When `required_ids` is empty the three stores
/// must hold the same id set; otherwise each store must hold every required id.
Model build_model(const StoreSet& stores, const HeadConfig& cfg,
                  std::span<const std::string> required_ids = {});

/// Throw MissingEmbedding(item id, store name).
Probs predict_text(const Model& model, const StoreSet& stores, std::string_view item_id);
Probs predict_image(const Model& model, const StoreSet& stores, std::string_view item_id);
Decision predict(const Model& model, const StoreSet& stores, std::string_view item_id);

struct TrainingReport {
  nnet::TrainResult text;
  nnet::TrainResult image;
  double text_seconds = 0.0;
  double image_seconds = 0.0;
};

/// Trains the text branch (projections + head, end to end) and the image head
/// independently on the Train split, validating on the Validation split when
/// it is non-empty. Fusion has no parameters.
TrainingReport train_model(Model& model, const corpus::DatasetManifest& manifest, const StoreSet& stores,
                           const nnet::TrainConfig& cfg);

/// Per-item outcome for one split.
struct SplitPredictions {
  std::vector<std::string> ids;
  std::vector<corpus::Label> truth;
  std::vector<corpus::Label> text;
  std::vector<corpus::Label> image;
  std::vector<corpus::Label> fused;
  std::vector<Probs> fused_probs;
};

SplitPredictions predict_split(const Model& model, const corpus::DatasetManifest& manifest,
                               const StoreSet& stores, corpus::Split split);

ParameterLedger parameter_ledger(const Model& model);

/// Plain-text ledger with the published parameter comparison and the
/// relative reductions derived from it.
std::string format_ledger(const ParameterLedger& ledger);

/// Relative reduction (1 - ours/theirs) in percent.
double reduction_pct(std::uint64_t ours, std::uint64_t theirs);

/// Directory with bundle.json, four checkpoints and ledger.txt.
void save_bundle(const Model& model, const std::filesystem::path& dir);
Model load_bundle(const std::filesystem::path& dir);

}  // namespace fndstack::ensemble
