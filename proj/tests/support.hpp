// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and independent oracles for the test binaries.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fndstack/backbone.hpp"
#include "fndstack/corpus.hpp"
#include "fndstack/nnet.hpp"

namespace fndstack::testing {

/// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p);
void spit(const std::filesystem::path& p, const std::string& text);

/// Twitter-MediaEval-shaped manifest: preassigned train/test items with the
/// published per-class counts plus items the multimodal filter must drop
/// (`dropped` of each kind).
corpus::DatasetManifest twitter_shaped_fixture(std::size_t dropped_per_kind = 25);

/// Balanced-ish random manifest split 7/1/2.
corpus::DatasetManifest mock_manifest(std::size_t n, std::uint64_t seed, const std::string& name = "mock");

backbone::BackboneDescriptor mock_descriptor(const std::string& name, backbone::Modality m, std::uint32_t dim,
                                             std::uint64_t params = 0);

/// Brute-force tally of (truth, pred) pairs: counts[t][p].
std::array<std::array<std::uint64_t, 2>, 2> recount(const std::vector<std::pair<int, int>>& pairs);

/// Per-class precision / recall / F1 straight from the definitions on raw
/// pairs (no confusion matrix). NaN marks 0/0.
struct OracleMetrics {
  double accuracy;
  std::array<double, 2> precision, recall, f1;
};
OracleMetrics oracle_metrics(const std::vector<std::pair<int, int>>& pairs);

/// Pareto membership by exhaustive pairwise dominance.
std::vector<bool> brute_force_front(const std::vector<std::pair<double, std::uint64_t>>& points);

/// Central-difference check of loss_and_grad on one random small head
/// (float64). Relative error is |a - n| / max(|a|, |n|, kGradFloor) over every
/// weight, bias and input entry. Draws whose ReLU pre-activations sit within
/// kKinkMargin of zero are re-drawn, since the loss is not differentiable
/// there.
inline constexpr double kGradStep = 1e-5;
inline constexpr double kGradFloor = 1e-6;
inline constexpr double kKinkMargin = 1e-3;

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t entries = 0;
  std::vector<nnet::LayerSpec> layers;
};
GradCheck gradient_check(std::uint64_t seed);

}  // namespace fndstack::testing
