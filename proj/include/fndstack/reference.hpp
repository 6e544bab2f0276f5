// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// Published numbers used as comparison rows and replication targets. Values
// are literal; NA entries stay NA.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace fndstack::reference {

struct DatasetSummary {
  std::string_view dataset;
  std::uint32_t train_real, train_fake, test_real, test_fake;
};

std::span<const DatasetSummary> dataset_summaries();

/// Backbone study: model size, parameters in millions and depth.
struct ImageModelRow {
  std::string_view name;
  std::optional<double> size_mb;
  double params_millions;
  std::uint32_t depth;
};

std::span<const ImageModelRow> image_model_study();

/// Top candidates of the backbone study: exact parameter counts and
/// validation accuracy (%) averaged over both datasets after 3 epochs.
struct TopModelRow {
  std::string_view name;
  std::uint64_t parameters;
  double val_accuracy_pct;
};

std::span<const TopModelRow> top_image_models();

/// Comparison-table row; every metric is a percentage.
struct ResultRow {
  std::string_view method;
  double accuracy;
  std::optional<double> fake_precision, fake_recall, fake_f1;
  std::optional<double> real_precision, real_recall, real_f1;
};

/// dataset is "twitter" or "weibo" (case-insensitive); empty for others.
std::span<const ResultRow> published_results(std::string_view dataset);

struct ParameterRow {
  std::string_view method;
  std::string_view image_model;
  std::uint64_t image_parameters;
  std::string_view text_model;
  std::optional<std::uint64_t> text_parameters;
};

std::span<const ParameterRow> parameter_comparison();

}  // namespace fndstack::reference
