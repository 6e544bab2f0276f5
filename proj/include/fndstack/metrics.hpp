// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fndstack/corpus.hpp"

namespace fndstack::metrics {

using corpus::Label;

/// counts[true][pred], indexed by class_index (Real = 0, Fake = 1).
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t at(Label truth, Label pred) const {
    return counts[corpus::class_index(truth)][corpus::class_index(pred)];
  }
  std::uint64_t total() const noexcept;
  // One-vs-rest tallies with class c as the positive class.
  std::uint64_t tp(Label c) const { return at(c, c); }
  std::uint64_t fn(Label c) const;
  std::uint64_t fp(Label c) const;
  std::uint64_t tn(Label c) const;

  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws EmptyPredictions on an empty list.
ConfusionMatrix confusion(std::span<const std::pair<Label, Label>> preds);
ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> pred);

/// nullopt marks a 0/0 metric; it is never folded into 0 or 1.
struct PerClass {
  std::optional<double> precision, recall, f1;
  bool operator==(const PerClass&) const = default;
};

struct ClassMetrics {
  double accuracy = 0.0;
  std::array<PerClass, 2> per_class{};  // indexed like ConfusionMatrix

  const PerClass& of(Label c) const { return per_class[corpus::class_index(c)]; }
  bool operator==(const ClassMetrics&) const = default;
};

ClassMetrics compute_metrics(const ConfusionMatrix& cm);

struct ComputedRow {
  std::string method;
  ClassMetrics metrics;
};

struct ComparisonReport {
  std::string table;
  std::string csv;
  std::size_t rows = 0;
};

/// Percent-scale table in the published layout plus its CSV twin. Reference
/// rows for `dataset` come first when include_reference is set; computed rows
/// are printed to two decimals in the table and at full precision in the CSV.
ComparisonReport comparison_report(std::span<const ComputedRow> rows, std::string_view dataset,
                                   bool include_reference);

inline constexpr std::string_view kCsvHeader =
    "method,dataset,accuracy,fake_precision,fake_recall,fake_f1,real_precision,real_recall,real_f1";

}  // namespace fndstack::metrics
