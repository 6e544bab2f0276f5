// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/metrics.hpp"

#include <sstream>

#include <fmt/format.h>

#include "fndstack/error.hpp"
#include "fndstack/reference.hpp"

namespace fndstack::metrics {

namespace {

Label other(Label c) { return c == Label::Real ? Label::Fake : Label::Real; }

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}


std::string table_cell(const std::optional<double>& v, std::string_view missing) {
  return v ? fmt::format("{:.2f}", *v) : std::string(missing);
}

std::string csv_cell(const std::optional<double>& v, std::string_view missing, bool full) {
  if (!v) return std::string(missing);
  return full ? fmt::format("{}", *v) : fmt::format("{:.2f}", *v);
}

std::optional<double> pct(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return *v * 100.0;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

std::uint64_t ConfusionMatrix::fn(Label c) const { return at(c, other(c)); }
std::uint64_t ConfusionMatrix::fp(Label c) const { return at(other(c), c); }
std::uint64_t ConfusionMatrix::tn(Label c) const { return at(other(c), other(c)); }

ConfusionMatrix confusion(std::span<const std::pair<Label, Label>> preds) {
  if (preds.empty()) throw Error(ErrorCode::EmptyPredictions, "no predictions to tally");
  ConfusionMatrix cm;
  for (const auto& [t, p] : preds) ++cm.counts[corpus::class_index(t)][corpus::class_index(p)];
  return cm;
}

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> pred) {
  if (truth.size() != pred.size())
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} labels against {} predictions", truth.size(), pred.size()));
  if (truth.empty()) throw Error(ErrorCode::EmptyPredictions, "no predictions to tally");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++cm.counts[corpus::class_index(truth[i])][corpus::class_index(pred[i])];
  return cm;
}

ClassMetrics compute_metrics(const ConfusionMatrix& cm) {
  ClassMetrics m;
  const auto total = cm.total();
  m.accuracy = total == 0 ? 0.0 : static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) / static_cast<double>(total);
  for (Label c : {Label::Real, Label::Fake}) {
    auto& pc = m.per_class[corpus::class_index(c)];
    pc.precision = ratio(cm.tp(c), cm.tp(c) + cm.fp(c));
    pc.recall = ratio(cm.tp(c), cm.tp(c) + cm.fn(c));
    if (pc.precision && pc.recall && *pc.precision + *pc.recall > 0.0)
      pc.f1 = 2.0 * *pc.precision * *pc.recall / (*pc.precision + *pc.recall);
    // P and R both zero (no true positives at all) leaves F1 undefined as well.
  }
  return m;
}

ComparisonReport comparison_report(std::span<const ComputedRow> rows, std::string_view dataset,
                                   bool include_reference) {
  ComparisonReport out;
  std::ostringstream table, csv;
  table << fmt::format("{:<28} {:>8} | {:>8} {:>8} {:>8} | {:>8} {:>8} {:>8}\n", "Method", "Accuracy",
                       "Fake P", "Fake R", "Fake F1", "Real P", "Real R", "Real F1");
  table << std::string(28 + 9 + 29 + 29 + 2, '-') << '\n';
  csv << kCsvHeader << '\n';

  auto emit = [&](std::string_view method, const std::array<std::optional<double>, 7>& v,
                  std::string_view missing, bool full) {
    table << fmt::format("{:<28} {:>8} | {:>8} {:>8} {:>8} | {:>8} {:>8} {:>8}\n", method, table_cell(v[0], missing),
                         table_cell(v[1], missing), table_cell(v[2], missing), table_cell(v[3], missing),
                         table_cell(v[4], missing), table_cell(v[5], missing), table_cell(v[6], missing));
    csv << csv_field(method) << ',' << csv_field(dataset);
    for (const auto& x : v) csv << ',' << csv_cell(x, missing, full);
    csv << '\n';
    ++out.rows;
  };

  if (include_reference) {
    for (const auto& r : reference::published_results(dataset))
      emit(r.method, {r.accuracy, r.fake_precision, r.fake_recall, r.fake_f1, r.real_precision, r.real_recall, r.real_f1},
           "NA", false);
  }
  for (const auto& row : rows) {
    const auto& f = row.metrics.of(Label::Fake);
    const auto& r = row.metrics.of(Label::Real);
    emit(row.method,
         {row.metrics.accuracy * 100.0, pct(f.precision), pct(f.recall), pct(f.f1), pct(r.precision),
          pct(r.recall), pct(r.f1)},
         "UNDEF", true);
  }
  out.table = table.str();
  out.csv = csv.str();
  return out;
}

}  // namespace fndstack::metrics
