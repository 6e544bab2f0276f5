// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/selection.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"
#include "fndstack/reference.hpp"

namespace fndstack::selection {

namespace {

nnet::Dataset<float> slice(const corpus::DatasetManifest& m, const backbone::EmbeddingStore& store,
                           corpus::Split split) {
  const auto items = m.in_split(split);
  nnet::Dataset<float> d;
  d.inputs.emplace_back(static_cast<Eigen::Index>(items.size()), static_cast<Eigen::Index>(store.dim()));
  auto& x = d.inputs.front();
  for (std::size_t r = 0; r < items.size(); ++r) {
    const auto v = store.find(items[r]->id);
    if (!v)
      throw Error(ErrorCode::StoreIdMismatch,
                  "item '" + items[r]->id + "' of " + m.name + " missing from '" + store.descriptor().name + "'");
    for (std::size_t c = 0; c < v->size(); ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*v)[c];
    d.labels.push_back(static_cast<int>(corpus::class_index(items[r]->label)));
  }
  return d;
}

CandidateResult evaluate_candidate(const Candidate& c, std::span<const corpus::DatasetManifest> datasets,
                                   const SelectionOptions& opts) {
  CandidateResult r;
  r.descriptor = c.descriptor;
  r.parameter_count = c.descriptor.parameter_count;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& store = *c.stores[d];
    if (store.dim() != c.descriptor.output_dim)
      throw Error(ErrorCode::DimMismatch, fmt::format("candidate '{}' declares {} dims, store has {}",
                                                      c.descriptor.name, c.descriptor.output_dim, store.dim()));
    const auto train = slice(datasets[d], store, corpus::Split::Train);
    const auto val = slice(datasets[d], store, corpus::Split::Validation);
    if (train.size() == 0 || val.size() == 0)
      throw Error(ErrorCode::EmptyData, "dataset " + datasets[d].name + " needs train and validation items");
    // Same init and shuffle seeds for every candidate: only the features differ.
    nnet::DenseNet net(probe_layers(store.dim(), opts), derive_seed(opts.budget.seed, "selection_head"));
    nnet::train<float>(net, train, nullptr, opts.budget);
    nnet::NetObjective<float> obj(net);
    r.accuracies.push_back(100.0 * nnet::evaluate<float>(obj, val).accuracy);
  }
  double sum = 0.0;
  for (double a : r.accuracies) sum += a;
  r.average = sum / static_cast<double>(r.accuracies.size());
  return r;
}

void annotate(SelectionReport& report) {
  rank(report.results);
  report.pareto_front = pareto_front(report.results);
  for (auto& r : report.results) r.pareto = false;
  for (auto i : report.pareto_front) report.results[i].pareto = true;
}

std::string millions(std::uint64_t n) { return fmt::format("{:.2f}M", static_cast<double>(n) / 1e6); }

}  // namespace

std::vector<nnet::LayerSpec> probe_layers(std::size_t dim, const SelectionOptions& opts) {
  return nnet::NetSpecBuilder(dim)
      .dense(opts.hidden, nnet::Activation::ReLU)
      .dropout(opts.dropout)
      .output(corpus::kNumClasses, nnet::Squash::Softmax)
      .build();
}

SelectionReport run_selection(std::span<const Candidate> candidates,
                              std::span<const corpus::DatasetManifest> datasets, const SelectionOptions& opts) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidates to compare");
  if (datasets.empty()) throw Error(ErrorCode::EmptyData, "no datasets to score candidates on");
  nnet::validate(opts.budget);
  for (const auto& c : candidates)
    if (c.stores.size() != datasets.size() ||
        std::any_of(c.stores.begin(), c.stores.end(), [](const auto* s) { return s == nullptr; }))
      throw Error(ErrorCode::StoreIdMismatch,
                  fmt::format("candidate '{}' has {} stores for {} datasets", c.descriptor.name, c.stores.size(),
                              datasets.size()));

  SelectionReport report;
  report.datasets = datasets.size();
  report.results.resize(candidates.size());

  const std::size_t workers = std::clamp<std::size_t>(opts.threads, 1, candidates.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      report.results[i] = evaluate_candidate(candidates[i], datasets, opts);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < candidates.size(); i = next++) {
          try {
            report.results[i] = evaluate_candidate(candidates[i], datasets, opts);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  annotate(report);
  return report;
}

void rank(std::vector<CandidateResult>& results) {
  std::sort(results.begin(), results.end(), [](const CandidateResult& a, const CandidateResult& b) {
    if (a.average != b.average) return a.average > b.average;
    if (a.parameter_count != b.parameter_count) return a.parameter_count < b.parameter_count;
    return a.descriptor.name < b.descriptor.name;
  });
}

std::vector<std::size_t> pareto_front(std::span<const CandidateResult> results) {
  // Sweep by accuracy desc / params asc: a point survives iff its params are
  // below every strictly-better-or-equal point seen before it, or it ties the
  // current best exactly.
  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (results[a].average != results[b].average) return results[a].average > results[b].average;
    return results[a].parameter_count < results[b].parameter_count;
  });
  std::vector<std::size_t> front;
  bool have_best = false;
  double best_acc = 0.0;
  std::uint64_t best_params = 0;
  for (std::size_t i : order) {
    const auto& r = results[i];
    const bool duplicate_of_best = have_best && r.average == best_acc && r.parameter_count == best_params;
    if (!have_best || r.parameter_count < best_params || duplicate_of_best) {
      front.push_back(i);
      if (!duplicate_of_best) {
        have_best = true;
        best_acc = r.average;
        best_params = r.parameter_count;
      }
    }
  }
  std::sort(front.begin(), front.end());
  return front;
}

SelectionReport reference_report() {
  SelectionReport report;
  for (const auto& row : reference::top_image_models()) {
    CandidateResult r;
    r.descriptor = backbone::find_descriptor(row.name).value_or(
        backbone::BackboneDescriptor{std::string(row.name), backbone::Modality::Image, 0, row.parameters,
                                     backbone::Provenance::Imported});
    r.parameter_count = row.parameters;
    r.descriptor.parameter_count = row.parameters;
    r.descriptor.name = std::string(row.name);
    r.average = row.val_accuracy_pct;
    report.results.push_back(std::move(r));
  }
  annotate(report);
  return report;
}

std::string format_report(const SelectionReport& report) {
  std::ostringstream os;
  os << fmt::format("{:<4}{:<22}{:>14}", "#", "Backbone", "Parameters");
  for (std::size_t d = 0; d < report.datasets; ++d) os << fmt::format("{:>12}", fmt::format("Acc D{}", d + 1));
  os << fmt::format("{:>12}{:>8}\n", "Acc avg", "Pareto");
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    os << fmt::format("{:<4}{:<22}{:>14}", i + 1, r.descriptor.name, millions(r.parameter_count));
    for (double a : r.accuracies) os << fmt::format("{:>12.2f}", a);
    os << fmt::format("{:>12.2f}{:>8}\n", r.average, r.pareto ? "*" : "");
  }
  return os.str();
}

std::string report_csv(const SelectionReport& report) {
  const std::size_t cols = std::max<std::size_t>(2, report.datasets);
  std::ostringstream os;
  os << "backbone,params";
  for (std::size_t d = 0; d < cols; ++d) os << ",acc_dataset" << d + 1;
  os << ",acc_avg,pareto\n";
  for (const auto& r : report.results) {
    os << r.descriptor.name << ',' << r.parameter_count;
    for (std::size_t d = 0; d < cols; ++d)
      os << ',' << (d < r.accuracies.size() ? fmt::format("{}", r.accuracies[d]) : std::string("NA"));
    os << ',' << fmt::format("{}", r.average) << ',' << (r.pareto ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string plot_csv(const SelectionReport& report) {
  std::ostringstream os;
  os << "params,accuracy,backbone\n";
  for (const auto& r : report.results) os << r.parameter_count << ',' << fmt::format("{}", r.average) << ',' << r.descriptor.name << '\n';
  return os.str();
}

std::string format_study_table() {
  std::ostringstream os;
  os << fmt::format("{:<22}{:>10}{:>14}{:>8}\n", "Model", "Size (MB)", "Params (M)", "Depth");
  for (const auto& r : reference::image_model_study())
    os << fmt::format("{:<22}{:>10}{:>14.1f}{:>8}\n", r.name, r.size_mb ? fmt::format("{}", *r.size_mb) : "NA",
                      r.params_millions, r.depth);
  return os.str();
}

}  // namespace fndstack::selection
