// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// Backbone selection: an identical frozen-backbone head per candidate, short
// fixed budget, validation accuracy averaged over datasets, then ranked
// against parameter count.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fndstack/backbone.hpp"
#include "fndstack/corpus.hpp"
#include "fndstack/nnet.hpp"

namespace fndstack::selection {

struct Candidate {
  backbone::BackboneDescriptor descriptor;
  std::vector<const backbone::EmbeddingStore*> stores;  // one per dataset, same order
};

struct CandidateResult {
  backbone::BackboneDescriptor descriptor;
  std::vector<double> accuracies;  // validation accuracy (%) per dataset; empty in reference mode
  double average = 0.0;
  std::uint64_t parameter_count = 0;
  bool pareto = false;
};

struct SelectionReport {
  std::vector<CandidateResult> results;  // ranked
  std::vector<std::size_t> pareto_front;  // indices into results, ascending
  std::size_t datasets = 0;
};

struct SelectionOptions {
  nnet::TrainConfig budget = default_budget();
  std::size_t hidden = 128;
  double dropout = 0.3;
  std::size_t threads = 1;

  static nnet::TrainConfig default_budget() {
    nnet::TrainConfig c;
    c.batch_size = 8;
    c.epochs = 3;
    return c;
  }
};

std::vector<nnet::LayerSpec> probe_layers(std::size_t dim, const SelectionOptions& opts);

/// Trains on each manifest's train split and scores on its validation split.
/// Throws EmptyCandidates, StoreIdMismatch, DimMismatch or EmptyData. Results
/// do not depend on opts.threads or on candidate order.
SelectionReport run_selection(std::span<const Candidate> candidates,
                              std::span<const corpus::DatasetManifest> datasets,
                              const SelectionOptions& opts);

/// Ranking: accuracy desc, then fewer parameters, then name.
void rank(std::vector<CandidateResult>& results);

/// Indices of results that no other result dominates (accuracy >= and
/// parameters <=, one of them strict).
std::vector<std::size_t> pareto_front(std::span<const CandidateResult> results);

/// The published top-5 study rendered through the same ranking and front.
SelectionReport reference_report();

std::string format_report(const SelectionReport& report);
std::string report_csv(const SelectionReport& report);
/// x = params, y = accuracy; for external plotting.
std::string plot_csv(const SelectionReport& report);
/// Published 17-model study table (size, parameters, depth).
std::string format_study_table();

}  // namespace fndstack::selection
