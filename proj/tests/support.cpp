// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "fndstack/random.hpp"

namespace fndstack::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() / fmt::format("fndstack-{}-{}-{}", tag, ::getpid(), counter++);
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

corpus::DatasetManifest twitter_shaped_fixture(std::size_t dropped_per_kind) {
  using corpus::Label;
  using corpus::Split;
  corpus::DatasetManifest m;
  m.name = "twitter";
  std::size_t n = 0;
  auto add = [&](Split split, Label label, std::string text, std::optional<std::string> image) {
    corpus::NewsItem item;
    item.id = fmt::format("tw{:06d}", n++);
    item.text = std::move(text);
    item.image_ref = std::move(image);
    item.label = label;
    item.split = split;
    m.items.push_back(std::move(item));
  };
  const struct {
    Split split;
    Label label;
    std::size_t count;
  } cells[] = {{Split::Train, Label::Real, 5008},
               {Split::Train, Label::Fake, 7032},
               {Split::Test, Label::Real, 1217},
               {Split::Test, Label::Fake, 2564}};
  for (const auto& c : cells)
    for (std::size_t i = 0; i < c.count; ++i)
      add(c.split, c.label, fmt::format("post {} about event {}", n, i % 17), fmt::format("img/{}.jpg", n));
  // Interleave the items the filter has to remove.
  for (std::size_t i = 0; i < dropped_per_kind; ++i) {
    add(Split::Train, Label::Fake, "", fmt::format("img/x{}.png", i));
    add(Split::Train, Label::Real, fmt::format("text only {}", i), std::nullopt);
    add(Split::Test, Label::Fake, fmt::format("looping clip {}", i), fmt::format("img/v{}.gif", i));
    add(Split::Train, Label::Real, fmt::format("video post {}", i), fmt::format("vid/{}.mp4", i));
  }
  return m;
}

corpus::DatasetManifest mock_manifest(std::size_t n, std::uint64_t seed, const std::string& name) {
  corpus::DatasetManifest m;
  m.name = name;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    corpus::NewsItem item;
    item.id = fmt::format("{}-{:05d}", name, i);
    item.text = fmt::format("item {} of {}", i, name);
    item.image_ref = fmt::format("images/{}.jpg", i);
    item.label = rng.uniform() < 0.5 ? corpus::Label::Fake : corpus::Label::Real;
    m.items.push_back(std::move(item));
  }
  return corpus::assign_splits(m, corpus::SplitScheme::TrainValTest7_1_2, seed);
}

backbone::BackboneDescriptor mock_descriptor(const std::string& name, backbone::Modality m, std::uint32_t dim,
                                             std::uint64_t params) {
  return {name, m, dim, params, backbone::Provenance::Mock};
}

std::array<std::array<std::uint64_t, 2>, 2> recount(const std::vector<std::pair<int, int>>& pairs) {
  std::array<std::array<std::uint64_t, 2>, 2> c{};
  for (int t = 0; t < 2; ++t)
    for (int p = 0; p < 2; ++p)
      for (const auto& pr : pairs)
        if (pr.first == t && pr.second == p) ++c[t][p];
  return c;
}

OracleMetrics oracle_metrics(const std::vector<std::pair<int, int>>& pairs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  OracleMetrics o{};
  std::size_t correct = 0;
  for (const auto& [t, p] : pairs) correct += t == p;
  o.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
  for (int c = 0; c < 2; ++c) {
    std::size_t predicted = 0, actual = 0, hit = 0;
    for (const auto& [t, p] : pairs) {
      predicted += p == c;
      actual += t == c;
      hit += t == c && p == c;
    }
    o.precision[c] = predicted ? static_cast<double>(hit) / static_cast<double>(predicted) : nan;
    o.recall[c] = actual ? static_cast<double>(hit) / static_cast<double>(actual) : nan;
    const double P = o.precision[c], R = o.recall[c];
    o.f1[c] = (std::isnan(P) || std::isnan(R) || P + R == 0.0) ? nan : 2.0 * P * R / (P + R);
  }
  return o;
}

std::vector<bool> brute_force_front(const std::vector<std::pair<double, std::uint64_t>>& points) {
  std::vector<bool> in(points.size(), true);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      const auto& a = points[j];
      const auto& b = points[i];
      const bool ge = a.first >= b.first && a.second <= b.second;
      const bool strict = a.first > b.first || a.second < b.second;
      if (ge && strict) in[i] = false;
    }
  return in;
}

namespace {

using nnet::Mat;

std::vector<nnet::LayerSpec> random_head(Rng& rng) {
  const std::size_t in = 2 + rng.below(5);
  nnet::NetSpecBuilder b(in);
  const auto hidden = rng.below(3);
  for (std::uint64_t h = 0; h < hidden; ++h) {
    b.dense(2 + rng.below(5), rng.below(4) == 0 ? nnet::Activation::None : nnet::Activation::ReLU);
    if (rng.below(2) == 0) b.dropout(0.1 + 0.4 * rng.uniform());
  }
  return b.output(2, rng.below(3) == 0 ? nnet::Squash::Sigmoid : nnet::Squash::Softmax).build();
}

bool near_kink(const nnet::BasicDenseNet<double>& net, const Mat<double>& x, std::uint64_t mask_seed) {
  nnet::BasicDenseNet<double>::Cache cache;
  net.forward(x, mask_seed, &cache);
  std::size_t p = 0;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& l = net.layers()[i];
    if (!l.has_parameters()) continue;
    const auto& prm = net.params()[p++];
    if (l.kind != nnet::LayerSpec::Kind::Dense || l.activation != nnet::Activation::ReLU) continue;
    Mat<double> z = cache.activations[i] * prm.weight;
    z.rowwise() += prm.bias.row(0);
    if ((z.array().abs() < kKinkMargin).any()) return true;
  }
  return false;
}

double rel(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kGradFloor}); }

}  // namespace

GradCheck gradient_check(std::uint64_t seed) {
  Rng rng(seed);
  for (;;) {
    const auto layers = random_head(rng);
    nnet::BasicDenseNet<double> net(layers, rng.next_u64());
    for (auto& p : net.params())
      for (Eigen::Index c = 0; c < p.bias.cols(); ++c) p.bias(0, c) = rng.normal(0.0, 0.5);
    const bool has_dropout = std::any_of(layers.begin(), layers.end(),
                                         [](const auto& l) { return l.kind == nnet::LayerSpec::Kind::Dropout; });
    net.set_mode(has_dropout ? nnet::Mode::Train : nnet::Mode::Eval);
    const std::uint64_t mask_seed = rng.next_u64();

    const auto batch = static_cast<Eigen::Index>(1 + rng.below(5));
    Mat<double> x(batch, static_cast<Eigen::Index>(layers.front().in_dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Mat<double> y = Mat<double>::Zero(batch, 2);
    for (Eigen::Index r = 0; r < batch; ++r) y(r, static_cast<Eigen::Index>(rng.below(2))) = 1.0;
    if (near_kink(net, x, mask_seed)) continue;

    const auto analytic = nnet::loss_and_grad(net, x, y, mask_seed);
    auto loss_at = [&] { return nnet::loss_and_grad(net, x, y, mask_seed).loss; };
    GradCheck out;
    out.layers = layers;
    bool kinked = false;
    for (std::size_t p = 0; p < net.params().size() && !kinked; ++p) {
      for (auto* which : {&net.params()[p].weight, &net.params()[p].bias}) {
        const auto& g = which == &net.params()[p].weight ? analytic.grads[p].weight : analytic.grads[p].bias;
        for (Eigen::Index i = 0; i < which->size(); ++i) {
          double& w = which->data()[i];
          const double saved = w;
          w = saved + kGradStep;
          const double up = loss_at();
          w = saved - kGradStep;
          const double down = loss_at();
          w = saved;
          const double numeric = (up - down) / (2 * kGradStep);
          out.max_rel_error = std::max(out.max_rel_error, rel(g.data()[i], numeric));
          ++out.entries;
        }
      }
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double saved = x.data()[i];
      x.data()[i] = saved + kGradStep;
      if (near_kink(net, x, mask_seed)) kinked = true;
      const double up = loss_at();
      x.data()[i] = saved - kGradStep;
      if (near_kink(net, x, mask_seed)) kinked = true;
      const double down = loss_at();
      x.data()[i] = saved;
      out.max_rel_error = std::max(out.max_rel_error, rel(analytic.d_input.data()[i], (up - down) / (2 * kGradStep)));
      ++out.entries;
    }
    if (!kinked) return out;
  }
}

}  // namespace fndstack::testing
