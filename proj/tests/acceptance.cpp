// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "cli_harness.hpp"
#include "fndstack/backbone.hpp"
#include "fndstack/cli/service.hpp"
#include "fndstack/ensemble.hpp"
#include "fndstack/metrics.hpp"
#include "fndstack/nnet.hpp"
#include "fndstack/preprocess.hpp"
#include "fndstack/random.hpp"
#include "fndstack/reference.hpp"
#include "fndstack/selection.hpp"
#include "support.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a macro named _res.
#include <httplib.h>

namespace {

using namespace fndstack;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 30.0;
constexpr double kLossTol = 1e-9;
constexpr double kMinFusedAccuracy = 0.95;
constexpr double kFusionSlack = 0.02;
constexpr double kPipelineSeconds = 120.0;
constexpr double kMetricTol = 5e-5;
constexpr int kSelectionSeeds = 5;
constexpr int kSelectionMinInOrder = 4;
constexpr double kDensityTol = 1e-6;
constexpr double kProbSumTol = 1e-6;
constexpr double kMedianLatencyUs = 5000.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared by P5 and P11.
struct PipelineState {
  testing::TempDir dir{"acceptance"};
  testing::MockPipeline paths;
  bool ready = false;
};
PipelineState& pipeline() {
  static PipelineState s;
  return s;
}

Outcome p1_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) worst = std::max(worst, testing::gradient_check(seed).max_rel_error);
  const double secs = seconds_since(t0);
  o.check(worst < kGradTol, fmt::format("max rel error {:.3g}", worst));
  o.check(secs < kGradSeconds, fmt::format("{:.1f}s", secs));
  o.detail = o.pass ? fmt::format("100 heads, max rel error {:.3g}, {:.2f}s", worst, secs) : o.detail;
  return o;
}

Outcome p2_softmax_ce() {
  Outcome o;
  nnet::Mat<double> logits = nnet::Mat<double>::Zero(1, 2);
  const std::vector<int> target{0};
  const auto r = nnet::cross_entropy<double>(logits, target, nnet::Squash::Softmax);
  o.check(std::abs(r.loss - std::numbers::ln2) <= kLossTol, fmt::format("loss {}", r.loss));
  o.check(std::abs(r.d_logits(0, 0) + 0.5) <= kLossTol && std::abs(r.d_logits(0, 1) - 0.5) <= kLossTol,
          fmt::format("grad [{}, {}]", r.d_logits(0, 0), r.d_logits(0, 1)));
  if (o.pass) o.detail = fmt::format("loss {:.12f}, grad [{}, {}]", r.loss, r.d_logits(0, 0), r.d_logits(0, 1));
  return o;
}

Outcome p3_fusion() {
  Outcome o;
  using ensemble::Probs;
  // 0.3 has no double representation; the fused component must equal the
  // correctly rounded mean of the two double inputs.
  const auto mean = [](double a, double b) {
    return static_cast<double>((static_cast<long double>(a) + static_cast<long double>(b)) / 2.0L);
  };
  const auto w = ensemble::fuse({0.8, 0.2}, {0.6, 0.4});
  o.check(w.probs[0] == 0.7 && w.probs[1] == mean(0.2, 0.4), fmt::format("worked example [{}, {}]", w.probs[0], w.probs[1]));
  o.check(std::abs(w.probs[1] - 0.3) <= std::nextafter(0.3, 1.0) - 0.3, "worked example beyond 1 ulp of 0.3");
  Rng rng(3);
  std::size_t cases = 0;
  for (int i = 0; i < 100000 && o.pass; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    const Probs a{1.0 - u, u}, b{1.0 - v, v};
    const auto ab = ensemble::fuse(a, b), ba = ensemble::fuse(b, a);
    o.check(ab.probs == ba.probs && ab.label == ba.label, "symmetry");
    o.check(ensemble::fuse(a, a).probs == a, "idempotence");
    if (ensemble::decide(a) == ensemble::decide(b)) o.check(ab.label == ensemble::decide(a), "agreement");
    bool valid = true;
    try {
      ensemble::check_probability_vector(ab.probs);
    } catch (const Error&) {
      valid = false;
    }
    o.check(valid, "validity");
    ++cases;
  }
  if (o.pass) o.detail = fmt::format("worked example [{}, {:.17g}], {} random pairs", w.probs[0], w.probs[1], cases);
  return o;
}

Outcome p4_shapes() {
  Outcome o;
  const auto m = testing::mock_manifest(10, 1);
  const auto a = backbone::mock_store(testing::mock_descriptor("a", backbone::Modality::Text, 768), m, 0.5, 1);
  const auto b = backbone::mock_store(testing::mock_descriptor("b", backbone::Modality::Text, 256), m, 0.5, 1);
  const auto i = backbone::mock_store(testing::mock_descriptor("i", backbone::Modality::Image, 1056), m, 0.5, 1);
  const auto model = ensemble::build_model({a, b, i}, {});
  o.check(model.text.proj_a.output_dim() == 128 && model.text.proj_b.output_dim() == 128, "projection widths");
  o.check(model.text.head.input_dim() == 256, "stacked width");
  o.check(model.text.head.output_dim() == 2 && model.image_head.output_dim() == 2, "class outputs");
  o.check(model.image_head.input_dim() == 1056, "image input");
  const auto proj = model.text.proj_a.parameter_count() + model.text.proj_b.parameter_count();
  const std::uint64_t closed_form = (768 * 128 + 128) + (256 * 128 + 128);
  o.check(proj == closed_form && proj == 131'328, fmt::format("projection params {}", proj));
  nnet::Mat<float> xa = nnet::Mat<float>::Ones(2, 768), xb = nnet::Mat<float>::Ones(2, 256);
  o.check(model.text.stacked(xa, xb).cols() == 256, "stacked output");
  if (o.pass) o.detail = fmt::format("768->128, 256->128, stacked 256, 2 classes, projection params {}", proj);
  return o;
}

double accuracy(const std::vector<corpus::Label>& truth, const std::vector<corpus::Label>& pred) {
  return metrics::compute_metrics(metrics::confusion(truth, pred)).accuracy;
}

Outcome p5_pipeline() {
  Outcome o;
  auto& st = pipeline();
  const auto t0 = Clock::now();
  std::vector<std::string> log;
  try {
    st.paths = testing::prepare_mock_pipeline(st.dir.path(), 2000, 0.9, 42, &log);
  } catch (const std::exception& e) {
    o.check(false, e.what());
    return o;
  }
  const auto bundle = st.dir / "bundle";
  const auto train = testing::run_cli({"train", "--manifest", st.paths.manifest.string(), "--stores",
                                       st.paths.stores(), "--out", bundle.string(), "--seed", "42"});
  o.check(train.code == 0, "train exit " + std::to_string(train.code) + ": " + train.err);
  const auto eval = testing::run_cli({"evaluate", "--bundle", bundle.string(), "--manifest",
                                      st.paths.manifest.string(), "--stores", st.paths.stores(), "--out",
                                      (st.dir / "eval.csv").string()});
  o.check(eval.code == 0, "evaluate exit " + std::to_string(eval.code) + ": " + eval.err);
  const double secs = seconds_since(t0);
  if (!o.pass) return o;

  const auto model = ensemble::load_bundle(bundle);
  const auto manifest = corpus::read_manifest(st.paths.manifest);
  const auto ta = backbone::read_store(st.paths.text_a), tb = backbone::read_store(st.paths.text_b),
             im = backbone::read_store(st.paths.image);
  const auto p = ensemble::predict_split(model, manifest, {ta, tb, im}, corpus::Split::Test);
  const double fused = accuracy(p.truth, p.fused), text = accuracy(p.truth, p.text),
               image = accuracy(p.truth, p.image);
  o.check(fused >= kMinFusedAccuracy, fmt::format("fused accuracy {:.4f}", fused));
  o.check(fused >= std::max(text, image) - kFusionSlack,
          fmt::format("fused {:.4f} vs best single {:.4f}", fused, std::max(text, image)));
  o.check(secs < kPipelineSeconds, fmt::format("{:.1f}s", secs));
  st.ready = o.pass || fused > 0.0;
  if (o.pass)
    o.detail = fmt::format("test n={} fused {:.4f} text {:.4f} image {:.4f}, {:.1f}s", p.ids.size(), fused, text,
                           image, secs);
  return o;
}

Outcome p6_metrics() {
  Outcome o;
  Rng rng(6);
  for (int trial = 0; trial < 1000 && o.pass; ++trial) {
    std::vector<std::pair<int, int>> raw;
    std::vector<std::pair<corpus::Label, corpus::Label>> pairs;
    const std::size_t n = 1 + rng.below(80);
    const double pt = rng.uniform(), pp = rng.uniform();
    for (std::size_t k = 0; k < n; ++k) {
      const int t = rng.uniform() < pt, q = rng.uniform() < pp;
      raw.emplace_back(t, q);
      pairs.emplace_back(static_cast<corpus::Label>(t), static_cast<corpus::Label>(q));
    }
    const auto m = metrics::compute_metrics(metrics::confusion(pairs));
    const auto r = testing::oracle_metrics(raw);
    auto same = [](const std::optional<double>& got, double want) {
      return std::isnan(want) ? !got.has_value() : (got.has_value() && *got == want);
    };
    bool ok = m.accuracy == r.accuracy;
    for (int c = 0; c < 2; ++c)
      ok = ok && same(m.per_class[c].precision, r.precision[c]) && same(m.per_class[c].recall, r.recall[c]) &&
           same(m.per_class[c].f1, r.f1[c]);
    o.check(ok, fmt::format("oracle mismatch on trial {}", trial));
  }
  metrics::ConfusionMatrix cm;
  cm.counts[1][1] = 50;
  cm.counts[1][0] = 20;
  cm.counts[0][1] = 10;
  cm.counts[0][0] = 120;
  const auto w = metrics::compute_metrics(cm);
  const auto& f = w.of(corpus::Label::Fake);
  o.check(std::abs(w.accuracy - 0.85) <= kMetricTol && std::abs(*f.precision - 0.8333) <= kMetricTol &&
              std::abs(*f.recall - 0.7143) <= kMetricTol && std::abs(*f.f1 - 0.7692) <= kMetricTol,
          fmt::format("worked matrix {} {} {} {}", w.accuracy, *f.precision, *f.recall, *f.f1));
  if (o.pass)
    o.detail = fmt::format("1000 random sets exact; Acc {:.4f} P {:.4f} R {:.4f} F1 {:.4f}", w.accuracy,
                           *f.precision, *f.recall, *f.f1);
  return o;
}

Outcome p7_constants() {
  Outcome o;
  const auto ds = reference::dataset_summaries();
  o.check(ds.size() == 2, "dataset rows");
  if (ds.size() == 2) {
    o.check(ds[0].train_real == 5008 && ds[0].train_fake == 7032 && ds[0].test_real == 1217 &&
                ds[0].test_fake == 2564,
            "twitter counts");
    o.check(ds[1].train_real == 4274 && ds[1].train_fake == 4274 && ds[1].test_real == 475 && ds[1].test_fake == 475,
            "weibo counts");
  }
  const auto top = selection::reference_report().results.front();
  o.check(top.descriptor.name == "NasNet Mobile" && top.parameter_count == 4'269'716 && top.average == 74.31,
          "top backbone row");
  auto acc = [](std::string_view dataset, std::string_view method) {
    for (const auto& r : reference::published_results(dataset))
      if (r.method == method) return r.accuracy;
    return -1.0;
  };
  const std::vector<std::pair<std::string_view, double>> twitter{
      {"EANN", 71.50}, {"MVAE", 74.50}, {"SpotFake", 77.80}, {"Efficient Roberta", 85.30},
      {"Stacked ensemble (published)", 85.80}};
  const std::vector<std::pair<std::string_view, double>> weibo{
      {"EANN", 82.70}, {"MVAE", 82.40}, {"Efficient Roberta", 81.20}, {"Stacked ensemble (published)", 86.83}};
  for (const auto& [m, v] : twitter) o.check(acc("twitter", m) == v, fmt::format("twitter {}", m));
  for (const auto& [m, v] : weibo) o.check(acc("weibo", m) == v, fmt::format("weibo {}", m));
  // The Twitter-shaped fixture reproduces the filtered counts end to end.
  auto fx = testing::twitter_shaped_fixture();
  const auto kept = corpus::filter_multimodal(fx);
  const auto counts = corpus::count_by_split(kept.manifest);
  o.check(counts[0][0] == 5008 && counts[0][1] == 7032 && counts[2][0] == 1217 && counts[2][1] == 2564,
          "fixture counts after filtering");
  if (o.pass) o.detail = "dataset counts, top backbone row and 9 reference accuracies verbatim";
  return o;
}

Outcome p8_selection() {
  Outcome o;
  int in_order = 0;
  std::string orders;
  const std::vector<double> signals{0.1, 0.5, 0.9};
  for (int s = 0; s < kSelectionSeeds; ++s) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(s);
    std::vector<corpus::DatasetManifest> datasets{testing::mock_manifest(400, seed, "d1"),
                                                  testing::mock_manifest(400, seed + 50, "d2")};
    std::vector<std::vector<backbone::EmbeddingStore>> stores(signals.size());
    std::vector<selection::Candidate> cands;
    for (std::size_t c = 0; c < signals.size(); ++c) {
      const auto desc = testing::mock_descriptor(fmt::format("signal-{}", signals[c]), backbone::Modality::Image, 32, 1000);
      for (const auto& d : datasets) stores[c].push_back(backbone::mock_store(desc, d, signals[c], seed));
    }
    for (std::size_t c = 0; c < signals.size(); ++c) {
      selection::Candidate cand{stores[c][0].descriptor(), {}};
      for (const auto& st : stores[c]) cand.stores.push_back(&st);
      cands.push_back(cand);
    }
    selection::SelectionOptions opts;
    opts.budget.seed = seed;
    const auto rep = selection::run_selection(cands, datasets, opts);
    const bool ok = rep.results.size() == 3 && rep.results[0].descriptor.name == "signal-0.9" &&
                    rep.results[1].descriptor.name == "signal-0.5" && rep.results[2].descriptor.name == "signal-0.1";
    in_order += ok;
    orders += fmt::format("{}{}", orders.empty() ? "" : ",", ok ? "ok" : "swapped");
  }
  o.check(in_order >= kSelectionMinInOrder, fmt::format("{} of {} seeds in signal order", in_order, kSelectionSeeds));

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<selection::CandidateResult> rs;
    std::vector<std::pair<double, std::uint64_t>> pts;
    const std::size_t n = 1 + rng.below(30);
    for (std::size_t k = 0; k < n; ++k) {
      selection::CandidateResult r;
      r.descriptor.name = fmt::format("c{}", k);
      r.average = 60.0 + static_cast<double>(rng.below(10));
      r.parameter_count = 1 + rng.below(8);
      pts.emplace_back(r.average, r.parameter_count);
      rs.push_back(r);
    }
    std::vector<bool> got(n, false);
    for (auto idx : selection::pareto_front(rs)) got[idx] = true;
    if (got != testing::brute_force_front(pts)) {
      o.check(false, fmt::format("pareto mismatch on set {}", trial));
      break;
    }
  }
  if (o.pass) o.detail = fmt::format("{} of {} seeds in signal order [{}]; 100 Pareto sets exact", in_order, kSelectionSeeds, orders);
  return o;
}

Outcome p9_formats() {
  Outcome o;
  const std::vector<std::uint8_t> golden = {
      'S', 'F', 'N', 'D', 0x01, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x00,
      0x00, 0x00, 0x00, 0x06, 0x00, 'g', 'o', 'l', 'd', 'e', 'n', 0x01, 0x00, 'a', 0x00, 0x00,
      0x80, 0x3f, 0x00, 0x00, 0x20, 0xc0, 0x01, 0x00, 'b', 0x00, 0x00, 0x00, 0x3f, 0x00, 0x00, 0x00, 0x00};
  backbone::EmbeddingStore g(backbone::BackboneDescriptor{"golden", backbone::Modality::Text, 2, 0,
                                                          backbone::Provenance::Mock});
  g.add("a", std::vector<float>{1.0f, -2.5f});
  g.add("b", std::vector<float>{0.5f, 0.0f});
  o.check(backbone::encode_store(g) == golden, "golden store bytes");
  o.check(backbone::decode_store(golden).same_content(g), "golden decode");

  testing::TempDir dir("p9");
  const auto m = testing::mock_manifest(200, 9);
  const auto s = backbone::mock_store(testing::mock_descriptor("rt", backbone::Modality::Image, 48), m, 0.3, 9);
  backbone::write_store(s, dir / "s.sfnd");
  const auto back = backbone::read_store(dir / "s.sfnd");
  o.check(back.same_content(s) && testing::slurp(dir / "s.sfnd") == [&] {
    const auto b = backbone::encode_store(back);
    return std::string(b.begin(), b.end());
  }(), "store round trip");

  const auto a = backbone::mock_store(testing::mock_descriptor("a", backbone::Modality::Text, 12), m, 0.5, 9);
  const auto b = backbone::mock_store(testing::mock_descriptor("b", backbone::Modality::Text, 10), m, 0.5, 9);
  auto model = ensemble::build_model({a, b, s}, {});
  nnet::TrainConfig cfg;
  cfg.epochs = 2;
  ensemble::train_model(model, m, {a, b, s}, cfg);
  ensemble::save_bundle(model, dir / "b1");
  const auto loaded = ensemble::load_bundle(dir / "b1");
  ensemble::save_bundle(loaded, dir / "b2");
  bool same = nnet::identical(loaded.text.proj_a, model.text.proj_a) &&
              nnet::identical(loaded.text.proj_b, model.text.proj_b) &&
              nnet::identical(loaded.text.head, model.text.head) && nnet::identical(loaded.image_head, model.image_head);
  for (const char* f : {"bundle.json", "text_proj_a.sfnn", "text_proj_b.sfnn", "text_head.sfnn", "image_head.sfnn"})
    same = same && testing::slurp(dir / "b1" / f) == testing::slurp(dir / "b2" / f);
  o.check(same && loaded.fingerprint() == model.fingerprint(), "bundle round trip");
  if (o.pass) o.detail = fmt::format("golden store {} bytes pinned; store and bundle round trips bit-exact", golden.size());
  return o;
}

Outcome p10_preprocess() {
  Outcome o;
  preprocess::ImageTensor t{1, 3, 1, {10.0f, 20.0f, 30.0f}};
  const auto n = preprocess::normalize_minmax(t);
  o.check(n.values == std::vector<float>{0.0f, 0.5f, 1.0f}, "minmax");
  const double d = preprocess::gaussian_density(0.0, 0.0, 1.0);
  o.check(std::abs(d - 0.398942) <= kDensityTol, fmt::format("density {}", d));

  constexpr std::size_t kSamples = 1'000'000;
  const preprocess::GaussianNoiseSpec spec{0.2, 0.1, 10};
  const auto xs = preprocess::sample_noise(spec, kSamples);
  double sum = 0.0, sq = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / kSamples;
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double var = sq / (kSamples - 1);
  // 3-sigma bands for the sample mean and sample variance of a normal draw.
  const double mean_band = 3.0 * spec.sigma / std::sqrt(static_cast<double>(kSamples));
  const double var_band = 3.0 * spec.sigma * spec.sigma * std::sqrt(2.0 / (kSamples - 1));
  o.check(std::abs(mean - spec.mu) <= mean_band, fmt::format("mean {}", mean));
  o.check(std::abs(var - spec.sigma * spec.sigma) <= var_band, fmt::format("variance {}", var));

  Rng text_rng(11);
  const std::string alphabet = "ab :/.\t\n\x01wh.tp";
  for (int i = 0; i < 1000 && o.pass; ++i) {
    std::string s;
    const auto len = text_rng.below(40);
    for (std::size_t k = 0; k < len; ++k) s += alphabet[text_rng.below(alphabet.size())];
    if (text_rng.below(3) == 0) s += " http://t.co/" + std::to_string(i);
    const auto once = preprocess::clean_text(s).text;
    o.check(preprocess::clean_text(once).text == once, "idempotence on '" + s + "'");
  }
  if (o.pass)
    o.detail = fmt::format("density {:.7f}; noise mean {:.5f} var {:.6f} at 1e6 samples; 1000 strings idempotent", d,
                           mean, var);
  return o;
}

Outcome p11_service() {
  Outcome o;
  auto& st = pipeline();
  if (!st.ready) {
    o.check(false, "needs the bundle from the end-to-end run");
    return o;
  }
  const auto manifest = corpus::read_manifest(st.paths.manifest);
  const cli::Service svc(ensemble::load_bundle(st.dir / "bundle"),
                         cli::StoreTrio{backbone::read_store(st.paths.text_a), backbone::read_store(st.paths.text_b),
                                        backbone::read_store(st.paths.image)},
                         manifest);
  cli::HttpServer server(svc);
  const auto port = server.bind("127.0.0.1", 0);
  if (!port) {
    o.check(false, "bind failed");
    return o;
  }
  std::thread loop([&] { server.listen(); });

  constexpr std::size_t kRequests = 100;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < kRequests; ++i) ids.push_back(manifest.items[(i * 7) % manifest.items.size()].id);
  auto call = [&](const std::string& id) -> nlohmann::json {
    httplib::Client client("127.0.0.1", *port);
    client.set_read_timeout(30, 0);
    const auto res = client.Post("/classify", nlohmann::json{{"item_id", id}}.dump(), "application/json");
    if (!res || res->status != 200) return nlohmann::json{{"transport_error", true}};
    return nlohmann::json::parse(res->body);
  };
  std::vector<std::future<nlohmann::json>> pending;
  for (const auto& id : ids) pending.push_back(std::async(std::launch::async, call, id));
  std::vector<nlohmann::json> concurrent;
  for (auto& f : pending) concurrent.push_back(f.get());
  server.stop();
  loop.join();

  std::vector<double> latencies;
  std::size_t mismatches = 0, bad_sums = 0, failures = 0;
  for (std::size_t i = 0; i < kRequests; ++i) {
    const auto& got = concurrent[i];
    if (got.contains("transport_error") || !got.contains("latency_us")) {
      ++failures;
      continue;
    }
    latencies.push_back(got["latency_us"].get<double>());
    const double sum = got["p_real"].get<double>() + got["p_fake"].get<double>();
    bad_sums += std::abs(sum - 1.0) > kProbSumTol;
    const auto serial = svc.classify(nlohmann::json{{"item_id", ids[i]}}.dump()).body;
    mismatches += serial["p_real"] != got["p_real"] || serial["p_fake"] != got["p_fake"] ||
                  serial["label"] != got["label"];
  }
  o.check(failures == 0, fmt::format("{} failed requests", failures));
  o.check(bad_sums == 0, fmt::format("{} probability sums off", bad_sums));
  o.check(mismatches == 0, fmt::format("{} responses differ from serial", mismatches));
  double median = 0.0;
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    const auto k = latencies.size();
    median = k % 2 ? latencies[k / 2] : (latencies[k / 2 - 1] + latencies[k / 2]) / 2.0;
  }
  o.check(median < kMedianLatencyUs, fmt::format("median latency {:.0f} us", median));
  if (o.pass)
    o.detail = fmt::format("{} concurrent requests match serial; median latency {:.0f} us, max {:.0f} us", kRequests,
                           median, latencies.back());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"P1 gradient correctness", p1_gradients},  {"P2 softmax/CE sanity", p2_softmax_ce},
      {"P3 fusion algebra", p3_fusion},           {"P4 shape chain", p4_shapes},
      {"P5 end-to-end mock pipeline", p5_pipeline}, {"P6 metrics oracle", p6_metrics},
      {"P7 published constants", p7_constants},   {"P8 selection harness", p8_selection},
      {"P9 format stability", p9_formats},        {"P10 preprocessing", p10_preprocess},
      {"P11 service contract", p11_service},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s  %s  (%s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
