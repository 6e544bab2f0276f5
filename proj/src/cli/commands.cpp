// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fndstack/backbone.hpp"
#include "fndstack/cli/service.hpp"
#include "fndstack/corpus.hpp"
#include "fndstack/ensemble.hpp"
#include "fndstack/metrics.hpp"
#include "fndstack/preprocess.hpp"
#include "fndstack/random.hpp"
#include "fndstack/reference.hpp"
#include "fndstack/selection.hpp"

namespace fndstack::cli {

namespace {

namespace fs = std::filesystem;

// A failure whose exit code depends on the phase it happened in.
struct Failure {
  int exit;
  std::string code;
  std::string message;
};

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
};

using Handler = std::function<int(Context&)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  Handler handler;
};

OptionSpec opt(std::string key, std::string help, std::optional<std::string> fallback = std::nullopt) {
  return {std::move(key), std::move(help), std::move(fallback), false};
}
OptionSpec flag(std::string key, std::string help) { return {std::move(key), std::move(help), "false", true}; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(ErrorCode::FileUnreadable, "cannot write " + path.string());
}

corpus::SplitScheme scheme_of(const RunConfig& cfg) {
  const auto s = cfg.str("split-scheme");
  auto scheme = corpus::parse_split_scheme(s);
  if (!scheme) throw Error(ErrorCode::InvalidArgument, "unknown split scheme '" + s + "' (75-25, 7-1-2, preassigned)");
  return *scheme;
}

backbone::Modality modality_of(const std::string& s) {
  if (s == "text") return backbone::Modality::Text;
  if (s == "image") return backbone::Modality::Image;
  throw Error(ErrorCode::InvalidArgument, "modality must be text or image, got '" + s + "'");
}

void print_counts(std::ostream& out, const corpus::DatasetManifest& m) {
  const auto counts = corpus::count_by_split(m);
  constexpr const char* names[] = {"train", "val", "test", "unassigned"};
  for (std::size_t s = 0; s < 4; ++s) {
    if (s == 3 && counts[3][0] + counts[3][1] == 0) continue;
    out << fmt::format("{}: real={} fake={}\n", names[s], counts[s][0], counts[s][1]);
  }
}

// Store problems in model commands are mismatches (exit 3), whatever the cause.
StoreTrio load_trio(const RunConfig& cfg) {
  const auto paths = cfg.list("stores");
  if (paths.size() != 3)
    throw Failure{kExitMismatch, "MissingEmbedding",
                  fmt::format("--stores needs text_a,text_b,image paths; got {}", paths.size())};
  try {
    return StoreTrio{backbone::read_store(paths[0]), backbone::read_store(paths[1]), backbone::read_store(paths[2])};
  } catch (const Error& e) {
    throw Failure{kExitMismatch, std::string(error_code_name(e.code())), e.what()};
  }
}

nlohmann::json history_json(const nnet::TrainResult& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.history) {
    nlohmann::json j = {{"train_loss", e.train_loss}, {"train_accuracy", e.train_accuracy}};
    if (e.val_loss) j["val_loss"] = *e.val_loss;
    if (e.val_accuracy) j["val_accuracy"] = *e.val_accuracy;
    epochs.push_back(std::move(j));
  }
  return {{"epochs", epochs}, {"best_epoch", r.best_epoch}, {"stopped_early", r.stopped_early}};
}

double accuracy_of(const std::vector<corpus::Label>& truth, const std::vector<corpus::Label>& pred) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  return truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
}

// ---- commands -------------------------------------------------------------------------

int cmd_ingest(Context& c) {
  const auto& cfg = c.cfg;
  auto loaded = corpus::load_manifest(cfg.str("manifest"), {.strict = cfg.flag("strict")});
  if (loaded.manifest.items.empty())
    throw Error(ErrorCode::EmptyManifest, "no records in " + cfg.str("manifest"));
  auto filtered = corpus::filter_multimodal(loaded.manifest);
  auto manifest = corpus::assign_splits(filtered.manifest, scheme_of(cfg), cfg.u64("seed"));

  print_counts(c.out, manifest);
  const auto& d = filtered.report;
  c.out << fmt::format("dropped: missing_text={} missing_image={} animated_or_video={} total={}\n", d.missing_text,
                       d.missing_image, d.animated_or_video, d.total());
  c.out << fmt::format("rejected: {}\n", loaded.rejected);

  if (auto out = cfg.maybe("out")) corpus::save_manifest(manifest, *out);
  if (auto report = cfg.maybe("drop-report")) {
    nlohmann::json j = {{"missing_text", d.missing_text},
                        {"missing_image", d.missing_image},
                        {"animated_or_video", d.animated_or_video},
                        {"total", d.total()},
                        {"rejected_lines", loaded.rejected_lines}};
    write_text(*report, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_preprocess(Context& c) {
  auto manifest = corpus::read_manifest(c.cfg.str("manifest"));
  std::size_t removals = 0, changed = 0;
  for (auto& item : manifest.items) {
    auto cleaned = preprocess::clean_text(item.text);
    removals += cleaned.removals;
    changed += cleaned.text != item.text;
    item.text = std::move(cleaned.text);
  }
  corpus::save_manifest(manifest, c.cfg.str("out"));
  c.out << fmt::format("cleaned: items={} changed={} removals={}\n", manifest.items.size(), changed, removals);
  return kExitOk;
}

int cmd_mock_corpus(Context& c) {
  const auto& cfg = c.cfg;
  const auto count = cfg.u64("count");
  const double fake_fraction = cfg.real("fake-fraction");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "--count must be positive");
  if (!(fake_fraction >= 0.0 && fake_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "--fake-fraction must lie in [0, 1]");

  static constexpr std::string_view kWords[] = {"breaking", "storm",  "city",   "official", "report", "photo",
                                                "flood",    "shark",  "street", "crowd",    "claims", "video",
                                                "bridge",   "rescue", "police", "viral",    "today",  "update"};
  Rng rng(derive_seed(cfg.u64("seed"), "mock-corpus"));
  corpus::DatasetManifest m;
  m.name = cfg.str("name");
  m.source_notes = "synthetic";
  for (std::uint64_t i = 0; i < count; ++i) {
    corpus::NewsItem item;
    item.id = fmt::format("{}-{:06d}", m.name, i);
    item.label = rng.uniform() < fake_fraction ? corpus::Label::Fake : corpus::Label::Real;
    const auto words = 6 + rng.below(10);
    for (std::uint64_t w = 0; w < words; ++w) {
      if (w) item.text += ' ';
      item.text += kWords[rng.below(std::size(kWords))];
    }
    item.text += fmt::format(" #{}", i);
    if (rng.uniform() < 0.1) item.text += fmt::format(" http://t.co/{:x}", rng.next_u64() & 0xffffff);
    item.image_ref = fmt::format("images/{}.jpg", item.id);
    m.items.push_back(std::move(item));
  }
  m = corpus::assign_splits(m, scheme_of(cfg), cfg.u64("seed"));
  corpus::save_manifest(m, cfg.str("out"));
  print_counts(c.out, m);
  return kExitOk;
}

int cmd_mock_embed(Context& c) {
  const auto& cfg = c.cfg;
  const auto manifest = corpus::read_manifest(cfg.str("manifest"));
  backbone::BackboneDescriptor d;
  d.name = cfg.str("backbone");
  d.modality = modality_of(cfg.str("modality"));
  d.output_dim = static_cast<std::uint32_t>(cfg.u64("dim"));
  d.provenance = backbone::Provenance::Mock;
  if (backbone::find_descriptor(d.name))
    c.err << "warning: '" << d.name << "' is a registered backbone; readers will treat this mock store as imported\n";
  const auto store = backbone::mock_store(d, manifest, cfg.real("signal"), cfg.u64("seed"));
  backbone::write_store(store, cfg.str("out"));
  c.out << fmt::format("store: name={} modality={} dim={} records={}\n", d.name, backbone::to_string(d.modality),
                       d.output_dim, store.size());
  return kExitOk;
}

nnet::TrainConfig train_config(const RunConfig& cfg) {
  nnet::TrainConfig t;
  t.adam.lr = cfg.real("lr");
  t.batch_size = cfg.u64("batch-size");
  t.epochs = cfg.u64("epochs");
  t.seed = cfg.u64("seed");
  nnet::validate(t);
  return t;
}

int cmd_train(Context& c) {
  const auto& cfg = c.cfg;
  const auto manifest = corpus::read_manifest(cfg.str("manifest"));
  auto tcfg = train_config(cfg);
  if (const auto patience = cfg.u64("patience"); patience > 0) tcfg.early_stopping = nnet::EarlyStopping{patience};

  ensemble::HeadConfig head;
  head.seed = cfg.u64("seed");
  head.dropout = cfg.real("dropout");
  const auto squash = cfg.str("squash");
  if (squash != "softmax" && squash != "sigmoid")
    throw Error(ErrorCode::InvalidArgument, "--squash must be softmax or sigmoid");
  head.squash = squash == "softmax" ? nnet::Squash::Softmax : nnet::Squash::Sigmoid;

  const auto stores = load_trio(cfg);
  std::vector<std::string> ids;
  for (const auto& item : manifest.items)
    if (item.split) ids.push_back(item.id);

  ensemble::Model model;
  ensemble::TrainingReport report;
  try {
    model = ensemble::build_model(stores.view(), head, ids);
  } catch (const Error& e) {
    throw Failure{exit_code_for(e.code()), std::string(error_code_name(e.code())), e.what()};
  }
  try {
    report = ensemble::train_model(model, manifest, stores.view(), tcfg);
  } catch (const Error& e) {
    const int code = exit_code_for(e.code()) == kExitMismatch ? kExitMismatch : kExitTraining;
    throw Failure{code, std::string(error_code_name(e.code())), e.what()};
  }
  for (const auto* h : {&report.text, &report.image})
    for (const auto& e : h->history)
      if (!std::isfinite(e.train_loss)) throw Failure{kExitTraining, "NonFinite", "training loss diverged"};

  const fs::path out = cfg.str("out");
  ensemble::save_bundle(model, out);
  nlohmann::json hist = {{"train_config", nnet::to_json(tcfg)},
                         {"text", history_json(report.text)},
                         {"image", history_json(report.image)}};
  write_text(out / "history.json", hist.dump(2) + "\n");

  for (const auto& [name, r] : {std::pair{"text", &report.text}, std::pair{"image", &report.image}}) {
    for (std::size_t e = 0; e < r->history.size(); ++e) {
      const auto& s = r->history[e];
      c.out << fmt::format("{} epoch {:>2}: train_loss={:.4f} train_acc={:.4f}", name, e + 1, s.train_loss,
                           s.train_accuracy);
      if (s.val_loss) c.out << fmt::format(" val_loss={:.4f} val_acc={:.4f}", *s.val_loss, *s.val_accuracy);
      c.out << '\n';
    }
    c.out << fmt::format("{} best epoch: {}{}\n", name, r->best_epoch + 1, r->stopped_early ? " (early stop)" : "");
  }
  c.out << fmt::format("training time: text={:.3f}s image={:.3f}s total={:.3f}s\n", report.text_seconds,
                       report.image_seconds, report.text_seconds + report.image_seconds);

  const auto test = ensemble::predict_split(model, manifest, stores.view(), corpus::Split::Test);
  if (!test.ids.empty())
    c.out << fmt::format("test accuracy: fused={:.4f} text={:.4f} image={:.4f} (n={})\n",
                         accuracy_of(test.truth, test.fused), accuracy_of(test.truth, test.text),
                         accuracy_of(test.truth, test.image), test.ids.size());
  c.out << "fingerprint: " << model.fingerprint() << "\n\n";
  c.out << ensemble::format_ledger(ensemble::parameter_ledger(model));
  return kExitOk;
}

int cmd_evaluate(Context& c) {
  const auto& cfg = c.cfg;
  const auto model = ensemble::load_bundle(cfg.str("bundle"));
  const auto manifest = corpus::read_manifest(cfg.str("manifest"));
  const auto stores = load_trio(cfg);
  if (stores.text_a.dim() != model.text.proj_a.input_dim() || stores.text_b.dim() != model.text.proj_b.input_dim() ||
      stores.image.dim() != model.image_head.input_dim())
    throw Error(ErrorCode::DimMismatch, "stores disagree with the bundle's backbone widths");

  const auto split_name = cfg.str("split");
  const auto split = corpus::parse_split(split_name);
  if (!split) throw Error(ErrorCode::InvalidArgument, "unknown split '" + split_name + "'");
  const auto preds = ensemble::predict_split(model, manifest, stores.view(), *split);
  if (preds.ids.empty()) throw Error(ErrorCode::EmptyPredictions, "no items in split " + split_name);

  const auto method = cfg.str("method");
  std::vector<metrics::ComputedRow> rows = {
      {method + " (fused)", metrics::compute_metrics(metrics::confusion(preds.truth, preds.fused))},
      {method + " (text only)", metrics::compute_metrics(metrics::confusion(preds.truth, preds.text))},
      {method + " (image only)", metrics::compute_metrics(metrics::confusion(preds.truth, preds.image))}};
  const auto dataset = cfg.maybe("dataset").value_or(manifest.name);
  const auto report = metrics::comparison_report(rows, dataset, cfg.flag("include-reference"));

  c.out << fmt::format("dataset: {} split: {} items: {}\n", dataset, split_name, preds.ids.size());
  c.out << report.table;
  if (auto path = cfg.maybe("out")) write_text(*path, report.csv);
  else c.out << '\n' << report.csv;
  return kExitOk;
}

selection::SelectionReport live_selection(const RunConfig& cfg, std::ostream& out) {
  const fs::path spec_path = cfg.str("spec");
  std::ifstream in(spec_path);
  if (!in) throw Error(ErrorCode::FileUnreadable, spec_path.string());
  const auto spec = nlohmann::json::parse(in, nullptr, false);
  if (spec.is_discarded() || !spec.is_object() || !spec.contains("datasets") || !spec.contains("candidates"))
    throw Error(ErrorCode::MalformedRecord, "selection spec needs 'datasets' and 'candidates'");
  const auto base = spec_path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  std::vector<corpus::DatasetManifest> datasets;
  std::vector<std::vector<backbone::EmbeddingStore>> stores;
  std::vector<selection::Candidate> candidates;
  try {
    for (const auto& d : spec.at("datasets")) datasets.push_back(corpus::read_manifest(resolve(d.get<std::string>())));
    for (const auto& cj : spec.at("candidates")) {
      auto& owned = stores.emplace_back();
      for (const auto& p : cj.at("stores")) owned.push_back(backbone::read_store(resolve(p.get<std::string>())));
    }
    std::size_t i = 0;
    for (const auto& cj : spec.at("candidates")) {
      auto& owned = stores[i++];
      if (owned.empty()) throw Error(ErrorCode::StoreIdMismatch, "candidate without stores");
      selection::Candidate cand;
      cand.descriptor = owned.front().descriptor();
      for (const auto& s : owned) {
        if (s.dim() != cand.descriptor.output_dim)
          throw Error(ErrorCode::DimMismatch, "candidate stores differ in width: " + s.descriptor().name);
        cand.stores.push_back(&s);
      }
      if (cj.contains("name")) cand.descriptor.name = cj.at("name").get<std::string>();
      if (cj.contains("params")) cand.descriptor.parameter_count = cj.at("params").get<std::uint64_t>();
      candidates.push_back(std::move(cand));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("selection spec: ") + e.what());
  }

  selection::SelectionOptions opts;
  opts.budget = train_config(cfg);
  opts.threads = cfg.u64("threads");
  out << fmt::format("candidates: {} datasets: {} budget: epochs={} batch={} lr={}\n", candidates.size(),
                     datasets.size(), opts.budget.epochs, opts.budget.batch_size, opts.budget.adam.lr);
  return selection::run_selection(candidates, datasets, opts);
}

int cmd_select(Context& c) {
  const auto& cfg = c.cfg;
  selection::SelectionReport report;
  if (cfg.flag("reference")) {
    c.out << "Published image-backbone study\n" << selection::format_study_table() << '\n';
    c.out << "Published top candidates (validation accuracy after 3 epochs, averaged)\n";
    report = selection::reference_report();
  } else {
    if (!cfg.maybe("spec")) throw Error(ErrorCode::InvalidArgument, "select needs --spec FILE or --reference");
    report = live_selection(cfg, c.out);
  }
  const auto table = selection::format_report(report);
  c.out << table;
  if (auto dir = cfg.maybe("out-dir")) {
    write_text(fs::path(*dir) / "selection.txt", table);
    write_text(fs::path(*dir) / "selection.csv", selection::report_csv(report));
    write_text(fs::path(*dir) / "selection_plot.csv", selection::plot_csv(report));
  }
  return kExitOk;
}

int cmd_serve(Context& c) {
  const auto& cfg = c.cfg;
  const auto [host, port] = parse_bind(cfg.str("bind"));
  auto model = ensemble::load_bundle(cfg.str("bundle"));
  std::optional<StoreTrio> stores;
  if (cfg.maybe("stores")) stores = load_trio(cfg);
  std::optional<corpus::DatasetManifest> manifest;
  if (auto m = cfg.maybe("manifest")) manifest = corpus::read_manifest(*m);

  const Service service(std::move(model), std::move(stores), std::move(manifest));
  HttpServer server(service);
  const auto bound = server.bind(host, port);
  if (!bound) throw Failure{kExitServing, "BindFailed", "cannot bind " + cfg.str("bind")};
  c.err << fmt::format("serving model {} on {}:{}\n", service.fingerprint(), host, *bound);
  c.err.flush();
  server.listen();
  return kExitOk;
}

int cmd_catalog(Context& c) {
  c.out << fmt::format("{:<20}{:<8}{:>8}{:>16}\n", "Backbone", "Kind", "Dim", "Parameters");
  for (const auto& d : backbone::catalog_descriptors())
    c.out << fmt::format("{:<20}{:<8}{:>8}{:>16}\n", d.name, backbone::to_string(d.modality), d.output_dim,
                         d.parameter_count);
  c.out << "\nDatasets\n";
  for (const auto& s : reference::dataset_summaries())
    c.out << fmt::format("{:<10} train: real={} fake={}  test: real={} fake={}\n", s.dataset, s.train_real,
                         s.train_fake, s.test_real, s.test_fake);
  return kExitOk;
}

std::vector<Command> commands() {
  const auto seed = opt("seed", "global seed; components derive sub-seeds by name", "42");
  const auto manifest = opt("manifest", "line-delimited JSON manifest");
  const auto stores = opt("stores", "embedding stores: text_a,text_b,image");
  return {
      {"ingest",
       "filter a manifest to complete multimodal items and assign splits",
       {manifest, opt("out", "filtered manifest path"), opt("split-scheme", "75-25, 7-1-2 or preassigned", "preassigned"),
        flag("strict", "fail on the first malformed record"), opt("drop-report", "JSON drop report path"), seed},
       cmd_ingest},
      {"preprocess", "clean manifest text (control characters, URLs, whitespace)",
       {manifest, opt("out", "cleaned manifest path"), seed}, cmd_preprocess},
      {"mock-corpus",
       "write a synthetic manifest",
       {opt("out", "manifest path"), opt("count", "number of items", "2000"), opt("fake-fraction", "share of fake items", "0.5"),
        opt("split-scheme", "75-25, 7-1-2 or preassigned", "7-1-2"), opt("name", "dataset name", "mock"), seed},
       cmd_mock_corpus},
      {"mock-embed",
       "write a deterministic mock embedding store with an injected label signal",
       {manifest, opt("out", "store path"), opt("backbone", "backbone name"), opt("modality", "text or image", "text"),
        opt("dim", "vector width", "64"), opt("signal", "label signal in [0, 1]", "0.9"), seed},
       cmd_mock_embed},
      {"train",
       "train the text and image heads and write a model bundle",
       {manifest, stores, opt("out", "bundle directory", "bundle"), opt("epochs", "maximum epochs", "30"),
        opt("patience", "early-stopping patience on validation loss (0 = off)", "3"),
        opt("batch-size", "mini-batch size", "8"), opt("lr", "Adam learning rate", "0.001"),
        opt("dropout", "dropout rate in the heads", "0.3"), opt("squash", "softmax or sigmoid", "softmax"), seed},
       cmd_train},
      {"evaluate",
       "score a bundle on one split and print the comparison table",
       {opt("bundle", "bundle directory", "bundle"), manifest, stores, opt("split", "train, val or test", "test"),
        opt("dataset", "reference dataset (twitter or weibo); defaults to the manifest name"),
        flag("include-reference", "add published rows"), opt("out", "CSV path"),
        opt("method", "row label prefix", "fndstack"), seed},
       cmd_evaluate},
      {"select",
       "rank candidate image backbones by validation accuracy against parameters",
       {opt("spec", "selection spec JSON"), flag("reference", "render the published study instead"),
        opt("out-dir", "report directory"), opt("epochs", "training budget in epochs", "3"),
        opt("batch-size", "mini-batch size", "8"), opt("lr", "Adam learning rate", "0.001"),
        opt("threads", "candidates trained concurrently", "1"), seed},
       cmd_select},
      {"serve",
       "serve a bundle over HTTP",
       {opt("bundle", "bundle directory", "bundle"), opt("bind", "host:port", "127.0.0.1:8080"), stores, manifest, seed},
       cmd_serve},
      {"catalog", "list registered backbones and dataset sizes", {seed}, cmd_catalog},
  };
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Multimodal fake-news stacked ensemble"};
  app.require_subcommand(1);
  const auto cmds = commands();

  std::map<std::string, std::map<std::string, std::string>> captured;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, bool>> switches;
  std::map<std::string, std::string> config_path;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path[cmd.name], "JSON config file");
    for (const auto& o : cmd.options) {
      if (o.is_flag) {
        sub->add_flag("--" + o.key, switches[cmd.name][o.key], o.help);
      } else {
        auto* added = sub->add_option("--" + o.key, raw[cmd.name][o.key], o.help);
        if (o.fallback) added->description(o.help + " [" + *o.fallback + "]");
      }
    }
  }

  std::vector<std::string> argv_store{"fndstack"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitInput;
  }

  for (const auto& cmd : cmds) {
    auto* sub = app.get_subcommand(cmd.name);
    if (!sub->parsed()) continue;
    std::map<std::string, std::string> flags;
    for (const auto& o : cmd.options) {
      if (sub->count("--" + o.key) == 0) continue;
      flags[o.key] = o.is_flag ? "true" : raw[cmd.name][o.key];
    }
    try {
      std::optional<fs::path> config_file;
      if (sub->count("--config")) config_file = config_path[cmd.name];
      else if (auto e = env ? env("FNDSTACK_CONFIG") : std::nullopt) config_file = *e;
      const auto cfg = resolve_config(cmd.name, cmd.options, flags, env, config_file);
      err << "config " << cfg.describe().dump() << '\n';
      Context ctx{cfg, out, err};
      return cmd.handler(ctx);
    } catch (const Failure& f) {
      err << "error: " << f.code << ": " << f.message << '\n';
      return f.exit;
    } catch (const Error& e) {
      err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: FileUnreadable: " << e.what() << '\n';
      return kExitInput;
    }
  }
  return kExitInput;
}

}  // namespace fndstack::cli
