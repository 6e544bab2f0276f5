// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/ensemble.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"
#include "fndstack/reference.hpp"

namespace fndstack::ensemble {

using nnet::DenseNet;
using nnet::Mat;

namespace {

constexpr double kProbTolerance = 1e-6;

Mat<float> row_of(std::span<const float> v) {
  Mat<float> m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

Probs probs_of_row(const Mat<float>& m, Eigen::Index r) {
  return {static_cast<double>(m(r, 0)), static_cast<double>(m(r, 1))};
}

nlohmann::json descriptor_json(const backbone::BackboneDescriptor& d) {
  return {{"name", d.name},
          {"modality", backbone::to_string(d.modality)},
          {"output_dim", d.output_dim},
          {"parameter_count", d.parameter_count},
          {"provenance", backbone::to_string(d.provenance)}};
}

backbone::BackboneDescriptor descriptor_from_json(const nlohmann::json& j) {
  backbone::BackboneDescriptor d;
  d.name = j.at("name").get<std::string>();
  const auto modality = j.at("modality").get<std::string>();
  if (modality != "text" && modality != "image") throw Error(ErrorCode::InvalidArgument, "modality " + modality);
  d.modality = modality == "text" ? backbone::Modality::Text : backbone::Modality::Image;
  d.output_dim = j.at("output_dim").get<std::uint32_t>();
  d.parameter_count = j.at("parameter_count").get<std::uint64_t>();
  d.provenance = j.at("provenance").get<std::string>() == "imported" ? backbone::Provenance::Imported
                                                                     : backbone::Provenance::Mock;
  return d;
}

backbone::BackboneDescriptor resolved(const backbone::EmbeddingStore& store, backbone::Modality expected,
                                      std::string_view role) {
  const auto& d = store.descriptor();
  if (d.output_dim == 0) throw Error(ErrorCode::DimZero, std::string(role) + " store '" + d.name + "'");
  if (d.modality != expected)
    throw Error(ErrorCode::InvalidArgument, std::string(role) + " store '" + d.name + "' holds " +
                                                std::string(backbone::to_string(d.modality)) + " embeddings");
  if (d.provenance == backbone::Provenance::Imported) return d;
  return backbone::resolve_descriptor(d.name, d.modality, d.output_dim);
}

std::string with_commas(std::uint64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

struct Gathered {
  Mat<float> a, b, img;
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::vector<corpus::Label> truth;
};

Gathered gather(const corpus::DatasetManifest& manifest, const StoreSet& stores, corpus::Split split,
                ErrorCode missing_code) {
  const auto items = manifest.in_split(split);
  Gathered g;
  const auto n = static_cast<Eigen::Index>(items.size());
  g.a.resize(n, static_cast<Eigen::Index>(stores.text_a.dim()));
  g.b.resize(n, static_cast<Eigen::Index>(stores.text_b.dim()));
  g.img.resize(n, static_cast<Eigen::Index>(stores.image.dim()));
  auto fill = [&](Mat<float>& m, Eigen::Index r, const backbone::EmbeddingStore& s, const std::string& id) {
    auto v = s.find(id);
    if (!v) throw Error(missing_code, "item '" + id + "' not in store '" + s.descriptor().name + "'");
    for (std::size_t c = 0; c < v->size(); ++c) m(r, static_cast<Eigen::Index>(c)) = (*v)[c];
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& item = *items[static_cast<std::size_t>(r)];
    fill(g.a, r, stores.text_a, item.id);
    fill(g.b, r, stores.text_b, item.id);
    fill(g.img, r, stores.image, item.id);
    g.labels.push_back(static_cast<int>(corpus::class_index(item.label)));
    g.ids.push_back(item.id);
    g.truth.push_back(item.label);
  }
  return g;
}

nlohmann::json bundle_core(const Model& m) {
  return {{"format", "fndstack-bundle"},
          {"version", 1},
          {"fusion", m.fusion},
          {"head_config", to_json(m.head_config)},
          {"backbones",
           {{"text_a", descriptor_json(m.text_a_descriptor)},
            {"text_b", descriptor_json(m.text_b_descriptor)},
            {"image", descriptor_json(m.image_descriptor)}}},
          {"checkpoints",
           {{"text_proj_a", "text_proj_a.sfnn"},
            {"text_proj_b", "text_proj_b.sfnn"},
            {"text_head", "text_head.sfnn"},
            {"image_head", "image_head.sfnn"}}}};
}

}  // namespace

// ---- configuration --------------------------------------------------------------

nlohmann::json to_json(const HeadConfig& cfg) {
  return {{"text_hidden", cfg.text_hidden},
          {"image_hidden", cfg.image_hidden},
          {"dropout", cfg.dropout},
          {"squash", cfg.squash == nnet::Squash::Softmax ? "softmax" : "sigmoid"},
          {"seed", cfg.seed}};
}

HeadConfig head_config_from_json(const nlohmann::json& j) {
  HeadConfig cfg;
  try {
    if (j.contains("text_hidden")) cfg.text_hidden = j.at("text_hidden").get<std::vector<std::size_t>>();
    if (j.contains("image_hidden")) cfg.image_hidden = j.at("image_hidden").get<std::vector<std::size_t>>();
    if (j.contains("dropout")) cfg.dropout = j.at("dropout").get<double>();
    if (j.contains("squash")) {
      const auto s = j.at("squash").get<std::string>();
      if (s != "softmax" && s != "sigmoid") throw Error(ErrorCode::InvalidArgument, "squash " + s);
      cfg.squash = s == "softmax" ? nnet::Squash::Softmax : nnet::Squash::Sigmoid;
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad head config: ") + e.what());
  }
  return cfg;
}

std::vector<nnet::LayerSpec> projection_layers(std::size_t input_dim) {
  return nnet::NetSpecBuilder(input_dim).dense(kProjectionUnits).build();
}

std::vector<nnet::LayerSpec> text_head_layers(const HeadConfig& cfg) {
  nnet::NetSpecBuilder b(kStackedWidth);
  for (auto units : cfg.text_hidden) b.dense(units, nnet::Activation::ReLU).dropout(cfg.dropout);
  return b.output(corpus::kNumClasses, cfg.squash).build();
}

std::vector<nnet::LayerSpec> image_head_layers(std::size_t image_dim, const HeadConfig& cfg) {
  nnet::NetSpecBuilder b(image_dim);
  for (auto units : cfg.image_hidden) b.dense(units, nnet::Activation::ReLU).dropout(cfg.dropout);
  return b.output(corpus::kNumClasses, cfg.squash).build();
}

// ---- fusion ------------------------------------------------------------------------

void check_probability_vector(const Probs& p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::NotAProbabilityVector, fmt::format("component {} outside [0, 1]", v));
  if (std::abs(p[0] + p[1] - 1.0) > kProbTolerance)
    throw Error(ErrorCode::NotAProbabilityVector, fmt::format("components sum to {}", p[0] + p[1]));
}

corpus::Label decide(const Probs& p) {
  return p[1] >= p[0] ? corpus::Label::Fake : corpus::Label::Real;
}

Decision fuse(const Probs& p_text, const Probs& p_image) {
  check_probability_vector(p_text);
  check_probability_vector(p_image);
  Decision d;
  d.probs = {(p_text[0] + p_image[0]) / 2.0, (p_text[1] + p_image[1]) / 2.0};
  d.label = decide(d.probs);
  return d;
}

// ---- text branch --------------------------------------------------------------------

TextBranch::TextBranch(DenseNet a, DenseNet b, DenseNet h)
    : proj_a(std::move(a)), proj_b(std::move(b)), head(std::move(h)) {
  if (proj_a.output_dim() != kProjectionUnits || proj_b.output_dim() != kProjectionUnits)
    throw Error(ErrorCode::DimMismatch, "text projections must emit 128 values");
  if (head.input_dim() != kStackedWidth || !head.has_output_layer() || head.output_dim() != corpus::kNumClasses)
    throw Error(ErrorCode::DimMismatch, "text head must map 256 stacked values to 2 classes");
}

std::vector<Mat<float>*> TextBranch::parameter_tensors() {
  auto out = proj_a.parameter_tensors();
  for (auto* p : proj_b.parameter_tensors()) out.push_back(p);
  for (auto* p : head.parameter_tensors()) out.push_back(p);
  return out;
}

void TextBranch::set_mode(nnet::Mode m) {
  proj_a.set_mode(m);
  proj_b.set_mode(m);
  head.set_mode(m);
}

Mat<float> TextBranch::stacked(const Mat<float>& a, const Mat<float>& b) const {
  const Mat<float> ya = proj_a.forward(a);
  const Mat<float> yb = proj_b.forward(b);
  Mat<float> s(ya.rows(), ya.cols() + yb.cols());
  s << ya, yb;
  return s;
}

Mat<float> TextBranch::probabilities(std::span<const Mat<float>> inputs) const {
  if (inputs.size() != 2) throw Error(ErrorCode::DimMismatch, "text branch takes two input blocks");
  return head.forward(stacked(inputs[0], inputs[1]));
}

double TextBranch::loss_and_grad(std::span<const Mat<float>> inputs, std::span<const int> labels,
                                 std::uint64_t mask_seed, std::vector<Mat<float>>& grads) {
  if (inputs.size() != 2) throw Error(ErrorCode::DimMismatch, "text branch takes two input blocks");
  DenseNet::Cache ca, cb, ch;
  const Mat<float> ya = proj_a.forward(inputs[0], 0, &ca);
  const Mat<float> yb = proj_b.forward(inputs[1], 0, &cb);
  Mat<float> s(ya.rows(), ya.cols() + yb.cols());
  s << ya, yb;
  head.forward(s, mask_seed, &ch);
  const auto ce = nnet::cross_entropy<float>(ch.logits, labels, head.squash());

  auto gh = head.zero_gradients();
  const Mat<float> ds = head.backward(ch, ce.d_logits, gh);
  auto ga = proj_a.zero_gradients();
  proj_a.backward(ca, ds.leftCols(ya.cols()), ga);
  auto gb = proj_b.zero_gradients();
  proj_b.backward(cb, ds.rightCols(yb.cols()), gb);

  grads.clear();
  for (auto* g : {&ga, &gb, &gh}) {
    for (auto& p : *g) {
      grads.push_back(std::move(p.weight));
      grads.push_back(std::move(p.bias));
    }
  }
  return ce.loss;
}

// ---- model ------------------------------------------------------------------------------

Probs Model::text_probs(std::span<const float> a, std::span<const float> b) const {
  return probs_of_row(text_probs(row_of(a), row_of(b)), 0);
}

Probs Model::image_probs(std::span<const float> img) const {
  return probs_of_row(image_probs(row_of(img)), 0);
}

Decision Model::classify(std::span<const float> a, std::span<const float> b, std::span<const float> img) const {
  return fuse(text_probs(a, b), image_probs(img));
}

Mat<float> Model::text_probs(const Mat<float>& a, const Mat<float>& b) const {
  std::array<Mat<float>, 2> blocks{a, b};
  return text.probabilities(blocks);
}

Mat<float> Model::image_probs(const Mat<float>& img) const { return image_head.forward(img); }

void Model::zero_parameters() {
  text.proj_a.zero_parameters();
  text.proj_b.zero_parameters();
  text.head.zero_parameters();
  image_head.zero_parameters();
}

std::string Model::fingerprint() const {
  std::uint64_t h = fnv1a64(bundle_core(*this).dump());
  for (const auto* net : {&text.proj_a, &text.proj_b, &text.head, &image_head}) {
    const auto bytes = nnet::encode_checkpoint(*net);
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), h);
  }
  return fmt::format("{:016x}", h);
}

Model build_model(const StoreSet& stores, const HeadConfig& cfg, std::span<const std::string> required_ids) {
  Model m;
  m.text_a_descriptor = resolved(stores.text_a, backbone::Modality::Text, "text_a");
  m.text_b_descriptor = resolved(stores.text_b, backbone::Modality::Text, "text_b");
  m.image_descriptor = resolved(stores.image, backbone::Modality::Image, "image");
  m.head_config = cfg;

  const std::array<const backbone::EmbeddingStore*, 3> all{&stores.text_a, &stores.text_b, &stores.image};
  if (required_ids.empty()) {
    const std::unordered_set<std::string> reference(stores.text_a.ids().begin(), stores.text_a.ids().end());
    for (const auto* s : all) {
      const bool same = s->size() == reference.size() &&
                        std::all_of(s->ids().begin(), s->ids().end(),
                                    [&](const std::string& id) { return reference.contains(id); });
      if (!same)
        throw Error(ErrorCode::StoreIdMismatch, "stores '" + stores.text_a.descriptor().name + "' and '" +
                                                    s->descriptor().name + "' cover different items");
    }
  } else {
    for (const auto& id : required_ids)
      for (const auto* s : all)
        if (!s->contains(id))
          throw Error(ErrorCode::StoreIdMismatch, "item '" + id + "' missing from '" + s->descriptor().name + "'");
  }

  m.text = TextBranch(DenseNet(projection_layers(stores.text_a.dim()), derive_seed(cfg.seed, "text_proj_a")),
                      DenseNet(projection_layers(stores.text_b.dim()), derive_seed(cfg.seed, "text_proj_b")),
                      DenseNet(text_head_layers(cfg), derive_seed(cfg.seed, "text_head")));
  m.image_head = DenseNet(image_head_layers(stores.image.dim(), cfg), derive_seed(cfg.seed, "image_head"));
  return m;
}

Probs predict_text(const Model& model, const StoreSet& stores, std::string_view item_id) {
  return model.text_probs(stores.text_a.at(item_id), stores.text_b.at(item_id));
}

Probs predict_image(const Model& model, const StoreSet& stores, std::string_view item_id) {
  return model.image_probs(stores.image.at(item_id));
}

Decision predict(const Model& model, const StoreSet& stores, std::string_view item_id) {
  return fuse(predict_text(model, stores, item_id), predict_image(model, stores, item_id));
}

TrainingReport train_model(Model& model, const corpus::DatasetManifest& manifest, const StoreSet& stores,
                           const nnet::TrainConfig& cfg) {
  const auto train_set = gather(manifest, stores, corpus::Split::Train, ErrorCode::StoreIdMismatch);
  const auto val_set = gather(manifest, stores, corpus::Split::Validation, ErrorCode::StoreIdMismatch);
  if (train_set.labels.empty()) throw Error(ErrorCode::EmptyData, "no items in the train split");

  nnet::TrainConfig text_cfg = cfg, image_cfg = cfg;
  text_cfg.seed = derive_seed(cfg.seed, "text");
  image_cfg.seed = derive_seed(cfg.seed, "image");
  const bool has_val = !val_set.labels.empty();
  if (!has_val) text_cfg.early_stopping = image_cfg.early_stopping = std::nullopt;

  nnet::Dataset<float> text_train{{train_set.a, train_set.b}, train_set.labels};
  nnet::Dataset<float> text_val{{val_set.a, val_set.b}, val_set.labels};
  nnet::Dataset<float> image_train{{train_set.img}, train_set.labels};
  nnet::Dataset<float> image_val{{val_set.img}, val_set.labels};

  using clock = std::chrono::steady_clock;
  TrainingReport report;
  auto t0 = clock::now();
  report.text = nnet::train<float>(model.text, text_train, has_val ? &text_val : nullptr, text_cfg);
  auto t1 = clock::now();
  report.image = nnet::train<float>(model.image_head, image_train, has_val ? &image_val : nullptr, image_cfg);
  auto t2 = clock::now();
  report.text_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.image_seconds = std::chrono::duration<double>(t2 - t1).count();
  return report;
}

SplitPredictions predict_split(const Model& model, const corpus::DatasetManifest& manifest,
                               const StoreSet& stores, corpus::Split split) {
  const auto g = gather(manifest, stores, split, ErrorCode::MissingEmbedding);
  SplitPredictions out;
  out.ids = g.ids;
  out.truth = g.truth;
  if (g.ids.empty()) return out;
  const Mat<float> pt = model.text_probs(g.a, g.b);
  const Mat<float> pi = model.image_probs(g.img);
  for (Eigen::Index r = 0; r < pt.rows(); ++r) {
    const Probs t = probs_of_row(pt, r), i = probs_of_row(pi, r);
    const auto fused = fuse(t, i);
    out.text.push_back(decide(t));
    out.image.push_back(decide(i));
    out.fused.push_back(fused.label);
    out.fused_probs.push_back(fused.probs);
  }
  return out;
}

// ---- ledger ---------------------------------------------------------------------------------

std::uint64_t ParameterLedger::trainable_total() const { return trainable_text() + trainable_image(); }

std::uint64_t ParameterLedger::trainable_text() const {
  std::uint64_t n = 0;
  for (const auto& t : trainable)
    if (t.component.starts_with("text")) n += t.parameters;
  return n;
}

std::uint64_t ParameterLedger::trainable_image() const {
  std::uint64_t n = 0;
  for (const auto& t : trainable)
    if (t.component.starts_with("image")) n += t.parameters;
  return n;
}

std::uint64_t ParameterLedger::imported_total() const { return imported_text() + imported_image(); }

std::uint64_t ParameterLedger::imported_text() const {
  std::uint64_t n = 0;
  for (const auto& i : imported)
    if (i.descriptor.modality == backbone::Modality::Text) n += i.descriptor.parameter_count;
  return n;
}

std::uint64_t ParameterLedger::imported_image() const {
  std::uint64_t n = 0;
  for (const auto& i : imported)
    if (i.descriptor.modality == backbone::Modality::Image) n += i.descriptor.parameter_count;
  return n;
}

ParameterLedger parameter_ledger(const Model& model) {
  ParameterLedger l;
  l.trainable = {{"text_proj_a", model.text.proj_a.parameter_count()},
                 {"text_proj_b", model.text.proj_b.parameter_count()},
                 {"text_head", model.text.head.parameter_count()},
                 {"image_head", model.image_head.parameter_count()}};
  l.imported = {{"text_a", model.text_a_descriptor},
                {"text_b", model.text_b_descriptor},
                {"image", model.image_descriptor}};
  return l;
}

double reduction_pct(std::uint64_t ours, std::uint64_t theirs) {
  return 100.0 * (1.0 - static_cast<double>(ours) / static_cast<double>(theirs));
}

std::string format_ledger(const ParameterLedger& l) {
  std::ostringstream os;
  os << "Trainable parameters\n";
  for (const auto& t : l.trainable) os << fmt::format("  {:<28}{:>16}\n", t.component, with_commas(t.parameters));
  os << fmt::format("  {:<28}{:>16}\n", "text total", with_commas(l.trainable_text()));
  os << fmt::format("  {:<28}{:>16}\n", "image total", with_commas(l.trainable_image()));
  os << fmt::format("  {:<28}{:>16}\n", "trainable total", with_commas(l.trainable_total()));

  os << "\nImported backbones (frozen)\n";
  for (const auto& i : l.imported) {
    const auto& d = i.descriptor;
    os << fmt::format("  {:<8}{:<20}{:<10}{:>6}-d{:>16}\n", i.role, d.name, backbone::to_string(d.provenance),
                      d.output_dim, with_commas(d.parameter_count));
  }
  os << fmt::format("  {:<28}{:>16}\n", "imported text total", with_commas(l.imported_text()));
  os << fmt::format("  {:<28}{:>16}\n", "imported image total", with_commas(l.imported_image()));
  os << fmt::format("  {:<28}{:>16}\n", "imported total", with_commas(l.imported_total()));

  os << "\nPublished parameter comparison\n";
  os << fmt::format("  {:<20}{:<18}{:>14}  {:<28}{:>14}\n", "Method", "Image model", "Parameters", "Text model",
                    "Parameters");
  for (const auto& r : reference::parameter_comparison()) {
    os << fmt::format("  {:<20}{:<18}{:>14}  {:<28}{:>14}\n", r.method, r.image_model,
                      with_commas(r.image_parameters), r.text_model,
                      r.text_parameters ? with_commas(*r.text_parameters) : std::string("NA"));
  }

  if (l.imported_image() > 0 || l.imported_text() > 0) {
    os << "\nReduction of imported parameters vs published systems\n";
    for (const auto& r : reference::parameter_comparison()) {
      if (r.method == "Stacked ensemble") continue;
      if (l.imported_image() > 0)
        os << fmt::format("  image vs {:<18} ({:<18}) {:>7.2f}%\n", r.image_model, r.method,
                          reduction_pct(l.imported_image(), r.image_parameters));
      if (l.imported_text() > 0 && r.text_parameters)
        os << fmt::format("  text  vs {:<18} ({:<18}) {:>7.2f}%\n", r.text_model, r.method,
                          reduction_pct(l.imported_text(), *r.text_parameters));
    }
  }
  return os.str();
}

// ---- bundle ---------------------------------------------------------------------------------

void save_bundle(const Model& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::FileUnreadable, "cannot create " + dir.string() + ": " + ec.message());
  nnet::save_checkpoint(model.text.proj_a, dir / "text_proj_a.sfnn", {{"role", "text_proj_a"}});
  nnet::save_checkpoint(model.text.proj_b, dir / "text_proj_b.sfnn", {{"role", "text_proj_b"}});
  nnet::save_checkpoint(model.text.head, dir / "text_head.sfnn", {{"role", "text_head"}});
  nnet::save_checkpoint(model.image_head, dir / "image_head.sfnn", {{"role", "image_head"}});

  auto manifest = bundle_core(model);
  manifest["fingerprint"] = model.fingerprint();
  std::ofstream(dir / "bundle.json", std::ios::trunc) << manifest.dump(2) << '\n';
  std::ofstream(dir / "ledger.txt", std::ios::trunc) << format_ledger(parameter_ledger(model));
  if (!std::filesystem::exists(dir / "bundle.json"))
    throw Error(ErrorCode::FileUnreadable, "failed to write bundle manifest in " + dir.string());
}

Model load_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "bundle.json");
  if (!in) throw Error(ErrorCode::FileUnreadable, (dir / "bundle.json").string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "fndstack-bundle")
    throw Error(ErrorCode::BadMagic, "not a model bundle: " + dir.string());

  Model m;
  try {
    m.fusion = j.at("fusion").get<std::string>();
    m.head_config = head_config_from_json(j.at("head_config"));
    m.text_a_descriptor = descriptor_from_json(j.at("backbones").at("text_a"));
    m.text_b_descriptor = descriptor_from_json(j.at("backbones").at("text_b"));
    m.image_descriptor = descriptor_from_json(j.at("backbones").at("image"));
    const auto& ck = j.at("checkpoints");
    m.text = TextBranch(nnet::load_checkpoint(dir / ck.at("text_proj_a").get<std::string>()),
                        nnet::load_checkpoint(dir / ck.at("text_proj_b").get<std::string>()),
                        nnet::load_checkpoint(dir / ck.at("text_head").get<std::string>()));
    m.image_head = nnet::load_checkpoint(dir / ck.at("image_head").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadMagic, std::string("bundle manifest: ") + e.what());
  }
  if (m.fusion != "EqualAverage") throw Error(ErrorCode::InvalidArgument, "unknown fusion rule " + m.fusion);
  if (m.text.proj_a.input_dim() != m.text_a_descriptor.output_dim ||
      m.text.proj_b.input_dim() != m.text_b_descriptor.output_dim ||
      m.image_head.input_dim() != m.image_descriptor.output_dim)
    throw Error(ErrorCode::DimMismatch, "bundle checkpoints disagree with backbone widths");
  m.text.set_mode(nnet::Mode::Eval);
  m.image_head.set_mode(nnet::Mode::Eval);
  return m;
}

}  // namespace fndstack::ensemble
