// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/backbone.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"

namespace fndstack::backbone {

namespace {

constexpr std::uint64_t hundredths_of_million(std::uint64_t h) { return h * 10'000; }

std::string normalize_name(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void str16(std::string_view s) {
    if (s.size() > 0xffff) throw Error(ErrorCode::InvalidArgument, "string longer than 65535 bytes");
    uint(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  bool has(std::size_t n) const { return in_.size() - pos_ >= n; }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  std::string str16() {
    const auto n = uint<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw Error(ErrorCode::TruncatedFile,
                             "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_));
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// True when `count` records of width `dim` consume the payload exactly.
bool payload_fits(std::span<const std::uint8_t> payload, std::uint64_t count, std::uint64_t dim) {
  ByteReader r(payload);
  const std::uint64_t row_bytes = dim * 4;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!r.has(2)) return false;
    const auto len = r.uint<std::uint16_t>();
    if (!r.has(len) || r.remaining() - len < row_bytes) return false;
    r.skip(len + row_bytes);
  }
  return r.remaining() == 0;
}

// Called when the payload does not parse at the header width. Looks for a
// different row width that explains the file exactly.
std::optional<std::uint64_t> infer_row_dim(std::span<const std::uint8_t> payload,
                                           std::uint64_t count, std::uint64_t header_dim) {
  if (count == 0 || payload.size() < 2) return std::nullopt;
  const std::uint64_t first_id = payload[0] | (static_cast<std::uint64_t>(payload[1]) << 8);
  if (payload.size() < 2 + first_id) return std::nullopt;
  const std::uint64_t max_dim = (payload.size() - 2 - first_id) / 4;
  for (std::uint64_t d = 1; d <= max_dim; ++d) {
    if (d != header_dim && payload_fits(payload, count, d)) return d;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Modality m) noexcept { return m == Modality::Text ? "text" : "image"; }
std::string_view to_string(Provenance p) noexcept { return p == Provenance::Mock ? "mock" : "imported"; }

EmbeddingStore::EmbeddingStore(BackboneDescriptor descriptor) : descriptor_(std::move(descriptor)) {}

void EmbeddingStore::add(std::string item_id, std::span<const float> vector) {
  if (vector.size() != dim())
    throw Error(ErrorCode::DimMismatch, "store '" + descriptor_.name + "' has dim " +
                                            std::to_string(dim()) + ", record '" + item_id +
                                            "' has " + std::to_string(vector.size()));
  if (!std::all_of(vector.begin(), vector.end(), [](float v) { return std::isfinite(v); }))
    throw Error(ErrorCode::NonFinite, "record '" + item_id + "' has a non-finite component");
  if (index_.contains(item_id)) throw Error(ErrorCode::DuplicateId, item_id);
  index_.emplace(item_id, ids_.size());
  ids_.push_back(std::move(item_id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

bool EmbeddingStore::contains(std::string_view item_id) const {
  return index_.contains(std::string(item_id));
}

std::optional<std::span<const float>> EmbeddingStore::find(std::string_view item_id) const {
  auto it = index_.find(std::string(item_id));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

std::span<const float> EmbeddingStore::at(std::string_view item_id) const {
  auto v = find(item_id);
  if (!v) throw Error(ErrorCode::MissingEmbedding,
                      "item '" + std::string(item_id) + "' not in store '" + descriptor_.name + "'");
  return *v;
}

bool EmbeddingStore::same_content(const EmbeddingStore& other) const {
  return descriptor_.name == other.descriptor_.name &&
         descriptor_.modality == other.descriptor_.modality &&
         descriptor_.output_dim == other.descriptor_.output_dim && ids_ == other.ids_ &&
         data_.size() == other.data_.size() &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store) {
  std::vector<std::uint8_t> out;
  out.reserve(32 + store.size() * (16 + store.dim() * 4));
  ByteWriter w(out);
  w.raw("SFND");
  w.uint(kStoreFormatVersion);
  w.uint(static_cast<std::uint8_t>(store.descriptor().modality));
  w.uint(store.descriptor().output_dim);
  w.uint(static_cast<std::uint64_t>(store.size()));
  w.str16(store.descriptor().name);
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.str16(store.ids()[i]);
    for (float v : store.row(i)) w.f32(v);
  }
  return out;
}

EmbeddingStore decode_store(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.has(4)) throw Error(ErrorCode::TruncatedFile, "file shorter than the magic");
  if (std::memcmp(bytes.data(), "SFND", 4) != 0) throw Error(ErrorCode::BadMagic, "expected 'SFND'");
  r.skip(4);
  const auto version = r.uint<std::uint16_t>();
  if (version != kStoreFormatVersion)
    throw Error(ErrorCode::BadMagic, "unsupported format version " + std::to_string(version));
  const auto modality_byte = r.uint<std::uint8_t>();
  if (modality_byte > 1)
    throw Error(ErrorCode::BadMagic, "unknown modality " + std::to_string(modality_byte));
  const auto dim = r.uint<std::uint32_t>();
  const auto count = r.uint<std::uint64_t>();
  std::string name = r.str16();

  const auto payload = bytes.subspan(r.pos());
  // A payload that does not parse at the header width is either a row-width
  // mismatch or truncation; the sequential parse below reports the latter.
  if (!payload_fits(payload, count, dim)) {
    if (auto actual = infer_row_dim(payload, count, dim))
      throw Error(ErrorCode::DimMismatch, "header dim " + std::to_string(dim) +
                                              " but rows hold " + std::to_string(*actual) + " values");
  }

  EmbeddingStore store(resolve_descriptor(std::move(name), static_cast<Modality>(modality_byte), dim));
  std::vector<float> row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id = r.str16();
    for (auto& v : row) v = r.f32();
    store.add(std::move(id), row);
  }
  if (r.remaining() != 0)
    throw Error(ErrorCode::DimMismatch, std::to_string(r.remaining()) +
                                            " trailing bytes after the last record");
  return store;
}

void write_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  const auto bytes = encode_store(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileUnreadable, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::FileUnreadable, "write failed: " + path.string());
}

EmbeddingStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_store(bytes);
}

BackboneDescriptor resolve_descriptor(std::string name, Modality modality, std::uint32_t dim) {
  if (auto known = find_descriptor(name); known && known->modality == modality) {
    if (modality == Modality::Text && known->output_dim != dim)
      throw Error(ErrorCode::DimMismatch, name + " emits " + std::to_string(known->output_dim) +
                                              "-d vectors, store has " + std::to_string(dim));
    known->name = std::move(name);
    known->output_dim = dim;
    return *known;
  }
  return {std::move(name), modality, dim, 0, Provenance::Mock};
}

const std::vector<BackboneDescriptor>& catalog_descriptors() {
  static const std::vector<BackboneDescriptor> registry = [] {
    auto image = [](const char* name, std::uint32_t dim, std::uint64_t params) {
      return BackboneDescriptor{name, Modality::Image, dim, params, Provenance::Imported};
    };
    auto text = [](const char* name, std::uint32_t dim, std::uint64_t params) {
      return BackboneDescriptor{name, Modality::Text, dim, params, Provenance::Imported};
    };
    // Image widths are the global-average-pooled feature widths of the Keras
    // application models. Parameter counts are the published model sizes;
    // NASNet Mobile carries its exact count.
    return std::vector<BackboneDescriptor>{
        text("BERT-Small", 768, 30'000'000),
        text("ELECTRA-Small", 256, 14'000'000),
        image("Xception", 2048, hundredths_of_million(2290)),
        image("MobileNet", 1024, hundredths_of_million(430)),
        image("MobileNet V2", 1280, hundredths_of_million(350)),
        image("MobileNet V3 Large", 960, hundredths_of_million(540)),
        image("ResNet101", 2048, hundredths_of_million(4470)),
        image("ResNet 101 V2", 2048, hundredths_of_million(4470)),
        image("ResNet 152 V2", 2048, hundredths_of_million(6040)),
        image("ResNet50 V2", 2048, hundredths_of_million(2560)),
        image("InceptionResNetV2", 1536, hundredths_of_million(5590)),
        image("EfficientNetB0", 1280, hundredths_of_million(530)),
        image("EfficientNetB7", 2560, hundredths_of_million(6670)),
        image("VGG 16", 512, hundredths_of_million(13840)),
        image("VGG 19", 512, hundredths_of_million(14370)),
        image("NASNet Mobile", 1056, 4'269'716),
        image("DenseNet 121", 1024, hundredths_of_million(810)),
        image("DenseNet 169", 1664, hundredths_of_million(1430)),
        image("DenseNet 201", 1920, hundredths_of_million(2020)),
    };
  }();
  return registry;
}

std::optional<BackboneDescriptor> find_descriptor(std::string_view name) {
  const auto key = normalize_name(name);
  for (const auto& d : catalog_descriptors())
    if (normalize_name(d.name) == key) return d;
  return std::nullopt;
}

std::vector<float> label_direction(corpus::Label label, std::size_t dim) {
  std::vector<float> v(dim, 0.0f);
  if (dim > 0) v[0] = label == corpus::Label::Real ? 1.0f : -1.0f;
  return v;
}

EmbeddingRecord mock_embed(const BackboneDescriptor& descriptor, const corpus::NewsItem& item,
                           double signal, std::uint64_t seed) {
  if (descriptor.provenance != Provenance::Mock)
    throw Error(ErrorCode::InvalidArgument, "mock_embed needs a Mock descriptor");
  if (!(signal >= 0.0 && signal <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "signal must lie in [0, 1]");
  if (descriptor.output_dim == 0) throw Error(ErrorCode::DimZero, descriptor.name);

  Rng rng(mix_seed(derive_seed(seed, descriptor.name), fnv1a64(item.id)));
  const auto direction = label_direction(item.label, descriptor.output_dim);
  EmbeddingRecord rec{item.id, std::vector<float>(descriptor.output_dim)};
  for (std::size_t i = 0; i < rec.vector.size(); ++i) {
    rec.vector[i] = static_cast<float>(signal * direction[i] + (1.0 - signal) * rng.normal());
  }
  return rec;
}

EmbeddingStore mock_store(const BackboneDescriptor& descriptor,
                          const corpus::DatasetManifest& manifest, double signal,
                          std::uint64_t seed) {
  EmbeddingStore store(descriptor);
  for (const auto& item : manifest.items) store.add(mock_embed(descriptor, item, signal, seed));
  return store;
}

}  // namespace fndstack::backbone
