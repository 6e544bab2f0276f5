// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fndstack/corpus.hpp"

namespace fndstack::backbone {

enum class Modality : std::uint8_t { Text = 0, Image = 1 };
enum class Provenance : std::uint8_t { Mock, Imported };

std::string_view to_string(Modality m) noexcept;
std::string_view to_string(Provenance p) noexcept;

struct BackboneDescriptor {
  std::string name;
  Modality modality = Modality::Text;
  std::uint32_t output_dim = 0;
  std::uint64_t parameter_count = 0;
  Provenance provenance = Provenance::Mock;

  bool operator==(const BackboneDescriptor&) const = default;
};

struct EmbeddingRecord {
  std::string item_id;
  std::vector<float> vector;
};

/// Fixed-dimension vectors keyed by item id. Records keep insertion order,
/// which is also the on-disk order.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(BackboneDescriptor descriptor);

  const BackboneDescriptor& descriptor() const noexcept { return descriptor_; }
  std::size_t dim() const noexcept { return descriptor_.output_dim; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  /// Throws DimMismatch, NonFinite or DuplicateId.
  void add(std::string item_id, std::span<const float> vector);
  void add(const EmbeddingRecord& record) { add(record.item_id, record.vector); }

  bool contains(std::string_view item_id) const;
  std::optional<std::span<const float>> find(std::string_view item_id) const;
  /// Throws MissingEmbedding naming this store.
  std::span<const float> at(std::string_view item_id) const;

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim(), dim()}; }

  /// Equality over everything the file format carries, comparing vector bits.
  bool same_content(const EmbeddingStore& other) const;

 private:
  BackboneDescriptor descriptor_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint16_t kStoreFormatVersion = 1;

std::vector<std::uint8_t> encode_store(const EmbeddingStore& store);
EmbeddingStore decode_store(std::span<const std::uint8_t> bytes);

void write_store(const EmbeddingStore& store, const std::filesystem::path& path);
/// Throws FileUnreadable, BadMagic, TruncatedFile, DimMismatch, NonFinite.
EmbeddingStore read_store(const std::filesystem::path& path);

/// Fills parameter_count and provenance from the catalog when the name is
/// registered; unregistered names are Mock with zero parameters. A registered
/// text backbone whose registry width differs from `dim` is a DimMismatch;
/// image widths always come from the data.
BackboneDescriptor resolve_descriptor(std::string name, Modality modality, std::uint32_t dim);

/// Built-in registry of imported backbones with published metadata.
const std::vector<BackboneDescriptor>& catalog_descriptors();

/// Lookup ignoring case, spaces, hyphens and underscores ("NASNet Mobile" ==
/// "nasnet-mobile").
std::optional<BackboneDescriptor> find_descriptor(std::string_view name);

/// Mock label directions: +e0 for Real, -e0 for Fake.
std::vector<float> label_direction(corpus::Label label, std::size_t dim);

/// vector = signal * label_direction + (1 - signal) * noise with standard
/// normal noise seeded by (seed, descriptor name, item id).
EmbeddingRecord mock_embed(const BackboneDescriptor& descriptor, const corpus::NewsItem& item,
                           double signal, std::uint64_t seed);

EmbeddingStore mock_store(const BackboneDescriptor& descriptor,
                          const corpus::DatasetManifest& manifest, double signal,
                          std::uint64_t seed);

}  // namespace fndstack::backbone
