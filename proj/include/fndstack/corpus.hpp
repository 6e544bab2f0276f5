// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fndstack::corpus {

/// Class index 0 is Real and 1 is Fake everywhere in the system.
enum class Label : std::uint8_t { Real = 0, Fake = 1 };

inline constexpr std::size_t kNumClasses = 2;

constexpr std::size_t class_index(Label l) noexcept { return static_cast<std::size_t>(l); }
constexpr Label label_from_index(std::size_t i) noexcept { return i == 0 ? Label::Real : Label::Fake; }

enum class Split : std::uint8_t { Train, Validation, Test };

std::string_view to_string(Label l) noexcept;  // "real" / "fake"
std::string_view to_string(Split s) noexcept;  // "train" / "val" / "test"
std::optional<Label> parse_label(std::string_view s) noexcept;
std::optional<Split> parse_split(std::string_view s) noexcept;

struct NewsItem {
  std::string id;
  std::string text;
  std::optional<std::string> image_ref;
  Label label = Label::Real;
  std::optional<Split> split;

  bool operator==(const NewsItem&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::vector<NewsItem> items;  // on-disk order
  std::string source_notes;

  bool operator==(const DatasetManifest&) const = default;

  const NewsItem* find(std::string_view id) const;
  std::vector<const NewsItem*> in_split(Split s) const;
};

struct LoadOptions {
  /// Strict loading throws MalformedRecord on the first bad line; lenient
  /// loading skips it and counts it in LoadResult::rejected.
  bool strict = true;
};

struct LoadResult {
  DatasetManifest manifest;
  std::size_t rejected = 0;
  std::vector<std::size_t> rejected_lines;  // 1-based
};

/// Parses a line-delimited manifest. Blank lines are ignored. Duplicate ids
/// always raise DuplicateId regardless of strictness.
LoadResult load_manifest(const std::filesystem::path& path, LoadOptions opts = {});

/// Convenience wrapper for strict loads.
DatasetManifest read_manifest(const std::filesystem::path& path);

/// One JSON object per line with keys in the order id, text, image_ref, label, split.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
std::string serialize_record(const NewsItem& item);

enum class DropReason : std::uint8_t { MissingText, MissingImage, AnimatedOrVideo };

struct DropReport {
  std::size_t missing_text = 0;
  std::size_t missing_image = 0;
  std::size_t animated_or_video = 0;

  std::size_t total() const noexcept { return missing_text + missing_image + animated_or_video; }
  bool operator==(const DropReport&) const = default;
};

/// Still images: jpg, jpeg, png, bmp. Animated/video: gif, mp4, webm, mov.
/// Anything else (or no extension) counts as a missing image.
std::optional<DropReason> classify_item(const NewsItem& item);

struct FilterResult {
  DatasetManifest manifest;
  DropReport report;
};

FilterResult filter_multimodal(const DatasetManifest& manifest);

enum class SplitScheme : std::uint8_t { TrainVal75_25, TrainValTest7_1_2, PreassignedPassthrough };

std::optional<SplitScheme> parse_split_scheme(std::string_view s) noexcept;
std::string_view to_string(SplitScheme s) noexcept;

/// Stratified, seeded split assignment. Within each label the candidate items
/// are ordered by a seeded hash of their id and cut at rounded cumulative
/// ratio boundaries, so every (label, split) cell is within one item of the
/// exact ratio.
///
/// TrainVal75_25 re-splits items marked Train (or unassigned) into Train and
/// Validation and leaves Test items alone. TrainValTest7_1_2 reassigns every
/// item. PreassignedPassthrough returns the manifest unchanged.
DatasetManifest assign_splits(const DatasetManifest& manifest, SplitScheme scheme, std::uint64_t seed);

/// Per-split label counts; index [split][label]. Index 3 holds unassigned items.
using SplitCounts = std::array<std::array<std::size_t, kNumClasses>, 4>;
SplitCounts count_by_split(const DatasetManifest& manifest);

}  // namespace fndstack::corpus
