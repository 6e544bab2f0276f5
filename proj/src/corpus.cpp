// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"

namespace fndstack::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string extension_of(std::string_view ref) {
  const auto slash = ref.find_last_of("/\\");
  const auto name = slash == std::string_view::npos ? ref : ref.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot == std::string_view::npos || dot + 1 == name.size()) return {};
  return lowercase(name.substr(dot + 1));
}

// Returns an error message, or empty on success.
std::string parse_record(std::string_view line, NewsItem& out) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return "not a JSON object";
  if (!j.is_object()) return "record is not an object";

  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
    return "missing or empty string field 'id'";
  out.id = id->get<std::string>();

  out.text.clear();
  if (auto t = j.find("text"); t != j.end() && !t->is_null()) {
    if (!t->is_string()) return "field 'text' is not a string";
    out.text = t->get<std::string>();
  }

  out.image_ref.reset();
  if (auto im = j.find("image_ref"); im != j.end() && !im->is_null()) {
    if (!im->is_string()) return "field 'image_ref' is not a string";
    out.image_ref = im->get<std::string>();
  }

  auto lab = j.find("label");
  if (lab == j.end() || !lab->is_string()) return "missing string field 'label'";
  auto label = parse_label(lab->get_ref<const std::string&>());
  if (!label) return "label must be \"real\" or \"fake\"";
  out.label = *label;

  out.split.reset();
  if (auto sp = j.find("split"); sp != j.end() && !sp->is_null()) {
    if (!sp->is_string()) return "field 'split' is not a string";
    auto split = parse_split(sp->get_ref<const std::string&>());
    if (!split) return "split must be one of \"train\", \"val\", \"test\"";
    out.split = *split;
  }
  return {};
}

}  // namespace

std::string_view to_string(Label l) noexcept { return l == Label::Real ? "real" : "fake"; }

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "real") return Label::Real;
  if (s == "fake") return Label::Fake;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) noexcept {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Validation;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

const NewsItem* DatasetManifest::find(std::string_view id) const {
  for (const auto& it : items)
    if (it.id == id) return &it;
  return nullptr;
}

std::vector<const NewsItem*> DatasetManifest::in_split(Split s) const {
  std::vector<const NewsItem*> out;
  for (const auto& it : items)
    if (it.split == s) out.push_back(&it);
  return out;
}

LoadResult load_manifest(const std::filesystem::path& path, LoadOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());

  LoadResult result;
  result.manifest.name = path.stem().string();
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    NewsItem item;
    if (auto err = parse_record(line, item); !err.empty()) {
      if (opts.strict)
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": " + err);
      ++result.rejected;
      result.rejected_lines.push_back(line_no);
      continue;
    }
    if (!seen.insert(item.id).second) throw Error(ErrorCode::DuplicateId, item.id);
    result.manifest.items.push_back(std::move(item));
  }
  if (in.bad()) throw Error(ErrorCode::FileUnreadable, path.string());
  return result;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return load_manifest(path).manifest;
}

std::string serialize_record(const NewsItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["text"] = item.text;
  if (item.image_ref) j["image_ref"] = *item.image_ref;
  j["label"] = std::string(to_string(item.label));
  if (item.split) j["split"] = std::string(to_string(*item.split));
  // Invalid UTF-8 is replaced rather than aborting the whole write.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileUnreadable, "cannot write " + path.string());
  for (const auto& item : manifest.items) out << serialize_record(item) << '\n';
  if (!out) throw Error(ErrorCode::FileUnreadable, "write failed: " + path.string());
}

std::optional<DropReason> classify_item(const NewsItem& item) {
  if (item.text.find_first_not_of(" \t\r\n\v\f") == std::string::npos)
    return DropReason::MissingText;
  if (!item.image_ref || item.image_ref->empty()) return DropReason::MissingImage;
  const auto ext = extension_of(*item.image_ref);
  if (ext == "jpg" || ext == "jpeg" || ext == "png" || ext == "bmp") return std::nullopt;
  if (ext == "gif" || ext == "mp4" || ext == "webm" || ext == "mov")
    return DropReason::AnimatedOrVideo;
  return DropReason::MissingImage;
}

FilterResult filter_multimodal(const DatasetManifest& manifest) {
  FilterResult r;
  r.manifest.name = manifest.name;
  r.manifest.source_notes = manifest.source_notes;
  for (const auto& item : manifest.items) {
    auto reason = classify_item(item);
    if (!reason) {
      r.manifest.items.push_back(item);
      continue;
    }
    switch (*reason) {
      case DropReason::MissingText: ++r.report.missing_text; break;
      case DropReason::MissingImage: ++r.report.missing_image; break;
      case DropReason::AnimatedOrVideo: ++r.report.animated_or_video; break;
    }
  }
  return r;
}

std::optional<SplitScheme> parse_split_scheme(std::string_view s) noexcept {
  if (s == "75-25" || s == "trainval75_25") return SplitScheme::TrainVal75_25;
  if (s == "7-1-2" || s == "trainvaltest7_1_2") return SplitScheme::TrainValTest7_1_2;
  if (s == "preassigned" || s == "passthrough") return SplitScheme::PreassignedPassthrough;
  return std::nullopt;
}

std::string_view to_string(SplitScheme s) noexcept {
  switch (s) {
    case SplitScheme::TrainVal75_25: return "75-25";
    case SplitScheme::TrainValTest7_1_2: return "7-1-2";
    case SplitScheme::PreassignedPassthrough: return "preassigned";
  }
  return "?";
}

DatasetManifest assign_splits(const DatasetManifest& manifest, SplitScheme scheme,
                              std::uint64_t seed) {
  if (manifest.items.empty()) throw Error(ErrorCode::EmptyManifest, manifest.name);
  if (scheme == SplitScheme::PreassignedPassthrough) return manifest;

  struct Part {
    Split split;
    std::size_t weight;
  };
  std::vector<Part> parts;
  if (scheme == SplitScheme::TrainVal75_25)
    parts = {{Split::Train, 75}, {Split::Validation, 25}};
  else
    parts = {{Split::Train, 7}, {Split::Validation, 1}, {Split::Test, 2}};
  std::size_t total_weight = 0;
  for (const auto& p : parts) total_weight += p.weight;

  DatasetManifest out = manifest;
  for (std::size_t label = 0; label < kNumClasses; ++label) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;  // (hash, item index)
    for (std::size_t i = 0; i < out.items.size(); ++i) {
      const auto& it = out.items[i];
      if (class_index(it.label) != label) continue;
      if (scheme == SplitScheme::TrainVal75_25 && it.split && *it.split != Split::Train) continue;
      keyed.emplace_back(mix_seed(seed, fnv1a64(it.id)), i);
    }
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return out.items[a.second].id < out.items[b.second].id;
    });
    const std::size_t n = keyed.size();
    std::size_t begin = 0;
    std::size_t cumulative = 0;
    for (const auto& part : parts) {
      cumulative += part.weight;
      // round(n * cumulative / total_weight), halves rounded up
      const std::size_t end = (2 * n * cumulative + total_weight) / (2 * total_weight);
      for (std::size_t k = begin; k < end; ++k) out.items[keyed[k].second].split = part.split;
      begin = end;
    }
  }
  return out;
}

SplitCounts count_by_split(const DatasetManifest& manifest) {
  SplitCounts counts{};
  for (const auto& it : manifest.items) {
    const std::size_t row = it.split ? static_cast<std::size_t>(*it.split) : 3;
    ++counts[row][class_index(it.label)];
  }
  return counts;
}

}  // namespace fndstack::corpus
