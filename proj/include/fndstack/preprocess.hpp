// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fndstack::preprocess {

struct CleanText {
  std::string text;
  std::size_t removals = 0;
};

/// Case-insensitive; bare "www." hosts count as URLs.
inline constexpr std::string_view kUrlPattern = R"((https?://\S+)|(www\.\S+))";

/// Strips control characters, removes URL spans, collapses ASCII whitespace
/// runs to a single space and trims. `removals` counts removed URL spans plus
/// removed runs of non-whitespace control characters. Idempotent.
CleanText clean_text(std::string_view raw);

inline constexpr std::size_t kImageSide = 224;
inline constexpr std::size_t kImageChannels = 3;

/// Interleaved 8-bit RGB, row-major.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 3;
  std::vector<std::uint8_t> bytes;
};

/// Channel-last float tensor. Produced at kImageSide x kImageSide x 3.
struct ImageTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = kImageChannels;
  std::vector<float> values;

  float at(std::size_t y, std::size_t x, std::size_t c) const {
    return values[(y * width + x) * channels + c];
  }
};

/// Bicubic resampling (Keys kernel, a = -0.75, half-pixel centres, replicated
/// border), evaluated in double and clamped to [0, 255].
ImageTensor resize_image(const RgbImage& image, std::size_t out_height = kImageSide,
                         std::size_t out_width = kImageSide);

/// (v - min) / (max - min) over every value of the image; a constant image
/// becomes all zeros.
ImageTensor normalize_minmax(const ImageTensor& t);

struct GaussianNoiseSpec {
  double mu = 0.0;
  double sigma = 0.05;
  std::uint64_t seed = 0;
};

/// Probability density of Normal(mu, sigma) at z.
double gaussian_density(double z, double mu, double sigma);

/// Draws `count` pre-clamp noise values exactly as add_gaussian_noise does.
std::vector<double> sample_noise(const GaussianNoiseSpec& spec, std::size_t count);

/// out = clamp(v + n, 0, 1), n ~ Normal(mu, sigma) drawn in element order from
/// a Marsaglia-polar sampler seeded with spec.seed. Training-time only.
ImageTensor add_gaussian_noise(const ImageTensor& t, const GaussianNoiseSpec& spec);

/// Per-item noise seed: seed XOR FNV-1a(item id), so parallel order is irrelevant.
std::uint64_t item_noise_seed(std::uint64_t seed, std::string_view item_id);

/// Decodes a still image file into 8-bit RGB.
RgbImage load_image_rgb(const std::filesystem::path& path);

}  // namespace fndstack::preprocess
