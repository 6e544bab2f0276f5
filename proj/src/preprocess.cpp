// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <regex>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"

namespace fndstack::preprocess {

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_control(unsigned char c) { return c < 0x20 || c == 0x7f; }

const std::regex& url_regex() {
  static const std::regex re(std::string(kUrlPattern),
                             std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return re;
}

// Keys cubic convolution kernel weights for fractional offset t in [0, 1).
std::array<double, 4> cubic_weights(double t) {
  constexpr double a = -0.75;
  auto near = [](double x) { return ((a + 2) * x - (a + 3)) * x * x + 1; };
  auto far = [](double x) { return ((a * x - 5 * a) * x + 8 * a) * x - 4 * a; };
  return {far(1 + t), near(t), near(1 - t), far(2 - t)};
}

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> make_taps(std::size_t in, std::size_t out) {
  std::vector<Taps> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const auto last = static_cast<long>(in) - 1;
  for (std::size_t d = 0; d < out; ++d) {
    const double src = (static_cast<double>(d) + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    taps[d].weight = cubic_weights(src - base);
    for (int k = 0; k < 4; ++k) {
      const long idx = static_cast<long>(base) - 1 + k;
      taps[d].index[k] = static_cast<std::size_t>(std::clamp(idx, 0L, last));
    }
  }
  return taps;
}

}  // namespace

CleanText clean_text(std::string_view raw) {
  CleanText out;

  // Control characters first so that removing them cannot assemble a new URL.
  std::string stripped;
  stripped.reserve(raw.size());
  bool in_control_run = false;
  for (unsigned char c : raw) {
    if (is_ascii_space(c)) {
      stripped.push_back(' ');
      in_control_run = false;
    } else if (is_control(c)) {
      if (!in_control_run) ++out.removals;
      in_control_run = true;
    } else {
      stripped.push_back(static_cast<char>(c));
      in_control_run = false;
    }
  }

  std::string no_urls;
  no_urls.reserve(stripped.size());
  auto begin = std::sregex_iterator(stripped.begin(), stripped.end(), url_regex());
  std::size_t cursor = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    no_urls.append(stripped, cursor, static_cast<std::size_t>(it->position()) - cursor);
    no_urls.push_back(' ');
    cursor = static_cast<std::size_t>(it->position() + it->length());
    ++out.removals;
  }
  no_urls.append(stripped, cursor);

  out.text.reserve(no_urls.size());
  bool pending_space = false;
  for (char c : no_urls) {
    if (c == ' ') {
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) out.text.push_back(' ');
    pending_space = false;
    out.text.push_back(c);
  }
  return out;
}

ImageTensor resize_image(const RgbImage& image, std::size_t out_height, std::size_t out_width) {
  if (image.height == 0 || image.width == 0 || out_height == 0 || out_width == 0)
    throw Error(ErrorCode::EmptyImage, "image has a zero dimension");
  if (image.channels != 3) throw Error(ErrorCode::NotThreeChannels,
                                       std::to_string(image.channels) + " channels");
  if (image.bytes.size() != image.height * image.width * 3)
    throw Error(ErrorCode::EmptyImage, "pixel buffer size does not match dimensions");

  const auto xt = make_taps(image.width, out_width);
  const auto yt = make_taps(image.height, out_height);

  // Horizontal pass over every source row.
  std::vector<double> rows(image.height * out_width * 3);
  for (std::size_t y = 0; y < image.height; ++y) {
    const std::uint8_t* src = image.bytes.data() + y * image.width * 3;
    double* dst = rows.data() + y * out_width * 3;
    for (std::size_t x = 0; x < out_width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += xt[x].weight[k] * src[xt[x].index[k] * 3 + c];
        dst[x * 3 + c] = acc;
      }
    }
  }

  ImageTensor out;
  out.height = out_height;
  out.width = out_width;
  out.channels = 3;
  out.values.resize(out_height * out_width * 3);
  for (std::size_t y = 0; y < out_height; ++y) {
    for (std::size_t i = 0; i < out_width * 3; ++i) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += yt[y].weight[k] * rows[yt[y].index[k] * out_width * 3 + i];
      out.values[y * out_width * 3 + i] = static_cast<float>(std::clamp(acc, 0.0, 255.0));
    }
  }
  return out;
}

ImageTensor normalize_minmax(const ImageTensor& t) {
  ImageTensor out = t;
  if (t.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(t.values.begin(), t.values.end());
  const double lo = *lo_it;
  const double range = static_cast<double>(*hi_it) - lo;
  for (auto& v : out.values) {
    v = range > 0.0 ? static_cast<float>(std::clamp((v - lo) / range, 0.0, 1.0)) : 0.0f;
  }
  return out;
}

double gaussian_density(double z, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  const double u = (z - mu) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> sample_noise(const GaussianNoiseSpec& spec, std::size_t count) {
  if (!(spec.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  Rng rng(spec.seed);
  std::vector<double> out(count);
  for (auto& n : out) n = rng.normal(spec.mu, spec.sigma);
  return out;
}

ImageTensor add_gaussian_noise(const ImageTensor& t, const GaussianNoiseSpec& spec) {
  if (!(spec.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  ImageTensor out = t;
  Rng rng(spec.seed);
  for (auto& v : out.values) {
    v = static_cast<float>(std::clamp(v + rng.normal(spec.mu, spec.sigma), 0.0, 1.0));
  }
  return out;
}

std::uint64_t item_noise_seed(std::uint64_t seed, std::string_view item_id) {
  return seed ^ fnv1a64(item_id);
}

}  // namespace fndstack::preprocess
