// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include <opencv2/imgcodecs.hpp>

#include "fndstack/error.hpp"
#include "fndstack/preprocess.hpp"

namespace fndstack::preprocess {

RgbImage load_image_rgb(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorCode::FileUnreadable, "cannot decode image " + path.string());
  RgbImage img;
  img.height = static_cast<std::size_t>(bgr.rows);
  img.width = static_cast<std::size_t>(bgr.cols);
  img.channels = 3;
  img.bytes.resize(img.height * img.width * 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      std::uint8_t* px = img.bytes.data() + (static_cast<std::size_t>(y) * img.width + x) * 3;
      px[0] = row[x][2];
      px[1] = row[x][1];
      px[2] = row[x][0];
    }
  }
  return img;
}

}  // namespace fndstack::preprocess
