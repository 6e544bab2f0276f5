// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/reference.hpp"

#include <array>
#include <string>

namespace fndstack::reference {

namespace {

constexpr std::optional<double> NA = std::nullopt;

constexpr std::array kDatasets{
    DatasetSummary{"Twitter MediaEval", 5008, 7032, 1217, 2564},
    DatasetSummary{"Weibo", 4274, 4274, 475, 475},
};

constexpr std::array kImageModels{
    ImageModelRow{"Xception", 88, 22.90, 81},
    ImageModelRow{"MobileNet", 16, 4.30, 55},
    ImageModelRow{"MobileNet V2", 14, 3.50, 105},
    ImageModelRow{"MobileNet V3 Large", NA, 5.40, 217},
    ImageModelRow{"ResNet101", 171, 44.70, 209},
    ImageModelRow{"ResNet 101 V2", 171, 44.70, 205},
    ImageModelRow{"ResNet 152 V2", 232, 60.40, 307},
    ImageModelRow{"ResNet50 V2", 98, 25.60, 103},
    ImageModelRow{"InceptionResNetV2", 215, 55.90, 449},
    ImageModelRow{"EfficientNetB0", 29, 5.30, 132},
    ImageModelRow{"EfficientNetB7", 256, 66.70, 438},
    ImageModelRow{"VGG 16", 528, 138.40, 16},
    ImageModelRow{"VGG 19", 549, 143.70, 19},
    ImageModelRow{"NASNet Mobile", 23, 4.30, 389},
    ImageModelRow{"DenseNet 121", 33, 8.10, 242},
    ImageModelRow{"DenseNet 169", 57, 14.30, 338},
    ImageModelRow{"DenseNet 201", 88, 20.20, 402},
};

constexpr std::array kTopModels{
    TopModelRow{"NasNet Mobile", 4'269'716, 74.31},
    TopModelRow{"DenseNet 201", 18'321'984, 73.67},
    TopModelRow{"ResNet 101 V2", 42'626'560, 73.13},
    TopModelRow{"ResNet 152 V2", 58'331'648, 72.67},
    TopModelRow{"DenseNet 121", 7'037'504, 72.31},
};

constexpr std::array kTwitter{
    ResultRow{"EANN", 71.50, NA, NA, NA, NA, NA, NA},
    ResultRow{"EANN (-)", 64.80, 81.00, 49.80, 61.70, 58.40, 75.90, 66.00},
    ResultRow{"MVAE", 74.50, 80.10, 71.90, 75.80, 68.90, 77.70, 73.00},
    ResultRow{"SpotFake", 77.80, 75.10, 90.00, 82.00, 83.20, 60.06, 70.10},
    ResultRow{"Cultural Algo", 79.80, 79.10, 83.30, 76.00, 79.10, 83.30, 76.00},
    ResultRow{"Efficient Roberta", 85.30, 82.10, 94.30, 82.70, 91.30, 74.50, 82.00},
    ResultRow{"Stacked ensemble (published)", 85.80, 73.70, 95.50, 83.20, 95.30, 72.90, 82.60},
};

constexpr std::array kWeibo{
    ResultRow{"EANN", 82.70, 82.70, 69.70, 75.60, 75.20, 86.30, 80.40},
    ResultRow{"EANN (-)", 79.50, NA, NA, NA, NA, NA, NA},
    ResultRow{"MVAE", 82.40, 85.40, 76.90, 80.90, 80.20, 87.50, 83.70},
    ResultRow{"Efficient Roberta", 81.20, 85.10, 78.40, 81.60, 74.40, 82.60, 78.20},
    ResultRow{"Stacked ensemble (published)", 86.83, 87.37, 80.20, 83.63, 86.29, 87.10, 80.70},
};

constexpr std::array kParameters{
    ParameterRow{"EANN", "VGG-19", 20'024'384, "Text CNN", std::nullopt},
    ParameterRow{"MVAE", "VGG-19", 20'024'384, "Word2Vec", std::nullopt},
    ParameterRow{"SpotFake", "VGG-19", 20'024'384, "BERT Base", 110'000'000},
    ParameterRow{"Efficient Roberta", "EfficientNet B0", 5'300'000, "RoBERTa", 123'000'000},
    ParameterRow{"Stacked ensemble", "NasNet Mobile", 4'269'716, "ELECTRA Small & BERT Small", 44'000'000},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  return out;
}

}  // namespace

std::span<const DatasetSummary> dataset_summaries() { return kDatasets; }
std::span<const ImageModelRow> image_model_study() { return kImageModels; }
std::span<const TopModelRow> top_image_models() { return kTopModels; }
std::span<const ParameterRow> parameter_comparison() { return kParameters; }

std::span<const ResultRow> published_results(std::string_view dataset) {
  const auto key = lower(dataset);
  if (key == "twitter" || key == "twitter mediaeval") return kTwitter;
  if (key == "weibo") return kWeibo;
  return {};
}

}  // namespace fndstack::reference
