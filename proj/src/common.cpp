// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "fndstack/error.hpp"
#include "fndstack/random.hpp"

namespace fndstack {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::NotThreeChannels: return "NotThreeChannels";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonOneHotTarget: return "NonOneHotTarget";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::StoreIdMismatch: return "StoreIdMismatch";
    case ErrorCode::DimZero: return "DimZero";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::NotAProbabilityVector: return "NotAProbabilityVector";
    case ErrorCode::EmptyPredictions: return "EmptyPredictions";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

}  // namespace fndstack
