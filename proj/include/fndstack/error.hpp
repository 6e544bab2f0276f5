// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fndstack {

enum class ErrorCode {
  FileUnreadable,
  MalformedRecord,
  DuplicateId,
  EmptyManifest,
  EmptyImage,
  NotThreeChannels,
  DimMismatch,
  BadMagic,
  TruncatedFile,
  NonFinite,
  NonOneHotTarget,
  EmptyData,
  EmptyCandidates,
  StoreIdMismatch,
  DimZero,
  MissingEmbedding,
  NotAProbabilityVector,
  EmptyPredictions,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries a stable, machine-readable code.
/// The code name is also the token surfaced by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fndstack
