// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// Option resolution for the command-line tool: flags > environment > config
// file > defaults. CLI11 only parses flags here; the layering is ours.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fndstack/error.hpp"

namespace fndstack::cli {

// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitMismatch = 3, kExitTraining = 4, kExitServing = 5 };

/// Default mapping from an error to an exit code; commands may override it
/// for their own phases (e.g. training failures).
int exit_code_for(ErrorCode code) noexcept;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

struct OptionSpec {
  std::string key;  // flag name without dashes, e.g. "batch-size"
  std::string help;
  std::optional<std::string> fallback;  // default value, if any
  bool is_flag = false;  // boolean switch
};

/// "batch-size" -> "FNDSTACK_BATCH_SIZE".
std::string env_name(const std::string& key);

class RunConfig {
 public:
  struct Setting {
    std::string value;
    std::string source;  // flag | env | file | default
  };

  std::string command;

  void set(const std::string& key, std::string value, std::string source);
  bool has(const std::string& key) const { return values_.contains(key); }
  const Setting* find(const std::string& key) const;

  // Typed accessors; a missing or unparsable value is InvalidArgument.
  std::string str(const std::string& key) const;
  std::optional<std::string> maybe(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;  // comma separated

  /// {"command": ..., "options": {key: {"value", "source"}}} with sorted keys.
  nlohmann::json describe() const;

 private:
  std::map<std::string, Setting> values_;
};

/// Layers explicit flag values over environment, the JSON config file and
/// defaults. The file may hold top-level keys and a per-command object whose
/// keys win over the top level. Keys accept '-' or '_'.
RunConfig resolve_config(const std::string& command, const std::vector<OptionSpec>& specs,
                         const std::map<std::string, std::string>& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file);

}  // namespace fndstack::cli
