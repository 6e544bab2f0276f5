// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

namespace fndstack::cli {

namespace {

std::string underscored(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::optional<std::string> json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      auto s = json_scalar(e);
      if (!s) return std::nullopt;
      if (!out.empty()) out += ',';
      out += *s;
    }
    return out;
  }
  return std::nullopt;
}

std::optional<std::string> lookup_file(const nlohmann::json& obj, const std::string& key) {
  if (!obj.is_object()) return std::nullopt;
  for (const auto& k : {key, underscored(key)}) {
    auto it = obj.find(k);
    if (it == obj.end()) continue;
    auto s = json_scalar(*it);
    if (!s) throw Error(ErrorCode::InvalidArgument, "config key '" + k + "' must be a scalar or a list");
    return s;
  }
  return std::nullopt;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimMismatch:
    case ErrorCode::StoreIdMismatch:
    case ErrorCode::DimZero:
    case ErrorCode::MissingEmbedding:
      return kExitMismatch;
    default:
      return kExitInput;
  }
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::string env_name(const std::string& key) {
  std::string out = "FNDSTACK_";
  for (char c : key) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void RunConfig::set(const std::string& key, std::string value, std::string source) {
  values_[key] = Setting{std::move(value), std::move(source)};
}

const RunConfig::Setting* RunConfig::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string RunConfig::str(const std::string& key) const {
  const auto* s = find(key);
  if (!s) throw Error(ErrorCode::InvalidArgument, "missing required option --" + key);
  return s->value;
}

std::optional<std::string> RunConfig::maybe(const std::string& key) const {
  const auto* s = find(key);
  if (!s || s->value.empty()) return std::nullopt;
  return s->value;
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const auto v = str(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw Error(ErrorCode::InvalidArgument, "--" + key + " expects a non-negative integer, got '" + v + "'");
  return out;
}

double RunConfig::real(const std::string& key) const {
  const auto v = str(key);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw Error(ErrorCode::InvalidArgument, "--" + key + " expects a number, got '" + v + "'");
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const auto* s = find(key);
  if (!s) return false;
  std::string v = s->value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off" || v.empty()) return false;
  throw Error(ErrorCode::InvalidArgument, "--" + key + " expects a boolean, got '" + s->value + "'");
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  const auto v = maybe(key);
  if (!v) return out;
  std::size_t start = 0;
  while (start <= v->size()) {
    const auto comma = v->find(',', start);
    const auto end = comma == std::string::npos ? v->size() : comma;
    out.push_back(v->substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

nlohmann::json RunConfig::describe() const {
  nlohmann::json options = nlohmann::json::object();
  for (const auto& [k, s] : values_) options[k] = {{"source", s.source}, {"value", s.value}};
  return {{"command", command}, {"options", options}};
}

RunConfig resolve_config(const std::string& command, const std::vector<OptionSpec>& specs,
                         const std::map<std::string, std::string>& flags, const EnvLookup& env,
                         const std::optional<std::filesystem::path>& config_file) {
  nlohmann::json file = nlohmann::json::object();
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw Error(ErrorCode::FileUnreadable, "config file " + config_file->string());
    file = nlohmann::json::parse(in, nullptr, false);
    if (file.is_discarded() || !file.is_object())
      throw Error(ErrorCode::MalformedRecord, "config file " + config_file->string() + " is not a JSON object");
  }
  const nlohmann::json scoped = file.contains(command) ? file.at(command) : nlohmann::json::object();

  RunConfig cfg;
  cfg.command = command;
  for (const auto& spec : specs) {
    if (auto it = flags.find(spec.key); it != flags.end()) {
      cfg.set(spec.key, it->second, "flag");
    } else if (auto e = env ? env(env_name(spec.key)) : std::nullopt) {
      cfg.set(spec.key, *e, "env");
    } else if (auto f = lookup_file(scoped, spec.key)) {
      cfg.set(spec.key, *f, "file");
    } else if (auto t = lookup_file(file, spec.key)) {
      cfg.set(spec.key, *t, "file");
    } else if (spec.fallback) {
      cfg.set(spec.key, *spec.fallback, "default");
    }
  }
  return cfg;
}

}  // namespace fndstack::cli
