// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// In-process driver for the command-line tool.

#pragma once

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fndstack/cli/commands.hpp"

namespace fndstack::testing {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

inline cli::EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

inline CliRun run_cli(const std::vector<std::string>& args, const cli::EnvLookup& env = fake_env({})) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// mock-corpus -> ingest -> three mock-embed runs. Returns the comma-joined
/// store list suitable for --stores.
struct MockPipeline {
  std::filesystem::path raw, manifest, text_a, text_b, image;
  std::string stores() const { return text_a.string() + "," + text_b.string() + "," + image.string(); }
};

inline MockPipeline prepare_mock_pipeline(const std::filesystem::path& dir, std::size_t count, double signal,
                                          std::uint64_t seed, std::vector<std::string>* log = nullptr) {
  MockPipeline p{dir / "raw.jsonl", dir / "manifest.jsonl", dir / "text_a.sfnd", dir / "text_b.sfnd",
                 dir / "image.sfnd"};
  const auto s = std::to_string(seed);
  const auto sig = std::to_string(signal);
  const std::vector<std::vector<std::string>> steps{
      {"mock-corpus", "--out", p.raw.string(), "--count", std::to_string(count), "--split-scheme", "7-1-2",
       "--seed", s},
      {"ingest", "--manifest", p.raw.string(), "--out", p.manifest.string(), "--split-scheme", "preassigned",
       "--seed", s},
      {"mock-embed", "--manifest", p.manifest.string(), "--out", p.text_a.string(), "--backbone", "mock-text-a",
       "--modality", "text", "--dim", "768", "--signal", sig, "--seed", s},
      {"mock-embed", "--manifest", p.manifest.string(), "--out", p.text_b.string(), "--backbone", "mock-text-b",
       "--modality", "text", "--dim", "256", "--signal", sig, "--seed", s},
      {"mock-embed", "--manifest", p.manifest.string(), "--out", p.image.string(), "--backbone", "mock-image",
       "--modality", "image", "--dim", "1056", "--signal", sig, "--seed", s},
  };
  for (const auto& args : steps) {
    const auto r = run_cli(args);
    if (log) log->push_back(args.front() + " -> " + std::to_string(r.code) + "\n" + r.out + r.err);
    if (r.code != 0) throw std::runtime_error(args.front() + " failed: " + r.err);
  }
  return p;
}

}  // namespace fndstack::testing
