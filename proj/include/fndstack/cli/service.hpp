// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

// Classification service over an immutable model. Request handling is a
// plain function of the body so it can be exercised without a socket.

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fndstack/backbone.hpp"
#include "fndstack/corpus.hpp"
#include "fndstack/ensemble.hpp"

namespace fndstack::cli {

struct StoreTrio {
  backbone::EmbeddingStore text_a, text_b, image;
  ensemble::StoreSet view() const { return {text_a, text_b, image}; }
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

class Service {
 public:
  /// Stores enable classification by item_id; a manifest additionally
  /// enables raw text lookup (exact match after cleaning).
  explicit Service(ensemble::Model model, std::optional<StoreTrio> stores = std::nullopt,
                   std::optional<corpus::DatasetManifest> manifest = std::nullopt);

  /// POST /classify. Error bodies carry {"error": code, "message": ...}.
  ServiceResponse classify(std::string_view body) const;
  /// GET /healthz.
  ServiceResponse health() const;

  const std::string& fingerprint() const noexcept { return fingerprint_; }
  const ensemble::Model& model() const noexcept { return model_; }

 private:
  ServiceResponse classify_impl(std::string_view body) const;

  const ensemble::Model model_;
  const std::optional<StoreTrio> stores_;
  std::unordered_map<std::string, std::string> text_to_id_;
  std::string fingerprint_;
  mutable std::atomic<std::uint64_t> requests_{0};
  mutable std::atomic<std::uint64_t> latency_total_us_{0};
};

/// HTTP/1.1 front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free port). Returns the bound port or
  /// nullopt when binding fails.
  std::optional<int> bind(const std::string& host, int port);
  /// Serves until stop(); call after a successful bind.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" -> pair; InvalidArgument when malformed.
std::pair<std::string, int> parse_bind(const std::string& bind);

}  // namespace fndstack::cli
