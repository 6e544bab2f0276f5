// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/cli/service.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <vector>

// Concurrent clients can arrive before the accept loop starts.
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>

#include "fndstack/error.hpp"
#include "fndstack/preprocess.hpp"

namespace fndstack::cli {

namespace {

ServiceResponse fail(int status, std::string code, std::string message) {
  return {status, {{"error", std::move(code)}, {"message", std::move(message)}}};
}

// Returns nullopt when the key is absent; throws a 400 body when malformed.
std::optional<std::vector<float>> vector_field(const nlohmann::json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) throw fail(400, "malformed_request", std::string(key) + " must be an array of numbers");
  std::vector<float> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw fail(400, "malformed_request", std::string(key) + " must be an array of numbers");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw fail(400, "malformed_request", std::string(key) + " holds a non-finite value");
    out.push_back(static_cast<float>(d));
  }
  return out;
}

void check_width(const std::vector<float>& v, std::size_t want, const char* key) {
  if (v.size() != want)
    throw fail(400, "dim_mismatch",
               std::string(key) + " has " + std::to_string(v.size()) + " values, model expects " + std::to_string(want));
}

}  // namespace

Service::Service(ensemble::Model model, std::optional<StoreTrio> stores,
                 std::optional<corpus::DatasetManifest> manifest)
    : model_(std::move(model)), stores_(std::move(stores)) {
  if (stores_) {
    if (stores_->text_a.dim() != model_.text.proj_a.input_dim() ||
        stores_->text_b.dim() != model_.text.proj_b.input_dim() ||
        stores_->image.dim() != model_.image_head.input_dim())
      throw Error(ErrorCode::DimMismatch, "serving stores disagree with the bundle's backbone widths");
  }
  if (manifest) {
    for (const auto& item : manifest->items) {
      auto cleaned = preprocess::clean_text(item.text).text;
      text_to_id_.try_emplace(std::move(cleaned), item.id);
    }
  }
  fingerprint_ = model_.fingerprint();
}

ServiceResponse Service::classify(std::string_view body) const {
  const auto t0 = std::chrono::steady_clock::now();
  ServiceResponse r = classify_impl(body);
  const auto us = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count());
  requests_.fetch_add(1, std::memory_order_relaxed);
  latency_total_us_.fetch_add(us, std::memory_order_relaxed);
  r.body["latency_us"] = us;
  return r;
}

ServiceResponse Service::classify_impl(std::string_view body) const {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail(400, "malformed_body", "request body must be a JSON object");

  try {
    auto text_a = vector_field(j, "text_vec_a");
    auto text_b = vector_field(j, "text_vec_b");
    auto image = vector_field(j, "image_vec");
    std::optional<std::string> item_id;
    if (auto it = j.find("item_id"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) return fail(400, "malformed_request", "item_id must be a string");
      item_id = it->get<std::string>();
    }
    if (auto it = j.find("text"); it != j.end() && !it->is_null() && !it->is_string())
      return fail(400, "malformed_request", "text must be a string");
    if (text_a.has_value() != text_b.has_value())
      return fail(400, "malformed_request", "text_vec_a and text_vec_b must be given together");

    // Text needs both embeddings; fall back from inline vectors to the item
    // id, then to an exact lookup of the cleaned text.
    std::optional<std::string> text_source_id = item_id;
    if (!text_a && !item_id && j.contains("text") && j.at("text").is_string()) {
      const auto cleaned = preprocess::clean_text(j.at("text").get<std::string>()).text;
      if (auto hit = text_to_id_.find(cleaned); hit != text_to_id_.end()) text_source_id = hit->second;
      else
        return fail(400, "text_embedding_unavailable",
                    "raw text is only accepted for items known to the loaded manifest; send text_vec_a/text_vec_b");
    }
    auto require = [&](backbone::EmbeddingStore StoreTrio::*store,
                       const std::string& id) -> std::optional<ServiceResponse> {
      if (!stores_) return fail(400, "stores_not_loaded", "classification by item requires --stores");
      if (!((*stores_).*store).contains(id)) return fail(404, "unknown_item", "item '" + id + "' is not in the loaded stores");
      return std::nullopt;
    };

    std::span<const float> a, b, img;
    if (text_a) {
      check_width(*text_a, model_.text.proj_a.input_dim(), "text_vec_a");
      check_width(*text_b, model_.text.proj_b.input_dim(), "text_vec_b");
      a = *text_a;
      b = *text_b;
    } else if (text_source_id) {
      if (auto r = require(&StoreTrio::text_a, *text_source_id)) return *r;
      if (auto r = require(&StoreTrio::text_b, *text_source_id)) return *r;
      a = stores_->text_a.at(*text_source_id);
      b = stores_->text_b.at(*text_source_id);
    } else {
      return fail(400, "text_embedding_unavailable", "send text_vec_a/text_vec_b, item_id or known text");
    }
    if (image) {
      check_width(*image, model_.image_head.input_dim(), "image_vec");
      img = *image;
    } else if (text_source_id) {
      if (auto r = require(&StoreTrio::image, *text_source_id)) return *r;
      img = stores_->image.at(*text_source_id);
    } else {
      return fail(400, "image_embedding_unavailable", "send image_vec or item_id");
    }

    const auto d = model_.classify(a, b, img);
    nlohmann::json out = {{"label", std::string(corpus::to_string(d.label))},
                          {"p_real", d.probs[0]},
                          {"p_fake", d.probs[1]}};
    if (item_id) out["item_id"] = *item_id;
    return {200, std::move(out)};
  } catch (const ServiceResponse& r) {
    return r;
  } catch (const Error& e) {
    return fail(400, std::string(error_code_name(e.code())), e.what());
  }
}

ServiceResponse Service::health() const {
  const auto n = requests_.load(std::memory_order_relaxed);
  const auto total = latency_total_us_.load(std::memory_order_relaxed);
  return {200,
          {{"status", "ok"},
           {"model_fingerprint", fingerprint_},
           {"requests", n},
           {"mean_latency_us", n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n)}}};
}

// ---- HTTP ------------------------------------------------------------------------------

struct HttpServer::Impl {
  const Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(new Impl{service, {}}) {
  auto& srv = impl_->server;
  // httplib's default adds SO_REUSEPORT, which would let a second server share
  // an occupied port instead of failing to bind.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const Service* svc = &service;
  srv.Post("/classify", [svc](const httplib::Request& req, httplib::Response& res) {
    auto r = svc->classify(req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  });
  srv.Get("/healthz", [svc](const httplib::Request&, httplib::Response& res) {
    auto r = svc->health();
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

std::optional<int> HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) return std::nullopt;
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) return std::nullopt;
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size())
    throw Error(ErrorCode::InvalidArgument, "--bind expects host:port, got '" + bind + "'");
  int port = -1;
  const char* first = bind.data() + colon + 1;
  const char* last = bind.data() + bind.size();
  auto [p, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || p != last || port < 0 || port > 65535)
    throw Error(ErrorCode::InvalidArgument, "--bind port out of range in '" + bind + "'");
  return {bind.substr(0, colon), port};
}

}  // namespace fndstack::cli
