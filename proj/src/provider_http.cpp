// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/providers.hpp"

namespace typobench {
namespace {

using Kind = ProviderError::Kind;

class InflightSlot {
 public:
  explicit InflightSlot(std::counting_semaphore<64>& sem) : sem_(sem) { sem_.acquire(); }
  ~InflightSlot() { sem_.release(); }
  InflightSlot(const InflightSlot&) = delete;
  InflightSlot& operator=(const InflightSlot&) = delete;

 private:
  std::counting_semaphore<64>& sem_;
};

int clamp_inflight(int n) {
  if (n < 1 || n > 64) throw ValidationError("max_inflight must be in [1, 64]");
  return n;
}

}  // namespace

nlohmann::json post_json(const std::string& endpoint, const std::string& path,
                         const nlohmann::json& body, std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint);
  if (!client.is_valid()) {
    throw ProviderError(Kind::transport, "invalid endpoint '" + endpoint + "'");
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= timeout);
    throw ProviderError(timed_out ? Kind::timeout : Kind::transport,
                        "POST " + endpoint + path + ": " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw ProviderError(Kind::http_status, "POST " + endpoint + path + " returned HTTP " +
                                               std::to_string(res->status) + ": " +
                                               res->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(Kind::malformed, "POST " + endpoint + path + ": invalid JSON (" +
                                             e.what() + ")");
  }
}

// ---------------------------------------------------------------------------

HttpEmbeddingClient::HttpEmbeddingClient(std::string endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      inflight_(clamp_inflight(options.max_inflight)) {}

nlohmann::json HttpEmbeddingClient::post(const std::string& path, const nlohmann::json& body) {
  InflightSlot slot(inflight_);
  return post_json(endpoint_, path, body, options_.timeout);
}

Embedding HttpEmbeddingClient::parse_vector(const nlohmann::json& v) {
  if (!v.is_array() || v.empty()) {
    throw ProviderError(Kind::malformed, "embedding is not a non-empty array");
  }
  Embedding out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ProviderError(Kind::malformed, "embedding has a non-number entry");
    out.push_back(x.get<double>());
  }
  std::lock_guard lock(mu_);
  if (dimension_ == 0) {
    dimension_ = out.size();
  } else if (out.size() != dimension_) {
    throw ProviderError(Kind::dimension, "embedding dimension " + std::to_string(out.size()) +
                                             " differs from " + std::to_string(dimension_));
  }
  normalize_l2(out);
  return out;
}

std::vector<Embedding> HttpEmbeddingClient::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  const nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto reply = post("/embed", body);
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw ProviderError(Kind::malformed, "/embed response lacks a 'vectors' array");
  }
  const auto& vectors = reply["vectors"];
  if (vectors.size() != texts.size()) {
    throw ProviderError(Kind::malformed, "/embed returned " + std::to_string(vectors.size()) +
                                             " vectors for " + std::to_string(texts.size()) +
                                             " texts");
  }
  std::vector<Embedding> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(parse_vector(v));
  if (reply.contains("dim") && reply["dim"].is_number_integer() &&
      reply["dim"].get<std::size_t>() != out.front().size()) {
    throw ProviderError(Kind::dimension, "/embed 'dim' disagrees with vector length");
  }
  return out;
}

Embedding HttpEmbeddingClient::embed_image(const std::string& image_ref) {
  nlohmann::json body;
  if (options_.image_payload == ImagePayload::path) {
    body["path"] = image_ref;
  } else {
    std::ifstream in(image_ref, std::ios::binary);
    if (!in) throw ValidationError("cannot read image " + image_ref);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    body["image_b64"] = base64_encode(bytes.str());
  }
  const auto reply = post("/embed_image", body);
  if (!reply.is_object() || !reply.contains("vector")) {
    throw ProviderError(Kind::malformed, "/embed_image response lacks 'vector'");
  }
  return parse_vector(reply["vector"]);
}

std::size_t HttpEmbeddingClient::dimension() const {
  std::lock_guard lock(mu_);
  return dimension_;
}

// ---------------------------------------------------------------------------

HttpGenerationClient::HttpGenerationClient(std::string endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      inflight_(clamp_inflight(options.max_inflight)) {}

std::string HttpGenerationClient::generate(const GenerationRequest& request) {
  const nlohmann::json body = {{"prompt", request.prompt}, {"max_tokens", request.max_tokens}};
  nlohmann::json reply;
  {
    InflightSlot slot(inflight_);
    reply = post_json(endpoint_, "/generate", body, options_.timeout);
  }
  if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
    throw ProviderError(Kind::malformed, "/generate response lacks a 'text' string");
  }
  return reply["text"].get<std::string>();
}

}  // namespace typobench
