// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace typobench {

using Embedding = std::vector<double>;

/// Dot product of two unit vectors, clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

/// Scales to unit L2 norm. Throws ProviderError on a zero vector.
void normalize_l2(Embedding& v);

/// Text and image embeddings in a shared space. Implementations must be safe
/// to call from several workers at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// One unit-norm vector per input, same order.
  virtual std::vector<Embedding> embed_texts(std::span<const std::string> texts) = 0;
  virtual Embedding embed_image(const std::string& image_ref) = 0;
  virtual std::size_t dimension() const = 0;
  /// Stable description used in cache keys and manifest headers.
  virtual std::string identity() const = 0;

  Embedding embed_text(const std::string& text);
};

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 32;
  /// Retry ordinal. Not sent over the wire; it separates cache entries and
  /// seeds the offline stub.
  int attempt = 0;
};

class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual std::string identity() const = 0;
};

/// Offline embedding provider. Strings found in the dictionary map to their
/// fixture vector; everything else is hashed (seeded SHA-256 of the
/// normalized text) and expanded into a unit vector.
class StubEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::size_t dimension = 64, std::uint64_t seed = 0);

  /// Fixture JSON: `{"texts": {str: [num]}, "images": {str: [num]}}`, or a
  /// flat `{str: [num]}` object treated as texts.
  static StubEmbeddingProvider from_dictionary_file(const std::filesystem::path& path,
                                                    std::uint64_t seed = 0);

  void add_text(std::string text, Embedding vector);
  void add_image(std::string image_ref, Embedding vector);

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override;
  Embedding embed_image(const std::string& image_ref) override;
  std::size_t dimension() const override { return dimension_; }
  std::string identity() const override;

  Embedding hashed(std::string_view key) const;

 private:
  Embedding checked(Embedding v) const;

  std::size_t dimension_;
  std::uint64_t seed_;
  std::map<std::string, Embedding, std::less<>> texts_;
  std::map<std::string, Embedding, std::less<>> images_;
};

/// Offline generation provider: answers the misleading-word prompt with a
/// word picked from a fixed vocabulary by hashing (prompt, attempt).
class StubGenerationProvider final : public GenerationProvider {
 public:
  explicit StubGenerationProvider(std::vector<std::string> vocabulary = {});

  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return "stub-generate"; }

 private:
  std::vector<std::string> vocabulary_;
};

/// Class-name embeddings averaged over prompt templates and renormalized.
/// Templates use `{}` as the class placeholder. Memoized and thread-safe.
class ClassEmbedder {
 public:
  ClassEmbedder(EmbeddingProvider& provider, std::vector<std::string> templates);

  const Embedding& embed(const std::string& class_name);
  /// Batch variant; fills the memo for all names with one provider call.
  void warm(const std::vector<std::string>& class_names);

  EmbeddingProvider& provider() { return provider_; }
  const std::vector<std::string>& templates() const { return templates_; }

 private:
  Embedding average(std::span<const Embedding> vectors) const;

  EmbeddingProvider& provider_;
  std::vector<std::string> templates_;
  std::mutex mu_;
  std::map<std::string, Embedding, std::less<>> memo_;
};

std::string expand_template(std::string_view tmpl, std::string_view class_name);

// ---------------------------------------------------------------------------
// HTTP clients for the sidecar wire protocol.

enum class ImagePayload { base64, path };

struct HttpOptions {
  std::chrono::milliseconds timeout{30000};
  int max_inflight = 4;
  ImagePayload image_payload = ImagePayload::base64;
  int max_tokens = 32;
};

/// POST /embed {"texts": [...]} -> {"vectors": [[...]], "dim": n} and
/// POST /embed_image {"image_b64"|"path": ...} -> {"vector": [...], "dim": n}.
/// Vectors are renormalized client-side.
class HttpEmbeddingClient final : public EmbeddingProvider {
 public:
  HttpEmbeddingClient(std::string endpoint, HttpOptions options = {});

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override;
  Embedding embed_image(const std::string& image_ref) override;
  std::size_t dimension() const override;
  std::string identity() const override { return "http-embed:" + endpoint_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);
  Embedding parse_vector(const nlohmann::json& v);

  std::string endpoint_;
  HttpOptions options_;
  std::counting_semaphore<64> inflight_;
  mutable std::mutex mu_;
  std::size_t dimension_ = 0;
};

/// POST /generate {"prompt": str, "max_tokens": n} -> {"text": str}.
class HttpGenerationClient final : public GenerationProvider {
 public:
  HttpGenerationClient(std::string endpoint, HttpOptions options = {});

  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return "http-generate:" + endpoint_; }

 private:
  std::string endpoint_;
  HttpOptions options_;
  std::counting_semaphore<64> inflight_;
};

/// Shared POST helper: returns the parsed JSON body or throws ProviderError.
nlohmann::json post_json(const std::string& endpoint, const std::string& path,
                         const nlohmann::json& body, std::chrono::milliseconds timeout);

// ---------------------------------------------------------------------------
// Content-addressed response cache.

/// Directory of `<aa>/<sha256>.json` files. Writes are atomic
/// (temp file + rename), so concurrent writers never expose partial files.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  /// SHA-256 over the operation name and the canonical JSON payload.
  static std::string key(std::string_view operation, const nlohmann::json& payload);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path root_;
};

class CachedEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, ResponseCache cache);

  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override;
  Embedding embed_image(const std::string& image_ref) override;
  std::size_t dimension() const override { return inner_->dimension(); }
  std::string identity() const override { return inner_->identity(); }

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  ResponseCache cache_;
};

class CachedGenerationProvider final : public GenerationProvider {
 public:
  CachedGenerationProvider(std::shared_ptr<GenerationProvider> inner, ResponseCache cache);

  std::string generate(const GenerationRequest& request) override;
  std::string identity() const override { return inner_->identity(); }

 private:
  std::shared_ptr<GenerationProvider> inner_;
  ResponseCache cache_;
};

}  // namespace typobench
