// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/providers.hpp"

namespace typobench {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

std::string ResponseCache::key(std::string_view operation, const nlohmann::json& payload) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  std::string material(operation);
  material.push_back('\n');
  material += payload.dump();
  return sha256_hex(material);
}

fs::path ResponseCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::put(const std::string& key, const nlohmann::json& value) const {
  static std::atomic<unsigned long long> counter{0};
  const auto target = path_for(key);
  fs::create_directories(target.parent_path());
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
           << counter.fetch_add(1);
  const auto tmp = target.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    out << value.dump();
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------

CachedEmbeddingProvider::CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                 ResponseCache cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<Embedding> CachedEmbeddingProvider::embed_texts(std::span<const std::string> texts) {
  const auto identity = inner_->identity();
  std::vector<Embedding> out(texts.size());
  std::vector<std::string> keys(texts.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = ResponseCache::key("embed", {{"provider", identity}, {"text", texts[i]}});
    if (auto hit = cache_.get(keys[i]); hit && hit->is_array()) {
      out[i] = hit->get<Embedding>();
    } else {
      missing.push_back(i);
    }
  }
  if (!missing.empty()) {
    std::vector<std::string> batch;
    batch.reserve(missing.size());
    for (auto i : missing) batch.push_back(texts[i]);
    auto fresh = inner_->embed_texts(batch);
    for (std::size_t j = 0; j < missing.size(); ++j) {
      cache_.put(keys[missing[j]], fresh[j]);
      out[missing[j]] = std::move(fresh[j]);
    }
  }
  return out;
}

Embedding CachedEmbeddingProvider::embed_image(const std::string& image_ref) {
  const auto key =
      ResponseCache::key("embed_image", {{"provider", inner_->identity()}, {"image", image_ref}});
  if (auto hit = cache_.get(key); hit && hit->is_array()) return hit->get<Embedding>();
  auto v = inner_->embed_image(image_ref);
  cache_.put(key, v);
  return v;
}

CachedGenerationProvider::CachedGenerationProvider(std::shared_ptr<GenerationProvider> inner,
                                                   ResponseCache cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachedGenerationProvider::generate(const GenerationRequest& request) {
  const auto key = ResponseCache::key("generate", {{"provider", inner_->identity()},
                                                   {"prompt", request.prompt},
                                                   {"max_tokens", request.max_tokens},
                                                   {"attempt", request.attempt}});
  if (auto hit = cache_.get(key); hit && hit->is_string()) return hit->get<std::string>();
  auto text = inner_->generate(request);
  cache_.put(key, text);
  return text;
}

}  // namespace typobench
