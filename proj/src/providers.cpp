// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/providers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/random.hpp"
#include "typobench/textmatch.hpp"

namespace typobench {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ProviderError(ProviderError::Kind::dimension,
                        "cosine: dimension mismatch " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  }
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

void normalize_l2(Embedding& v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (!(sq > 0) || !std::isfinite(sq)) {
    throw ProviderError(ProviderError::Kind::malformed, "cannot normalize a zero vector");
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

Embedding EmbeddingProvider::embed_text(const std::string& text) {
  std::vector<std::string> one{text};
  auto out = embed_texts(one);
  return std::move(out.at(0));
}

// ---------------------------------------------------------------------------

StubEmbeddingProvider::StubEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) throw ValidationError("stub embedding dimension must be positive");
}

StubEmbeddingProvider StubEmbeddingProvider::from_dictionary_file(
    const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding fixture " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("embedding fixture " + path.string() + ": " + e.what());
  }
  const bool sectioned = doc.contains("texts") || doc.contains("images");
  const nlohmann::json& texts = sectioned ? doc.value("texts", nlohmann::json::object()) : doc;
  std::size_t dim = 0;
  auto probe = [&](const nlohmann::json& section) {
    for (const auto& [k, v] : section.items()) {
      if (dim == 0) dim = v.size();
    }
  };
  probe(texts);
  if (sectioned && doc.contains("images")) probe(doc["images"]);
  if (dim == 0) throw ValidationError("embedding fixture " + path.string() + " is empty");

  StubEmbeddingProvider stub(dim, seed);
  for (const auto& [k, v] : texts.items()) stub.add_text(k, v.get<Embedding>());
  if (sectioned && doc.contains("images")) {
    for (const auto& [k, v] : doc["images"].items()) stub.add_image(k, v.get<Embedding>());
  }
  return stub;
}

Embedding StubEmbeddingProvider::checked(Embedding v) const {
  if (v.size() != dimension_) {
    throw ValidationError("stub vector has dimension " + std::to_string(v.size()) +
                          ", expected " + std::to_string(dimension_));
  }
  normalize_l2(v);
  return v;
}

void StubEmbeddingProvider::add_text(std::string text, Embedding vector) {
  texts_.insert_or_assign(std::move(text), checked(std::move(vector)));
}

void StubEmbeddingProvider::add_image(std::string image_ref, Embedding vector) {
  images_.insert_or_assign(std::move(image_ref), checked(std::move(vector)));
}

Embedding StubEmbeddingProvider::hashed(std::string_view key) const {
  std::string material = std::to_string(seed_);
  material.push_back('\x1f');
  material.append(key);
  Rng rng(hash64(material));
  Embedding v(dimension_);
  for (double& x : v) x = 2.0 * rng.unit() - 1.0;
  normalize_l2(v);
  return v;
}

std::vector<Embedding> StubEmbeddingProvider::embed_texts(std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (auto it = texts_.find(t); it != texts_.end()) {
      out.push_back(it->second);
    } else {
      out.push_back(hashed("text:" + normalize(t)));
    }
  }
  return out;
}

Embedding StubEmbeddingProvider::embed_image(const std::string& image_ref) {
  if (auto it = images_.find(image_ref); it != images_.end()) return it->second;
  return hashed("image:" + image_ref);
}

std::string StubEmbeddingProvider::identity() const {
  return "stub-embed:dim=" + std::to_string(dimension_) + ":seed=" + std::to_string(seed_) +
         ":entries=" + std::to_string(texts_.size() + images_.size());
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& default_vocabulary() {
  static const std::vector<std::string> words = {
      "green", "red",     "blue",   "stop",   "go",     "open",   "closed",
      "exit",  "sale",    "coffee", "pizza",  "11:00",  "7",      "42",
      "paris", "london",  "monday", "sunday", "nike",   "pepsi",  "yes",
      "no",    "left",    "right",  "north",  "south",  "1985",   "beer",
      "water", "welcome", "hotel",  "police", "bakery", "museum", "express"};
  return words;
}

}  // namespace

StubGenerationProvider::StubGenerationProvider(std::vector<std::string> vocabulary)
    : vocabulary_(vocabulary.empty() ? default_vocabulary() : std::move(vocabulary)) {}

std::string StubGenerationProvider::generate(const GenerationRequest& request) {
  const auto h = hash64(request.prompt + '\x1f' + std::to_string(request.attempt));
  const auto& word = vocabulary_[h % vocabulary_.size()];
  nlohmann::json out = {{"misleading", word}};
  return out.dump();
}

// ---------------------------------------------------------------------------

std::string expand_template(std::string_view tmpl, std::string_view class_name) {
  std::string out(tmpl);
  if (auto pos = out.find("{}"); pos != std::string::npos) {
    out.replace(pos, 2, class_name);
  } else {
    throw ValidationError("prompt template without {} placeholder: " + std::string(tmpl));
  }
  return out;
}

ClassEmbedder::ClassEmbedder(EmbeddingProvider& provider, std::vector<std::string> templates)
    : provider_(provider), templates_(std::move(templates)) {
  if (templates_.empty()) throw ValidationError("class embedder needs at least one template");
  for (const auto& t : templates_) (void)expand_template(t, "x");
}

Embedding ClassEmbedder::average(std::span<const Embedding> vectors) const {
  Embedding mean(vectors.front().size(), 0.0);
  for (const auto& v : vectors) {
    if (v.size() != mean.size()) {
      throw ProviderError(ProviderError::Kind::dimension, "inconsistent embedding dimension");
    }
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  normalize_l2(mean);
  return mean;
}

void ClassEmbedder::warm(const std::vector<std::string>& class_names) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& c : class_names) {
      if (!memo_.contains(c)) missing.push_back(c);
    }
  }
  if (missing.empty()) return;
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());

  std::vector<std::string> prompts;
  prompts.reserve(missing.size() * templates_.size());
  for (const auto& c : missing) {
    for (const auto& t : templates_) prompts.push_back(expand_template(t, c));
  }
  const auto vectors = provider_.embed_texts(prompts);
  if (vectors.size() != prompts.size()) {
    throw ProviderError(ProviderError::Kind::malformed, "embedding count mismatch");
  }
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    std::span<const Embedding> group(vectors.data() + i * templates_.size(), templates_.size());
    memo_.try_emplace(missing[i], average(group));
  }
}

const Embedding& ClassEmbedder::embed(const std::string& class_name) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(class_name); it != memo_.end()) return it->second;
  }
  warm({class_name});
  std::lock_guard lock(mu_);
  return memo_.at(class_name);
}

}  // namespace typobench
