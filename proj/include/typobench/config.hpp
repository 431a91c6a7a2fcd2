// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "typobench/providers.hpp"
#include "typobench/render.hpp"
#include "typobench/textmatch.hpp"

namespace typobench {

struct ProviderConfig {
  bool stub = true;
  std::string embed_endpoint = "http://127.0.0.1:8765";
  std::string generate_endpoint = "http://127.0.0.1:8765";
  int timeout_ms = 30000;
  int max_inflight = 4;
  /// "base64" or "path".
  std::string image_payload = "base64";
  int max_tokens = 32;
  /// Passed through to the generation service; recorded for provenance only.
  double temperature = 0.0;
  std::size_t stub_dimension = 64;
  std::uint64_t stub_seed = 0;
  /// Optional fixture file for dictionary-mode stub embeddings.
  std::string stub_dictionary;
};

/// Every tunable that can change output bytes, plus input/output paths.
/// Paths and the worker count are excluded from the config hash.
struct RunConfig {
  std::uint64_t global_seed = 0;

  // placement
  int grid_n = 7;
  int obj_max_attempts = 100;

  // rendering
  std::string font_family = "DejaVuSans";
  std::string font_file = TYPOBENCH_DEFAULT_FONT;
  int obj_font_min = 24;
  int obj_font_max = 32;
  std::vector<std::string> obj_colors = default_obj_colors();
  double text_font_ratio = 0.05;
  int text_font_min = 12;
  int stroke_divisor = 12;

  // key-text matching
  double fuzzy_alpha = 0.5;
  double fuzzy_threshold = 0.6;
  int fuzzy_max_span = 5;
  /// Empty means the built-in list.
  std::string stopwords_file;

  // questions
  int min_gt_depth = 3;
  std::string mc_template;
  std::string oe_prompt;
  int llm_attempts = 3;
  std::vector<std::string> class_templates;

  // scoring
  int clip_k = 5;
  bool vqa_normalize = true;

  ProviderConfig providers;

  // paths
  std::string taxonomy;
  std::string class_names;
  std::string corpus;
  std::string out_dir;
  std::string cache_dir;
  int workers = 1;

  RunConfig();

  ObjFontOptions obj_font_options() const;
  TextFontOptions text_font_options() const;
  FuzzyParams fuzzy_params() const;
  std::vector<std::string> stopwords() const;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

/// The seven prompt templates averaged into class embeddings.
const std::vector<std::string>& default_class_templates();

/// Overlays keys present in `j` onto `base`. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Output-affecting settings in a fixed key order (no paths, no workers).
/// Includes digests of the font and stopword files.
nlohmann::ordered_json hashed_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// Full config including paths, for `--dump-config`.
nlohmann::ordered_json config_to_json(const RunConfig& config);

struct Providers {
  std::shared_ptr<EmbeddingProvider> embed;
  std::shared_ptr<GenerationProvider> generate;
};

/// Stub or HTTP providers per the config, wrapped in the response cache
/// when `cache_dir` is set.
Providers make_providers(const RunConfig& config);

}  // namespace typobench
