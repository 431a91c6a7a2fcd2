// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "typobench/attackgen.hpp"
#include "typobench/error.hpp"
#include "typobench/hashing.hpp"

namespace typobench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& default_class_templates() {
  static const std::vector<std::string> templates = {
      "a photo of a {}.",        "a photo of the {}.",      "a picture of a {}.",
      "an image of a {}.",       "a close-up photo of a {}.", "a cropped photo of a {}.",
      "a good photo of a {}.",
  };
  return templates;
}

RunConfig::RunConfig()
    : mc_template(kDefaultMcTemplate),
      oe_prompt(kDefaultOePrompt),
      class_templates(default_class_templates()) {}

ObjFontOptions RunConfig::obj_font_options() const {
  return {obj_font_min, obj_font_max, obj_colors, font_family};
}

TextFontOptions RunConfig::text_font_options() const {
  return {text_font_ratio, text_font_min, stroke_divisor, font_family};
}

FuzzyParams RunConfig::fuzzy_params() const {
  return {fuzzy_alpha, fuzzy_threshold, fuzzy_max_span};
}

std::vector<std::string> RunConfig::stopwords() const {
  return stopwords_file.empty() ? default_stopwords() : load_stopwords(stopwords_file);
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  require(grid_n >= 2, "grid_n must be >= 2");
  require(obj_max_attempts >= 1, "obj_max_attempts must be >= 1");
  require(obj_font_min > 0 && obj_font_max >= obj_font_min, "bad object font size range");
  require(!obj_colors.empty(), "obj_colors is empty");
  for (const auto& c : obj_colors) color_bgr(c);
  require(text_font_ratio > 0, "text_font_ratio must be positive");
  require(text_font_min > 0, "text_font_min must be positive");
  require(stroke_divisor > 0, "stroke_divisor must be positive");
  require(fuzzy_alpha >= 0 && fuzzy_alpha <= 1, "fuzzy_alpha must be in [0, 1]");
  require(fuzzy_max_span >= 1, "fuzzy_max_span must be >= 1");
  require(llm_attempts >= 1, "llm_attempts must be >= 1");
  require(!class_templates.empty(), "class_templates is empty");
  require(clip_k >= 1, "clip_k must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(providers.image_payload == "base64" || providers.image_payload == "path",
          "image_payload must be 'base64' or 'path'");
  require(providers.max_inflight >= 1 && providers.max_inflight <= 64,
          "max_inflight must be in [1, 64]");
  require(providers.timeout_ms > 0, "timeout_ms must be positive");
  require(providers.stub_dimension > 0, "stub_dimension must be positive");
}

namespace {

class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      node_ = &root[name];
      if (!node_->is_object()) throw ValidationError(std::string("config: '") + name + "' is not an object");
    }
  }

  template <typename T>
  void take(const char* key, T& field) {
    allowed_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      field = (*node_)[key].get<T>();
    } catch (const json::exception& e) {
      throw ValidationError("config: " + name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!allowed_.contains(k)) throw ValidationError("config: unknown key " + name_ + "." + k);
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> allowed_;
};

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return sha256_hex(bytes.str());
}

std::string stopword_digest(const RunConfig& c) {
  std::string joined;
  for (const auto& w : c.stopwords()) joined += w + "\n";
  return sha256_hex(joined);
}

std::string embed_identity(const RunConfig& c) {
  const auto& p = c.providers;
  if (!p.stub) return "http-embed:" + p.embed_endpoint;
  std::string id = "stub-embed:dim=" + std::to_string(p.stub_dimension) +
                   ":seed=" + std::to_string(p.stub_seed);
  if (!p.stub_dictionary.empty()) id += ":dict=" + file_digest(p.stub_dictionary);
  return id;
}

std::string generate_identity(const RunConfig& c) {
  return c.providers.stub ? "stub-generate" : "http-generate:" + c.providers.generate_endpoint;
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::set<std::string> sections = {"seed",      "placement", "render",
                                                 "textmatch", "questions", "scoring",
                                                 "providers", "paths",     "workers"};
  for (const auto& [k, v] : j.items()) {
    if (!sections.contains(k)) throw ValidationError("config: unknown key " + k);
  }
  if (j.contains("seed")) c.global_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();

  Section placement(j, "placement");
  placement.take("grid_n", c.grid_n);
  placement.take("obj_max_attempts", c.obj_max_attempts);
  placement.finish();

  Section render(j, "render");
  render.take("font_family", c.font_family);
  render.take("font_file", c.font_file);
  render.take("obj_font_min", c.obj_font_min);
  render.take("obj_font_max", c.obj_font_max);
  render.take("obj_colors", c.obj_colors);
  render.take("text_font_ratio", c.text_font_ratio);
  render.take("text_font_min", c.text_font_min);
  render.take("stroke_divisor", c.stroke_divisor);
  render.finish();

  Section tm(j, "textmatch");
  tm.take("alpha", c.fuzzy_alpha);
  tm.take("threshold", c.fuzzy_threshold);
  tm.take("max_span", c.fuzzy_max_span);
  tm.take("stopwords_file", c.stopwords_file);
  tm.finish();

  Section q(j, "questions");
  q.take("min_gt_depth", c.min_gt_depth);
  q.take("mc_template", c.mc_template);
  q.take("oe_prompt", c.oe_prompt);
  q.take("llm_attempts", c.llm_attempts);
  q.take("class_templates", c.class_templates);
  q.finish();

  Section s(j, "scoring");
  s.take("clip_k", c.clip_k);
  s.take("vqa_normalize", c.vqa_normalize);
  s.finish();

  Section p(j, "providers");
  p.take("stub", c.providers.stub);
  p.take("embed_endpoint", c.providers.embed_endpoint);
  p.take("generate_endpoint", c.providers.generate_endpoint);
  p.take("timeout_ms", c.providers.timeout_ms);
  p.take("max_inflight", c.providers.max_inflight);
  p.take("image_payload", c.providers.image_payload);
  p.take("max_tokens", c.providers.max_tokens);
  p.take("temperature", c.providers.temperature);
  p.take("stub_dimension", c.providers.stub_dimension);
  p.take("stub_seed", c.providers.stub_seed);
  p.take("stub_dictionary", c.providers.stub_dictionary);
  p.finish();

  Section paths(j, "paths");
  paths.take("taxonomy", c.taxonomy);
  paths.take("class_names", c.class_names);
  paths.take("corpus", c.corpus);
  paths.take("out_dir", c.out_dir);
  paths.take("cache_dir", c.cache_dir);
  paths.finish();

  c.validate();
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

ojson hashed_config_json(const RunConfig& c) {
  ojson j;
  j["seed"] = c.global_seed;
  j["placement"] = {{"grid_n", c.grid_n},
                    {"tertiles", "near_ceiling"},
                    {"obj_max_attempts", c.obj_max_attempts}};
  j["render"] = {{"font_family", c.font_family},
                 {"font_sha256", file_digest(c.font_file)},
                 {"obj_font_min", c.obj_font_min},
                 {"obj_font_max", c.obj_font_max},
                 {"obj_colors", c.obj_colors},
                 {"text_font_ratio", c.text_font_ratio},
                 {"text_font_min", c.text_font_min},
                 {"stroke_divisor", c.stroke_divisor}};
  j["textmatch"] = {{"alpha", c.fuzzy_alpha},
                    {"threshold", c.fuzzy_threshold},
                    {"max_span", c.fuzzy_max_span},
                    {"stopwords_sha256", stopword_digest(c)}};
  j["questions"] = {{"min_gt_depth", c.min_gt_depth},
                    {"mc_template", c.mc_template},
                    {"oe_prompt", c.oe_prompt},
                    {"misleading_prompt_sha256", sha256_hex(kMisleadingWordPrompt)},
                    {"llm_attempts", c.llm_attempts},
                    {"class_templates", c.class_templates}};
  j["scoring"] = {{"clip_k", c.clip_k}, {"vqa_normalize", c.vqa_normalize}};
  j["providers"] = {{"embed", embed_identity(c)},
                    {"generate", generate_identity(c)},
                    {"max_tokens", c.providers.max_tokens},
                    {"temperature", c.providers.temperature}};
  return j;
}

std::string config_hash(const RunConfig& c) { return sha256_hex(hashed_config_json(c).dump()); }

ojson config_to_json(const RunConfig& c) {
  ojson j;
  j["seed"] = c.global_seed;
  j["workers"] = c.workers;
  j["placement"] = {{"grid_n", c.grid_n}, {"obj_max_attempts", c.obj_max_attempts}};
  j["render"] = {{"font_family", c.font_family},
                 {"font_file", c.font_file},
                 {"obj_font_min", c.obj_font_min},
                 {"obj_font_max", c.obj_font_max},
                 {"obj_colors", c.obj_colors},
                 {"text_font_ratio", c.text_font_ratio},
                 {"text_font_min", c.text_font_min},
                 {"stroke_divisor", c.stroke_divisor}};
  j["textmatch"] = {{"alpha", c.fuzzy_alpha},
                    {"threshold", c.fuzzy_threshold},
                    {"max_span", c.fuzzy_max_span},
                    {"stopwords_file", c.stopwords_file}};
  j["questions"] = {{"min_gt_depth", c.min_gt_depth},
                    {"mc_template", c.mc_template},
                    {"oe_prompt", c.oe_prompt},
                    {"llm_attempts", c.llm_attempts},
                    {"class_templates", c.class_templates}};
  j["scoring"] = {{"clip_k", c.clip_k}, {"vqa_normalize", c.vqa_normalize}};
  const auto& p = c.providers;
  j["providers"] = {{"stub", p.stub},
                    {"embed_endpoint", p.embed_endpoint},
                    {"generate_endpoint", p.generate_endpoint},
                    {"timeout_ms", p.timeout_ms},
                    {"max_inflight", p.max_inflight},
                    {"image_payload", p.image_payload},
                    {"max_tokens", p.max_tokens},
                    {"temperature", p.temperature},
                    {"stub_dimension", p.stub_dimension},
                    {"stub_seed", p.stub_seed},
                    {"stub_dictionary", p.stub_dictionary}};
  j["paths"] = {{"taxonomy", c.taxonomy},
                {"class_names", c.class_names},
                {"corpus", c.corpus},
                {"out_dir", c.out_dir},
                {"cache_dir", c.cache_dir}};
  return j;
}

Providers make_providers(const RunConfig& c) {
  const auto& p = c.providers;
  Providers out;
  if (p.stub) {
    if (p.stub_dictionary.empty()) {
      out.embed = std::make_shared<StubEmbeddingProvider>(p.stub_dimension, p.stub_seed);
    } else {
      out.embed = std::make_shared<StubEmbeddingProvider>(
          StubEmbeddingProvider::from_dictionary_file(p.stub_dictionary, p.stub_seed));
    }
    out.generate = std::make_shared<StubGenerationProvider>();
  } else {
    HttpOptions opts;
    opts.timeout = std::chrono::milliseconds(p.timeout_ms);
    opts.max_inflight = p.max_inflight;
    opts.image_payload = p.image_payload == "path" ? ImagePayload::path : ImagePayload::base64;
    opts.max_tokens = p.max_tokens;
    out.embed = std::make_shared<HttpEmbeddingClient>(p.embed_endpoint, opts);
    out.generate = std::make_shared<HttpGenerationClient>(p.generate_endpoint, opts);
  }
  if (!c.cache_dir.empty()) {
    ResponseCache cache(c.cache_dir);
    out.embed = std::make_shared<CachedEmbeddingProvider>(out.embed, cache);
    out.generate = std::make_shared<CachedGenerationProvider>(out.generate, cache);
  }
  return out;
}

}  // namespace typobench
