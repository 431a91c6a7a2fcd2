// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "typobench/manifest.hpp"
#include "typobench/providers.hpp"
#include "typobench/subsets.hpp"

namespace typobench {

/// Option index (0-3) named by a free-form MC response, or nullopt.
///
/// Pattern families are tried in order and the first family with any match
/// decides; a family matching two different letters makes the response
/// ambiguous (nullopt):
///   1. "answer: (c)", "answer is d."
///   2. "assistant: b"
///   3. "(d)" anywhere
///   4. "c." as a standalone token
///   5. the whole response is a single letter
/// With no letter found, the normalized response must equal, or contain as
/// whole words, exactly one normalized option.
std::optional<int> extract_mc_choice(std::string_view response,
                                     std::span<const std::string> options);

/// Mean of exact index matches; unextracted predictions count as wrong.
double mc_accuracy(std::span<const std::optional<int>> predicted, std::span<const int> gold);

/// Leave-one-out VQA accuracy over exactly ten human answers:
/// mean over i of min(1, #{j != i : a_j == prediction} / 3).
double vqa_accuracy(std::string_view prediction, std::span<const std::string> answers,
                    bool normalize_text = true);

/// Class vocabulary with template-averaged embeddings.
class ClassSpace {
 public:
  ClassSpace(std::vector<std::string> classes, ClassEmbedder& embedder);

  const std::vector<std::string>& classes() const { return classes_; }
  bool contains(std::string_view name) const;

  /// The k classes most similar to `caption` (ties by name). `extra`, if
  /// set and not already present, joins the space for this query only.
  std::vector<std::string> top_k(const Embedding& caption, int k,
                                 const std::optional<std::string>& extra = std::nullopt);

  ClassEmbedder& embedder() { return embedder_; }

 private:
  std::vector<std::string> classes_;
  ClassEmbedder& embedder_;
};

/// 1 iff any gold class is among the top k classes for the caption.
int clip_match_at_k(const Embedding& caption, std::span<const std::string> gold,
                    ClassSpace& space, int k = 5);
int clip_match_at_k(const std::string& caption, std::span<const std::string> gold,
                    ClassSpace& space, int k = 5);

/// clip_match_at_k(gold) - clip_match_at_k({attack_word}), in {-1, 0, 1}.
int r_clip_match(const Embedding& caption, std::span<const std::string> gold,
                 const std::string& attack_word, ClassSpace& space, int k = 5);
int r_clip_match(const std::string& caption, std::span<const std::string> gold,
                 const std::string& attack_word, ClassSpace& space, int k = 5);

struct Prediction {
  std::string image_id;
  std::string subset;
  std::string response;
};

/// JSONL of {image_id, subset, response}. Duplicate (image_id, subset)
/// pairs raise ValidationError.
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

struct SubsetScore {
  std::string metric;
  double sum = 0;
  /// Predictions scored.
  std::size_t count = 0;
  /// Manifest items with no prediction.
  std::size_t skipped = 0;
  /// MC responses with no extractable choice (counted as wrong).
  std::size_t unextracted = 0;

  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

struct OrphanPrediction {
  std::string image_id;
  std::string subset;
  std::string reason;
};

struct ScoreReport {
  std::map<std::string, SubsetScore> subsets;
  std::vector<OrphanPrediction> orphans;

  /// Mean of a family's clean subset, if scored.
  std::optional<double> clean_mean(Task task) const;
  std::optional<double> level_mean(Task task, Level level) const;
  /// Average over the family's scored attack levels.
  std::optional<double> attack_average(Task task) const;

  nlohmann::ordered_json to_json() const;
  /// Aligned columns: family | Clean | Easy | Med. | Hard | AVG.
  std::string to_table() const;
};

struct ScoreOptions {
  int k = 5;
  bool vqa_normalize = true;
};

/// Routes each prediction to its subset's metric. `space` may be null when
/// no object open-ended subset is present.
ScoreReport score_predictions(const std::vector<Prediction>& predictions,
                              const std::map<std::string, Manifest>& manifests,
                              ClassSpace* space, const ScoreOptions& options = {});

}  // namespace typobench
