// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typobench/corpus.hpp"
#include "typobench/providers.hpp"
#include "typobench/subsets.hpp"
#include "typobench/taxonomy.hpp"

namespace typobench {

inline constexpr std::string_view kDefaultMcTemplate =
    "Which object is present in the image? (A) {A} (B) {B} (C) {C} (D) {D}. "
    "Answer with only the option letter.";

inline constexpr std::string_view kDefaultOePrompt =
    "What objects can be seen in the image? Answer only with object names.";

/// Few-shot prompt for the misleading text-attack word. `{question}` and
/// `{answers}` are substituted.
extern const std::string_view kMisleadingWordPrompt;

inline constexpr std::array<char, 4> kOptionLetters = {'A', 'B', 'C', 'D'};

struct McQuestion {
  std::string prompt;
  std::array<std::string, 4> options;
  char correct_letter = 'A';
  NegativeTriple negatives;
};

/// Replaces {A}..{D} in `tmpl` with the options.
std::string format_mc_prompt(std::string_view tmpl, const std::array<std::string, 4>& options);

/// Shuffles {gt, hard, medium, easy} uniformly with `seed`.
McQuestion make_mc_question(const std::string& gt, const NegativeTriple& negatives,
                            std::uint64_t seed, std::string_view tmpl = kDefaultMcTemplate);

struct OeQuestion {
  std::string prompt;
  /// Pruned labels, most similar to the image first.
  std::vector<std::string> acceptable_answers;
};

/// Ground truth and the similarity ranking it came from.
struct GroundTruth {
  std::string label;
  /// Pruned labels sorted by similarity, descending (ties by name).
  std::vector<std::string> ranked;
  std::vector<double> scores;
};

/// Prunes ancestors, prefers labels at depth >= `min_depth`, and takes the
/// label whose template-averaged text embedding is closest to `image`.
GroundTruth select_ground_truth(const std::vector<std::string>& labels, const Taxonomy& taxonomy,
                                ClassEmbedder& classes, const Embedding& image,
                                int min_depth = 3);

OeQuestion make_oe_question(const GroundTruth& gt, std::string_view prompt = kDefaultOePrompt);

/// The negative for an object-attack level.
const std::string& obj_attack_word(const NegativeTriple& negatives, Level level);

/// The misleading-word prompt with the question and the distinct answers
/// (first-occurrence order, comma separated) filled in.
std::string format_misleading_prompt(std::string_view question,
                                     std::span<const std::string> answers);

/// Extracts `misleading` from `{"misleading": "..."}`, either the whole
/// response or its first {...} block.
std::optional<std::string> parse_misleading(std::string_view response);

/// 1-3 words, and no normalized word shared with any gold answer.
bool acceptable_misleading(std::string_view word, std::span<const std::string> answers);

struct MisleadingWord {
  std::optional<std::string> word;
  int attempts = 0;
  /// Set when `word` is empty.
  std::string skip_reason;
};

/// Asks `llm` up to `max_attempts` times for an acceptable word.
MisleadingWord gen_text_attack_word(std::string_view question,
                                    std::span<const std::string> answers,
                                    GenerationProvider& llm, int max_attempts = 3,
                                    int max_tokens = 32);

}  // namespace typobench
