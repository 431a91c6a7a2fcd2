// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typobench/corpus.hpp"
#include "typobench/geometry.hpp"

namespace typobench {

/// NFKC, lowercase, punctuation stripped, whitespace collapsed and trimmed.
std::string normalize(std::string_view text);

/// UTF-8 to code points; invalid sequences become U+FFFD.
std::u32string to_code_points(std::string_view utf8);

/// LCS length over max(len a, len b); 1 when both are empty.
double lcs_ratio(std::u32string_view a, std::u32string_view b);
double lcs_ratio(std::string_view a, std::string_view b);

/// Levenshtein distance over max(len a, len b); 0 when both are empty.
double normalized_edit_distance(std::u32string_view a, std::u32string_view b);
double normalized_edit_distance(std::string_view a, std::string_view b);

std::size_t lcs_length(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct FuzzyParams {
  double alpha = 0.5;
  double threshold = 0.6;  // strict: accept iff s > threshold
  int max_span = 5;
};

/// s = alpha * lcs_ratio + (1 - alpha) * (1 - normalized_edit_distance).
double similarity(std::string_view a, std::string_view b, double alpha = 0.5);

enum class MatchMethod { exact, fuzzy, keyword, largest_box_fallback };
enum class MatchSource { answer, question };

std::string_view to_string(MatchMethod m);
std::string_view to_string(MatchSource s);
MatchMethod match_method_from_string(std::string_view s);
MatchSource match_source_from_string(std::string_view s);

struct KeyTextRegion {
  BBox box;
  std::vector<std::size_t> matched_tokens;
  MatchMethod method = MatchMethod::exact;
  MatchSource source = MatchSource::answer;
  /// Best fuzzy score, when method is fuzzy.
  std::optional<double> score;

  friend bool operator==(const KeyTextRegion&, const KeyTextRegion&) = default;
};

/// The fixed English function-word list used by keyword matching.
const std::vector<std::string>& default_stopwords();
/// One word per line; blank lines and `#` comments ignored.
std::vector<std::string> load_stopwords(const std::filesystem::path& path);

/// Three-stage exact / fuzzy / keyword search for the OCR region that
/// supports an answer. Targets passed to the per-stage functions must
/// already be normalized.
class KeyTextMatcher {
 public:
  explicit KeyTextMatcher(FuzzyParams params = {},
                          std::vector<std::string> stopwords = default_stopwords());

  std::optional<KeyTextRegion> exact_match(std::string_view target,
                                           std::span<const OcrToken> tokens) const;
  std::optional<KeyTextRegion> fuzzy_phrase_match(std::string_view target,
                                                  std::span<const OcrToken> tokens) const;
  std::optional<KeyTextRegion> keyword_fallback(std::string_view target,
                                                std::span<const OcrToken> tokens) const;

  /// Content words of a normalized target: stopwords and words shorter than
  /// three characters removed, duplicates dropped, order kept.
  std::vector<std::string> keywords(std::string_view target) const;

  /// Tries every non yes/no answer (list order, first hit wins), then the
  /// question, then the largest OCR box. Throws ValidationError when
  /// `tokens` is empty.
  KeyTextRegion locate(std::string_view question, std::span<const std::string> answers,
                       std::span<const OcrToken> tokens) const;

  const FuzzyParams& params() const { return params_; }

 private:
  struct Prepared;

  std::optional<KeyTextRegion> exact_impl(std::string_view target, const Prepared& p) const;
  std::optional<KeyTextRegion> fuzzy_impl(std::string_view target, const Prepared& p) const;
  std::optional<KeyTextRegion> keyword_impl(std::string_view target, const Prepared& p) const;
  std::optional<KeyTextRegion> stages(std::string_view target, const Prepared& p) const;

  FuzzyParams params_;
  std::vector<std::string> stopwords_;
};

/// True iff the normalized answer is "yes" or "no".
bool is_yes_no(std::string_view answer);

}  // namespace typobench
