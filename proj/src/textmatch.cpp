// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/textmatch.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "typobench/error.hpp"

namespace typobench {

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFKC normalizer unavailable");

  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = nfkc->normalize(src, status);
  if (U_FAILURE(status)) throw Error("ICU NFKC normalization failed");
  folded.toLower(icu::Locale::getRoot());

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    if (u_ispunct(c)) continue;
    if (u_isUWhiteSpace(c) || u_iscntrl(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(u' '));
      pending_space = false;
    }
    out.append(c);
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

std::u32string to_code_points(std::string_view utf8) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  out.reserve(s.length());
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    i += U16_LENGTH(c);
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double lcs_ratio(std::u32string_view a, std::u32string_view b) {
  const auto denom = std::max(a.size(), b.size());
  if (denom == 0) return 1.0;
  return static_cast<double>(lcs_length(a, b)) / static_cast<double>(denom);
}

double lcs_ratio(std::string_view a, std::string_view b) {
  return lcs_ratio(to_code_points(a), to_code_points(b));
}

double normalized_edit_distance(std::u32string_view a, std::u32string_view b) {
  const auto denom = std::max(a.size(), b.size());
  if (denom == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(denom);
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  return normalized_edit_distance(to_code_points(a), to_code_points(b));
}

namespace {

double score(std::u32string_view a, std::u32string_view b, double alpha) {
  return alpha * lcs_ratio(a, b) + (1.0 - alpha) * (1.0 - normalized_edit_distance(a, b));
}

}  // namespace

double similarity(std::string_view a, std::string_view b, double alpha) {
  return score(to_code_points(a), to_code_points(b), alpha);
}

std::string_view to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::exact: return "exact";
    case MatchMethod::fuzzy: return "fuzzy";
    case MatchMethod::keyword: return "keyword";
    case MatchMethod::largest_box_fallback: return "largest_box_fallback";
  }
  return "?";
}

std::string_view to_string(MatchSource s) {
  return s == MatchSource::answer ? "answer" : "question";
}

MatchMethod match_method_from_string(std::string_view s) {
  for (auto m : {MatchMethod::exact, MatchMethod::fuzzy, MatchMethod::keyword,
                 MatchMethod::largest_box_fallback}) {
    if (to_string(m) == s) return m;
  }
  throw ValidationError("unknown match method '" + std::string(s) + "'");
}

MatchSource match_source_from_string(std::string_view s) {
  if (s == "answer") return MatchSource::answer;
  if (s == "question") return MatchSource::question;
  throw ValidationError("unknown match source '" + std::string(s) + "'");
}

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "a",     "an",    "the",  "and",   "or",    "but",   "of",   "to",   "in",    "on",
      "at",    "by",    "for",  "with",  "from",  "as",    "is",   "are",  "was",   "were",
      "be",    "been",  "it",   "its",   "this",  "that",  "these", "those", "there", "here",
      "what",  "which", "who",  "whose", "where", "when",  "why",  "how",  "do",    "does",
      "did",   "has",   "have", "had",   "not",   "can",   "will", "they", "their", "your"};
  return words;
}

std::vector<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stopword list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = normalize(line);
    if (word.empty() || line.starts_with('#')) continue;
    out.push_back(word);
  }
  return out;
}

bool is_yes_no(std::string_view answer) {
  const auto n = normalize(answer);
  return n == "yes" || n == "no";
}

// ---------------------------------------------------------------------------

struct KeyTextMatcher::Prepared {
  std::span<const OcrToken> tokens;
  std::vector<std::string> norm;

  explicit Prepared(std::span<const OcrToken> t) : tokens(t) {
    norm.reserve(t.size());
    for (const auto& tok : t) norm.push_back(normalize(tok.text));
  }

  std::string span_text(std::size_t start, std::size_t end) const {
    std::string out;
    for (std::size_t i = start; i <= end; ++i) {
      if (norm[i].empty()) continue;
      if (!out.empty()) out.push_back(' ');
      out += norm[i];
    }
    return out;
  }

  KeyTextRegion region(std::vector<std::size_t> idx, MatchMethod method) const {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<BBox> boxes;
    boxes.reserve(idx.size());
    for (auto i : idx) boxes.push_back(tokens[i].box);
    KeyTextRegion r;
    r.box = unite(boxes);
    r.matched_tokens = std::move(idx);
    r.method = method;
    return r;
  }
};

KeyTextMatcher::KeyTextMatcher(FuzzyParams params, std::vector<std::string> stopwords)
    : params_(params), stopwords_(std::move(stopwords)) {
  if (params_.max_span < 1) throw ValidationError("max_span must be >= 1");
  if (params_.alpha < 0 || params_.alpha > 1) throw ValidationError("alpha must be in [0, 1]");
  std::sort(stopwords_.begin(), stopwords_.end());
}

std::optional<KeyTextRegion> KeyTextMatcher::exact_impl(std::string_view target,
                                                        const Prepared& p) const {
  if (target.empty()) return std::nullopt;
  const std::size_t n = p.norm.size();
  const auto max_span = static_cast<std::size_t>(params_.max_span);
  for (std::size_t start = 0; start < n; ++start) {
    if (p.norm[start].empty()) continue;
    for (std::size_t len = 1; len <= max_span && start + len <= n; ++len) {
      const std::size_t end = start + len - 1;
      if (p.norm[end].empty()) continue;
      if (p.span_text(start, end) == target) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i <= end; ++i) idx.push_back(i);
        return p.region(std::move(idx), MatchMethod::exact);
      }
    }
  }
  return std::nullopt;
}

std::optional<KeyTextRegion> KeyTextMatcher::fuzzy_impl(std::string_view target,
                                                        const Prepared& p) const {
  if (target.empty()) return std::nullopt;
  const auto target_cp = to_code_points(target);
  const std::size_t n = p.norm.size();
  const auto max_span = static_cast<std::size_t>(params_.max_span);
  double best = -1.0;
  std::size_t best_start = 0, best_end = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (p.norm[start].empty()) continue;
    for (std::size_t len = 1; len <= max_span && start + len <= n; ++len) {
      const std::size_t end = start + len - 1;
      if (p.norm[end].empty()) continue;
      const double s = score(to_code_points(p.span_text(start, end)), target_cp, params_.alpha);
      if (s > best) {
        best = s;
        best_start = start;
        best_end = end;
      }
    }
  }
  if (!(best > params_.threshold)) return std::nullopt;
  std::vector<std::size_t> idx;
  for (std::size_t i = best_start; i <= best_end; ++i) idx.push_back(i);
  auto r = p.region(std::move(idx), MatchMethod::fuzzy);
  r.score = best;
  return r;
}

std::vector<std::string> KeyTextMatcher::keywords(std::string_view target) const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  const std::string t(target);
  while (pos <= t.size()) {
    auto next = t.find(' ', pos);
    if (next == std::string::npos) next = t.size();
    std::string word = t.substr(pos, next - pos);
    pos = next + 1;
    if (word.empty()) continue;
    if (to_code_points(word).size() < 3) continue;
    if (std::binary_search(stopwords_.begin(), stopwords_.end(), word)) continue;
    if (std::find(out.begin(), out.end(), word) != out.end()) continue;
    out.push_back(std::move(word));
  }
  return out;
}

std::optional<KeyTextRegion> KeyTextMatcher::keyword_impl(std::string_view target,
                                                          const Prepared& p) const {
  std::vector<std::size_t> matched;
  for (const auto& kw : keywords(target)) {
    auto exact = std::find(p.norm.begin(), p.norm.end(), kw);
    if (exact != p.norm.end()) {
      matched.push_back(static_cast<std::size_t>(exact - p.norm.begin()));
      continue;
    }
    const auto kw_cp = to_code_points(kw);
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < p.norm.size(); ++i) {
      if (p.norm[i].empty()) continue;
      const double s = score(to_code_points(p.norm[i]), kw_cp, params_.alpha);
      if (s > best) {
        best = s;
        best_i = i;
      }
    }
    if (best > params_.threshold) matched.push_back(best_i);
  }
  if (matched.empty()) return std::nullopt;
  return p.region(std::move(matched), MatchMethod::keyword);
}

std::optional<KeyTextRegion> KeyTextMatcher::stages(std::string_view target,
                                                    const Prepared& p) const {
  if (auto r = exact_impl(target, p)) return r;
  if (auto r = fuzzy_impl(target, p)) return r;
  return keyword_impl(target, p);
}

std::optional<KeyTextRegion> KeyTextMatcher::exact_match(std::string_view target,
                                                         std::span<const OcrToken> tokens) const {
  return exact_impl(target, Prepared(tokens));
}

std::optional<KeyTextRegion> KeyTextMatcher::fuzzy_phrase_match(
    std::string_view target, std::span<const OcrToken> tokens) const {
  return fuzzy_impl(target, Prepared(tokens));
}

std::optional<KeyTextRegion> KeyTextMatcher::keyword_fallback(
    std::string_view target, std::span<const OcrToken> tokens) const {
  return keyword_impl(target, Prepared(tokens));
}

KeyTextRegion KeyTextMatcher::locate(std::string_view question,
                                     std::span<const std::string> answers,
                                     std::span<const OcrToken> tokens) const {
  if (tokens.empty()) throw ValidationError("key-text location needs at least one OCR token");
  const Prepared p(tokens);

  std::set<std::string> tried;
  for (const auto& answer : answers) {
    auto target = normalize(answer);
    if (target.empty() || target == "yes" || target == "no") continue;
    if (!tried.insert(target).second) continue;
    if (auto r = stages(target, p)) {
      r->source = MatchSource::answer;
      return *r;
    }
  }
  if (auto r = stages(normalize(question), p)) {
    r->source = MatchSource::question;
    return *r;
  }

  std::size_t largest = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].box.area() > tokens[largest].box.area()) largest = i;
  }
  KeyTextRegion r = p.region({largest}, MatchMethod::largest_box_fallback);
  r.source = MatchSource::question;
  return r;
}

}  // namespace typobench
