// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "typobench/corpus.hpp"
#include "typobench/error.hpp"
#include "typobench/textmatch.hpp"

namespace typobench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// A choice letter either in parentheses or followed by punctuation or the
// end of the text, so the article in "answer is a cat" is not a choice.
#define TB_LETTER R"((?:\(([a-d])\)|([a-d])(?=[.,;:)!?]|\s*$)))"

const std::vector<std::regex>& letter_families() {
  static const std::vector<std::regex> families = {
      std::regex(R"(\banswer\s*(?:is\s*)?[:=]?\s*)" TB_LETTER),
      std::regex(R"(\bassistant\s*[:=]?\s*)" TB_LETTER),
      std::regex(R"(\(([a-d])\))"),
      std::regex(R"((?:^|[^a-z0-9])([a-d])\.(?![a-z0-9]))"),
  };
  return families;
}

#undef TB_LETTER

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Letters matched by one family; first non-empty capture group of each match.
std::set<char> family_letters(const std::regex& re, const std::string& text) {
  std::set<char> letters;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    for (std::size_t g = 1; g < it->size(); ++g) {
      if ((*it)[g].matched) {
        letters.insert((*it)[g].str()[0]);
        break;
      }
    }
  }
  return letters;
}

}  // namespace

std::optional<int> extract_mc_choice(std::string_view response,
                                     std::span<const std::string> options) {
  const std::string text = ascii_lower(response);
  for (const auto& re : letter_families()) {
    const auto letters = family_letters(re, text);
    if (letters.empty()) continue;
    if (letters.size() > 1) return std::nullopt;
    return *letters.begin() - 'a';
  }

  // Bare letter: the whole response, ignoring punctuation and spacing.
  const auto bare = normalize(response);
  if (bare.size() == 1 && bare[0] >= 'a' && bare[0] <= 'd') return bare[0] - 'a';

  if (bare.empty()) return std::nullopt;
  const std::string padded = " " + bare + " ";
  std::optional<int> hit;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const auto opt = normalize(options[i]);
    if (opt.empty()) continue;
    if (bare == opt || padded.find(" " + opt + " ") != std::string::npos) {
      if (hit) return std::nullopt;
      hit = static_cast<int>(i);
    }
  }
  return hit;
}

double mc_accuracy(std::span<const std::optional<int>> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw ValidationError("mc_accuracy: length mismatch");
  if (gold.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] && *predicted[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double vqa_accuracy(std::string_view prediction, std::span<const std::string> answers,
                    bool normalize_text) {
  if (answers.size() != kHumanAnswerCount) {
    throw ValidationError("vqa_accuracy needs exactly 10 answers");
  }
  const std::string pred = normalize_text ? normalize(prediction) : std::string(prediction);
  std::vector<char> match(answers.size());
  for (std::size_t j = 0; j < answers.size(); ++j) {
    match[j] = (normalize_text ? normalize(answers[j]) : answers[j]) == pred;
  }
  // Sum min(3, others) in integers and divide once, so e.g. three matches
  // gives exactly 27/30 = 0.9.
  int total = 0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    int others = 0;
    for (std::size_t j = 0; j < answers.size(); ++j) {
      if (j != i && match[j]) ++others;
    }
    total += std::min(3, others);
  }
  return total / (3.0 * static_cast<double>(answers.size()));
}

// ---------------------------------------------------------------------------

ClassSpace::ClassSpace(std::vector<std::string> classes, ClassEmbedder& embedder)
    : classes_(std::move(classes)), embedder_(embedder) {
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  if (classes_.empty()) throw ValidationError("empty class space");
  embedder_.warm(classes_);
}

bool ClassSpace::contains(std::string_view name) const {
  return std::binary_search(classes_.begin(), classes_.end(), name);
}

std::vector<std::string> ClassSpace::top_k(const Embedding& caption, int k,
                                           const std::optional<std::string>& extra) {
  if (k < 1) throw ValidationError("k must be positive");
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(classes_.size() + 1);
  for (const auto& c : classes_) scored.emplace_back(cosine(caption, embedder_.embed(c)), &c);
  if (extra && !contains(*extra)) {
    scored.emplace_back(cosine(caption, embedder_.embed(*extra)), &*extra);
  }
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return *a.second < *b.second;
                    });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*scored[i].second);
  return out;
}

int clip_match_at_k(const Embedding& caption, std::span<const std::string> gold,
                    ClassSpace& space, int k) {
  for (const auto& g : gold) {
    if (!space.contains(g)) throw ValidationError("gold class '" + g + "' not in class space");
  }
  const auto top = space.top_k(caption, k);
  for (const auto& g : gold) {
    if (std::find(top.begin(), top.end(), g) != top.end()) return 1;
  }
  return 0;
}

int clip_match_at_k(const std::string& caption, std::span<const std::string> gold,
                    ClassSpace& space, int k) {
  return clip_match_at_k(space.embedder().provider().embed_text(caption), gold, space, k);
}

int r_clip_match(const Embedding& caption, std::span<const std::string> gold,
                 const std::string& attack_word, ClassSpace& space, int k) {
  const int gold_hit = clip_match_at_k(caption, gold, space, k);
  const auto top = space.top_k(caption, k, attack_word);
  const int attack_hit = std::find(top.begin(), top.end(), attack_word) != top.end() ? 1 : 0;
  return gold_hit - attack_hit;
}

int r_clip_match(const std::string& caption, std::span<const std::string> gold,
                 const std::string& attack_word, ClassSpace& space, int k) {
  return r_clip_match(space.embedder().provider().embed_text(caption), gold, attack_word, space,
                      k);
}

// ---------------------------------------------------------------------------

std::vector<Prediction> load_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open predictions " + path.string());
  std::vector<Prediction> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with('#')) continue;
    Prediction p;
    try {
      const auto j = json::parse(line);
      p.image_id = j.at("image_id").get<std::string>();
      p.subset = j.at("subset").get<std::string>();
      p.response = j.at("response").get<std::string>();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.emplace(p.image_id, p.subset).second) {
      throw ValidationError("duplicate prediction for (" + p.image_id + ", " + p.subset + ")");
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string metric_for(const SubsetInfo& s) {
  switch (s.task) {
    case Task::obj_mc: return "mc_accuracy";
    case Task::obj_oe: return s.condition == Condition::clean ? "clip_m@5" : "r_clip_m";
    case Task::text: return "vqa_accuracy";
  }
  return "";
}

}  // namespace

ScoreReport score_predictions(const std::vector<Prediction>& predictions,
                              const std::map<std::string, Manifest>& manifests,
                              ClassSpace* space, const ScoreOptions& options) {
  ScoreReport report;
  std::map<std::string, std::map<std::string, const ojson*>> index;
  for (const auto& [subset, m] : manifests) {
    auto& by_id = index[subset];
    for (const auto& item : m.items) by_id[item.at("image_id").get<std::string>()] = &item;
  }

  std::map<std::string, std::set<std::string>> answered;
  for (const auto& p : predictions) {
    if (!is_subset_name(p.subset)) {
      report.orphans.push_back({p.image_id, p.subset, "unknown_subset"});
      continue;
    }
    const auto sit = index.find(p.subset);
    if (sit == index.end()) {
      report.orphans.push_back({p.image_id, p.subset, "subset_not_in_manifests"});
      continue;
    }
    const auto iit = sit->second.find(p.image_id);
    if (iit == sit->second.end()) {
      report.orphans.push_back({p.image_id, p.subset, "unknown_item"});
      continue;
    }
    const auto& info = subset_info(p.subset);
    auto& score = report.subsets[p.subset];
    score.metric = metric_for(info);
    answered[p.subset].insert(p.image_id);

    const auto& q = iit->second->at("question");
    double value = 0;
    switch (info.task) {
      case Task::obj_mc: {
        const auto opts = q.at("options").get<std::vector<std::string>>();
        const auto letter = q.at("correct_letter").get<std::string>();
        const auto choice = extract_mc_choice(p.response, opts);
        if (!choice) ++score.unextracted;
        value = (choice && letter.size() == 1 && *choice == letter[0] - 'A') ? 1.0 : 0.0;
        break;
      }
      case Task::obj_oe: {
        if (!space) throw ValidationError("object open-ended scoring needs a class space");
        const auto gold = q.at("acceptable_answers").get<std::vector<std::string>>();
        if (info.condition == Condition::clean) {
          value = clip_match_at_k(p.response, gold, *space, options.k);
        } else {
          const auto word = iit->second->at("attack").at("word").get<std::string>();
          value = r_clip_match(p.response, gold, word, *space, options.k);
        }
        break;
      }
      case Task::text: {
        const auto answers = q.at("answers").get<std::vector<std::string>>();
        value = vqa_accuracy(p.response, answers, options.vqa_normalize);
        break;
      }
    }
    score.sum += value;
    ++score.count;
  }

  for (auto& [subset, score] : report.subsets) {
    score.skipped = index[subset].size() - answered[subset].size();
  }
  return report;
}

std::optional<double> ScoreReport::level_mean(Task task, Level level) const {
  for (const auto& s : all_subsets()) {
    if (s.task != task || s.level != level) continue;
    if (s.condition == Condition::clean && level != Level::none) continue;
    const auto it = subsets.find(std::string(s.name));
    if (it != subsets.end() && it->second.count > 0) return it->second.mean();
  }
  return std::nullopt;
}

std::optional<double> ScoreReport::clean_mean(Task task) const {
  return level_mean(task, Level::none);
}

std::optional<double> ScoreReport::attack_average(Task task) const {
  double sum = 0;
  int n = 0;
  for (auto level : {Level::easy, Level::medium, Level::hard}) {
    if (auto m = level_mean(task, level)) {
      sum += *m;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 3> kFamilies = {{
    {Task::obj_mc, "obj_mc"},
    {Task::obj_oe, "obj_oe"},
    {Task::text, "text"},
}};

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

ojson ScoreReport::to_json() const {
  ojson j;
  ojson subs = ojson::object();
  for (const auto& s : all_subsets()) {
    const auto it = subsets.find(std::string(s.name));
    if (it == subsets.end()) continue;
    const auto& sc = it->second;
    subs[std::string(s.name)] = {{"metric", sc.metric},
                                 {"mean", sc.mean()},
                                 {"count", sc.count},
                                 {"skipped", sc.skipped},
                                 {"unextracted", sc.unextracted}};
  }
  j["subsets"] = std::move(subs);
  ojson fams = ojson::object();
  for (const auto& [task, name] : kFamilies) {
    fams[std::string(name)] = {{"clean", optional_number(clean_mean(task))},
                               {"easy", optional_number(level_mean(task, Level::easy))},
                               {"medium", optional_number(level_mean(task, Level::medium))},
                               {"hard", optional_number(level_mean(task, Level::hard))},
                               {"attack_avg", optional_number(attack_average(task))}};
  }
  j["families"] = std::move(fams);
  ojson orphan_list = ojson::array();
  for (const auto& o : orphans) {
    orphan_list.push_back({{"image_id", o.image_id}, {"subset", o.subset}, {"reason", o.reason}});
  }
  j["orphans"] = std::move(orphan_list);
  return j;
}

std::string ScoreReport::to_table() const {
  const std::array<std::string, 6> head = {"family", "Clean", "Easy", "Med.", "Hard", "AVG"};
  std::vector<std::array<std::string, 6>> rows = {head};
  for (const auto& [task, name] : kFamilies) {
    rows.push_back({std::string(name), cell(clean_mean(task)), cell(level_mean(task, Level::easy)),
                    cell(level_mean(task, Level::medium)), cell(level_mean(task, Level::hard)),
                    cell(attack_average(task))});
  }
  std::array<std::size_t, 6> width{};
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 6; ++c) {
      if (c == 0) {
        out << r[c] << std::string(width[c] - r[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - r[c].size(), ' ') << r[c];
      }
    }
    out << '\n';
  }
  if (!orphans.empty()) out << "orphan predictions: " << orphans.size() << '\n';
  return out.str();
}

}  // namespace typobench
