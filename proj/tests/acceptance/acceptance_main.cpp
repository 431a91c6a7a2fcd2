// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Each check prints one PASS/FAIL line and
// compares library output against an oracle written independently here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "../support/fixture.hpp"
#include "typobench/attackgen.hpp"
#include "typobench/builder.hpp"
#include "typobench/config.hpp"
#include "typobench/corpus.hpp"
#include "typobench/manifest.hpp"
#include "typobench/metrics.hpp"
#include "typobench/mixture.hpp"
#include "typobench/placement.hpp"
#include "typobench/random.hpp"
#include "typobench/stats.hpp"
#include "typobench/taxonomy.hpp"
#include "typobench/textmatch.hpp"

namespace fs = std::filesystem;
using namespace typobench;
using typobench::testing::Fixture;
using typobench::testing::TempDir;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages of a check.
class Check {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (cond) return;
    ++failures_;
    if (failures_ <= 5) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary + " (" + std::to_string(checks_) + " checks)"};
    return {false, std::to_string(failures_) + "/" + std::to_string(checks_) +
                       " checks failed: " + messages_};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string messages_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(precision);
  ss << v;
  return ss.str();
}

// Shared 50-image fixture built once for criteria 1 and 2.
struct BuiltFixture {
  TempDir dir{"typobench-accept"};
  Fixture fixture;
  std::vector<ImageRecord> records;
  std::size_t deduped = 0;
  RunConfig config;
  std::optional<Taxonomy> taxonomy;
  StubEmbeddingProvider embed{64, 11};
  // A vocabulary disjoint from every fixture answer, so every record with
  // OCR tokens gets an acceptable misleading word on the first attempt.
  StubGenerationProvider generate{{"harbor", "violet", "tuesday", "lantern"}};
};

BuiltFixture& built_fixture() {
  static BuiltFixture bf;
  return bf;
}

void ingest_fixture(BuiltFixture& b) {
  b.fixture = typobench::testing::write_fixture(b.dir.path() / "data", 50, 7);
  b.taxonomy = Taxonomy::load(b.fixture.taxonomy);
  auto qa = load_qa_file(b.fixture.qa);
  const auto selected = dedup_questions(std::move(qa));
  b.deduped = selected.size();
  const auto joined = join_object_labels(selected, load_labels_file(b.fixture.labels),
                                         load_ocr_file(b.fixture.ocr), *b.taxonomy);
  b.records = joined.records;
  b.config.global_seed = 2026;
}

BuildSummary build_into(BuiltFixture& b, const fs::path& out, int workers,
                        EmbeddingProvider& embed, GenerationProvider& generate) {
  RunConfig cfg = b.config;
  cfg.workers = workers;
  const BuildInputs inputs{cfg, *b.taxonomy, embed, generate};
  return build_benchmark(b.records, inputs, out);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  auto& b = built_fixture();
  const auto t0 = std::chrono::steady_clock::now();
  ingest_fixture(b);
  const auto out = b.dir.path() / "build1";
  build_into(b, out, 1, b.embed, b.generate);
  const double elapsed = seconds_since(t0);

  Check c;
  const auto& f = b.fixture;
  c.expect(b.deduped == f.image_ids.size(), "dedup kept " + std::to_string(b.deduped) + " images");

  // Eligibility oracle from the fixture description: every image carries a
  // known object label, so all object subsets hold every image; text_clean
  // holds every image; text attacks need OCR tokens.
  std::map<std::string, std::set<std::string>> expected;
  const std::set<std::string> all(f.image_ids.begin(), f.image_ids.end());
  for (const auto& s : all_subsets()) {
    const bool text_attack = s.task == Task::text && s.condition == Condition::attack;
    expected[std::string(s.name)] = text_attack ? f.with_ocr : all;
  }

  std::size_t manifests = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().extension() == ".jsonl") ++manifests;
  }
  c.expect(manifests == 11, "found " + std::to_string(manifests) + " manifests");

  for (const auto& s : all_subsets()) {
    const auto path = out / (std::string(s.name) + ".jsonl");
    if (!fs::exists(path)) {
      c.expect(false, "missing " + path.filename().string());
      continue;
    }
    const auto m = read_manifest(path);
    std::multiset<std::string> ids;
    for (const auto& item : m.items) ids.insert(item.at("image_id").get<std::string>());
    const auto& want = expected[std::string(s.name)];
    c.expect(ids.size() == want.size() &&
                 std::equal(ids.begin(), ids.end(), want.begin(), want.end()),
             std::string(s.name) + " has " + std::to_string(ids.size()) + " items, expected " +
                 std::to_string(want.size()));
    if (s.task == Task::text) {
      for (const auto& item : m.items) {
        const auto id = item.at("image_id").get<std::string>();
        c.expect(item.at("question").at("prompt") == f.first_question.at(id),
                 id + " did not keep its lowest-index question");
      }
    }
  }
  const auto st = compute_stats(out);
  std::size_t want_total = 0;
  for (const auto& [name, ids] : expected) want_total += ids.size();
  c.expect(st.total == want_total, "stats total " + std::to_string(st.total));
  c.expect(elapsed < 10.0, "fixture build took " + fmt(elapsed) + " s");

  std::string summary = "11 manifests, " + std::to_string(st.total) + " items, " +
                        fmt(elapsed) + " s";

  // Optional full-size check against real TextVQA question files.
  if (const char* dir = std::getenv("TYPOBENCH_TEXTVQA_DIR"); dir && *dir) {
    const std::pair<const char*, std::size_t> splits[] = {
        {"TextVQA_0.5.1_train.json", 21953}, {"TextVQA_0.5.1_val.json", 3166}};
    const std::size_t totals[] = {241483, 34826};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto path = fs::path(dir) / splits[k].first;
      if (!fs::exists(path)) {
        c.expect(false, "missing " + path.string());
        continue;
      }
      const auto n = dedup_questions(load_qa_file(path)).size();
      c.expect(n == splits[k].second, path.filename().string() + " dedups to " +
                                          std::to_string(n));
      c.expect(n * kSubsetCount == totals[k], "subset total " + std::to_string(n * kSubsetCount));
    }
    summary += "; real TextVQA dedup checked";
  } else {
    summary += "; real TextVQA check skipped (TYPOBENCH_TEXTVQA_DIR unset)";
  }
  return c.outcome(summary);
}

std::map<std::string, std::string> output_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext != ".jsonl" && ext != ".png") continue;
    files[fs::relative(e.path(), dir).generic_string()] = typobench::testing::slurp(e.path());
  }
  return files;
}

Outcome criterion2() {
  auto& b = built_fixture();
  if (b.records.empty()) ingest_fixture(b);
  const auto t0 = std::chrono::steady_clock::now();

  // Run A fills a response cache, run B replays it, run C uses four workers
  // and no cache.
  const auto cache_dir = b.dir.path() / "cache";
  auto cached_embed = std::make_shared<StubEmbeddingProvider>(64, 11);
  auto cached_gen = std::make_shared<StubGenerationProvider>(
      std::vector<std::string>{"harbor", "violet", "tuesday", "lantern"});
  CachedEmbeddingProvider embed_a(cached_embed, ResponseCache(cache_dir));
  CachedGenerationProvider gen_a(cached_gen, ResponseCache(cache_dir));
  build_into(b, b.dir.path() / "det_a", 1, embed_a, gen_a);
  CachedEmbeddingProvider embed_b(cached_embed, ResponseCache(cache_dir));
  CachedGenerationProvider gen_b(cached_gen, ResponseCache(cache_dir));
  build_into(b, b.dir.path() / "det_b", 1, embed_b, gen_b);
  build_into(b, b.dir.path() / "det_c", 4, b.embed, b.generate);
  const double elapsed = seconds_since(t0);

  Check c;
  const auto a = output_files(b.dir.path() / "det_a");
  std::size_t pngs = 0;
  for (const auto& [name, bytes] : a) pngs += name.ends_with(".png");
  c.expect(pngs > 0, "no attacked images were written");
  for (const char* other : {"det_b", "det_c"}) {
    const auto o = output_files(b.dir.path() / other);
    c.expect(o.size() == a.size(), std::string(other) + " has a different file set");
    for (const auto& [name, bytes] : a) {
      const auto it = o.find(name);
      c.expect(it != o.end() && it->second == bytes, std::string(other) + "/" + name + " differs");
    }
  }
  c.expect(elapsed < 30.0, "three builds took " + fmt(elapsed) + " s");
  return c.outcome(std::to_string(a.size()) + " files identical across 3 builds, " +
                   fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// Geometry oracles, written from the definitions without the library.

bool oracle_intersects(const BBox& a, const BBox& b) {
  return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max && b.y_min <= a.y_max;
}

double oracle_distance(const BBox& a, const BBox& b, int w, int h) {
  if (oracle_intersects(a, b)) return 0.0;
  const double ax[] = {a.x_min, a.x_max}, ay[] = {a.y_min, a.y_max};
  const double bx[] = {b.x_min, b.x_max}, by[] = {b.y_min, b.y_max};
  double best = INFINITY;
  for (double x1 : ax)
    for (double y1 : ay)
      for (double x2 : bx)
        for (double y2 : by) best = std::min(best, std::sqrt((x1 - x2) * (x1 - x2) +
                                                             (y1 - y2) * (y1 - y2)));
  return best / std::sqrt(double(w) * w + double(h) * h);
}

BBox random_box(Rng& rng, int w, int h) {
  const double x0 = rng.uniform_int(0, w - 1), y0 = rng.uniform_int(0, h - 1);
  const double x1 = rng.uniform_int(static_cast<std::int64_t>(x0), w);
  const double y1 = rng.uniform_int(static_cast<std::int64_t>(y0), h);
  return {x0, y0, x1, y1};
}

Outcome criterion3() {
  Check c;
  Rng rng(3);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t accepted = 0, exhausted = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int w = static_cast<int>(rng.uniform_int(40, 1600));
    const int h = static_cast<int>(rng.uniform_int(40, 1200));
    const int n = trial % 5 == 0 ? static_cast<int>(rng.uniform_int(2, 9)) : 7;
    const BBox key = random_box(rng, w, h);
    const int aw = static_cast<int>(rng.uniform_int(1, std::max(1, w / 3)));
    const int ah = static_cast<int>(rng.uniform_int(1, std::max(1, h / 6)));

    // Oracle: centre a box in each cell, shift it inside, measure, sort by
    // (distance, row-major index), cut into tertiles with near taking the
    // ceiling.
    struct Cell {
      double d;
      int idx;
    };
    std::vector<Cell> cells;
    for (int r = 0; r < n; ++r) {
      for (int col = 0; col < n; ++col) {
        const double cx = (col + 0.5) * w / n, cy = (r + 0.5) * h / n;
        double x = std::round(cx - aw / 2.0), y = std::round(cy - ah / 2.0);
        x = std::clamp(x, 0.0, double(w - aw));
        y = std::clamp(y, 0.0, double(h - ah));
        cells.push_back({oracle_distance({x, y, x + aw, y + ah}, key, w, h), r * n + col});
      }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
      return a.d != b.d ? a.d < b.d : a.idx < b.idx;
    });
    const std::size_t total = cells.size();
    const std::size_t n_near = (total + 2) / 3, n_mid = total / 3;
    std::set<int> near, mid, far;
    for (std::size_t i = 0; i < total; ++i) {
      (i < n_near ? near : i < n_near + n_mid ? mid : far).insert(cells[i].idx);
    }

    const auto buckets = bucket_cells(key, {w, h}, n, aw, ah);
    auto ids = [n](const std::vector<GridCell>& v) {
      std::set<int> s;
      for (const auto& cell : v) s.insert(cell.row * n + cell.col);
      return s;
    };
    const bool same = ids(buckets.near) == near && ids(buckets.mid) == mid &&
                      ids(buckets.far) == far;
    c.expect(same, "bucket mismatch in trial " + std::to_string(trial));

    for (Level level : {Level::easy, Level::hard}) {
      const auto p = choose_text_attack_position(buckets, level, rng.next());
      const int idx = (*p.cell)[0] * n + (*p.cell)[1];
      c.expect(!near.count(idx), "text attack in the near tertile, trial " + std::to_string(trial));
      c.expect((level == Level::easy ? far : mid).count(idx) == 1,
               "text attack outside its tertile, trial " + std::to_string(trial));
    }

    // Object attacks: a few OCR boxes, then check the sampled box.
    std::vector<BBox> ocr;
    const int n_ocr = static_cast<int>(rng.uniform_int(0, 4));
    for (int k = 0; k < n_ocr; ++k) {
      const double x = rng.uniform_int(0, w - 2), y = rng.uniform_int(0, h - 2);
      ocr.push_back({x, y, std::min<double>(w, x + rng.uniform_int(1, w / 4 + 1)),
                     std::min<double>(h, y + rng.uniform_int(1, h / 4 + 1))});
    }
    const auto p = sample_obj_attack_position({w, h}, aw, ah, ocr, rng.next(), 100);
    c.expect(p.position.x_min >= 0 && p.position.y_min >= 0 && p.position.x_max <= w &&
                 p.position.y_max <= h,
             "object attack outside the image, trial " + std::to_string(trial));
    bool hits = false;
    for (const auto& o : ocr) hits = hits || oracle_intersects(p.position, o);
    if (p.overlaps_ocr) {
      ++exhausted;
      c.expect(p.attempts == 100, "flagged overlap before exhausting attempts");
    } else {
      ++accepted;
      c.expect(!hits, "accepted object attack intersects OCR, trial " + std::to_string(trial));
    }
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, "took " + fmt(elapsed) + " s");
  return c.outcome("10000 fixtures; " + std::to_string(accepted) + " accepted and " +
                   std::to_string(exhausted) + " exhausted object placements, " + fmt(elapsed) +
                   " s");
}

Outcome criterion4() {
  Check c;
  Rng rng(4);
  std::size_t overlaps = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int w = static_cast<int>(rng.uniform_int(1, 2000));
    const int h = static_cast<int>(rng.uniform_int(1, 2000));
    BBox a = random_box(rng, w, h), b = random_box(rng, w, h);
    if (trial % 10 == 0) {
      // Force edge or corner contact.
      b.x_min = a.x_max;
      b.x_max = std::max(b.x_max, b.x_min);
    }
    const double got = box_distance(a, b, {w, h});
    const double want = oracle_distance(a, b, w, h);
    if (oracle_intersects(a, b)) {
      ++overlaps;
      c.expect(got == 0.0, "overlap not exactly 0 in trial " + std::to_string(trial));
    }
    c.expect(std::abs(got - want) <= 1e-9, "distance off in trial " + std::to_string(trial));
    c.expect(got == box_distance(b, a, {w, h}), "not symmetric in trial " + std::to_string(trial));
  }
  return c.outcome("10000 pairs, " + std::to_string(overlaps) + " overlapping");
}

// Parent map read straight from the hierarchy JSON.
void collect_parents(const nlohmann::json& node, const std::string& parent,
                     std::map<std::string, std::string>& parents) {
  const auto name = node.at("LabelName").get<std::string>();
  if (!parent.empty()) parents.emplace(name, parent);
  if (node.contains("Subcategory")) {
    for (const auto& child : node["Subcategory"]) collect_parents(child, name, parents);
  }
}

std::vector<std::string> chain_up(const std::string& name,
                                  const std::map<std::string, std::string>& parents) {
  std::vector<std::string> out{name};
  for (auto it = parents.find(name); it != parents.end(); it = parents.find(it->second)) {
    out.push_back(it->second);
  }
  return out;  // node, parent, ..., root
}

int oracle_tree_distance(const std::string& a, const std::string& b,
                         const std::map<std::string, std::string>& parents) {
  const auto ca = chain_up(a, parents), cb = chain_up(b, parents);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const auto it = std::find(cb.begin(), cb.end(), ca[i]);
    if (it != cb.end()) return static_cast<int>(i + (it - cb.begin()));
  }
  return -1;
}

Outcome criterion5() {
  Check c;
  std::size_t triples = 0, native = 0;
  for (const auto& tree : {typobench::testing::fixture_taxonomy_json(),
                           typobench::testing::small_taxonomy_json()}) {
    const auto taxonomy = Taxonomy::from_json(tree);
    std::map<std::string, std::string> parents;
    collect_parents(tree, "", parents);
    for (const auto& [gt, unused] : parents) {
      const auto gt_chain = chain_up(gt, parents);
      for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto t = taxonomy.sample_negatives(gt, seed);
        ++triples;
        for (const auto& neg : {t.hard, t.medium, t.easy}) {
          const bool is_ancestor_or_self =
              std::find(gt_chain.begin(), gt_chain.end(), neg) != gt_chain.end();
          const auto neg_chain = chain_up(neg, parents);
          const bool is_descendant =
              std::find(neg_chain.begin() + 1, neg_chain.end(), gt) != neg_chain.end();
          c.expect(!is_ancestor_or_self && !is_descendant,
                   neg + " is on the chain of " + gt + " (seed " + std::to_string(seed) + ")");
        }
        c.expect(t.hard != t.medium && t.medium != t.easy && t.hard != t.easy,
                 "repeated negative for " + gt);
        if (t.all_native()) {
          ++native;
          const int dh = oracle_tree_distance(gt, t.hard, parents);
          const int dm = oracle_tree_distance(gt, t.medium, parents);
          const int de = oracle_tree_distance(gt, t.easy, parents);
          c.expect(dh <= dm && dm <= de, "band distances " + std::to_string(dh) + "," +
                                             std::to_string(dm) + "," + std::to_string(de) +
                                             " for " + gt);
        }
      }
    }
  }
  return c.outcome(std::to_string(triples) + " triples, " + std::to_string(native) +
                   " with all bands native");
}

Outcome criterion6() {
  Check c;
  Rng rng(6);
  const std::vector<std::string> distractors = {"red", "blue", "stop", "open", "7", "cafe"};
  for (int m = 0; m <= 10; ++m) {
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::string> answers(10);
      for (int i = 0; i < 10; ++i) {
        answers[i] = i < m ? "bus" : distractors[rng.index(distractors.size())];
      }
      rng.shuffle(std::span<std::string>(answers));
      // Literal leave-one-out over raw strings.
      double oracle = 0;
      for (int i = 0; i < 10; ++i) {
        int others = 0;
        for (int j = 0; j < 10; ++j) others += (j != i && answers[j] == "bus");
        oracle += std::min(1.0, others / 3.0) / 10.0;
      }
      const double closed = (10.0 - m) / 10.0 * std::min(1.0, m / 3.0) +
                            m / 10.0 * std::min(1.0, std::max(0, m - 1) / 3.0);
      const double got = vqa_accuracy("bus", answers);
      c.expect(std::abs(got - oracle) <= 1e-12, "m=" + std::to_string(m) + " oracle mismatch");
      c.expect(std::abs(got - closed) <= 1e-12, "m=" + std::to_string(m) + " closed form");
    }
  }
  std::vector<std::string> three = {"bus", "bus", "bus", "a", "b", "c", "d", "e", "f", "g"};
  c.expect(vqa_accuracy("bus", three) == 0.9, "m=3 is not exactly 0.9");
  return c.outcome("m in 0..10, 200 multisets each; m=3 gives 0.9");
}

Outcome criterion7() {
  Check c;
  // LCS of goverment/government is 9 of 10, edit distance 1 of 10.
  c.expect(std::abs(similarity("goverment", "government") - 0.9) <= 1e-12,
           "s(goverment, government) = " + fmt(similarity("goverment", "government"), 15));
  KeyTextMatcher matcher;
  const std::vector<OcrToken> gov = {{"goverment", {0, 0, 10, 10}}};
  const auto fm = matcher.fuzzy_phrase_match("government", gov);
  c.expect(fm && fm->method == MatchMethod::fuzzy && std::abs(*fm->score - 0.9) <= 1e-12,
           "fuzzy match on goverment");

  // Every span that matches exactly scores 1 and is accepted by fuzzy.
  Rng rng(7);
  const std::vector<std::string> vocab = {"bus", "stop", "main", "st", "cafe", "open", "24", "h"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<OcrToken> tokens;
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    for (int i = 0; i < n; ++i) {
      tokens.push_back({vocab[rng.index(vocab.size())], {double(i) * 10, 0, double(i) * 10 + 8, 8}});
    }
    const int start = static_cast<int>(rng.index(n));
    const int len = static_cast<int>(rng.uniform_int(1, std::min(5, n - start)));
    std::string target;
    for (int i = start; i < start + len; ++i) target += (target.empty() ? "" : " ") + tokens[i].text;
    const auto em = matcher.exact_match(target, tokens);
    c.expect(em.has_value(), "exact span not found: " + target);
    if (!em) continue;
    std::string span;
    for (auto i : em->matched_tokens) span += (span.empty() ? "" : " ") + tokens[i].text;
    c.expect(span == target, "exact match returned a different span");
    c.expect(similarity(span, target) == 1.0, "exact span scores below 1");
    const auto fz = matcher.fuzzy_phrase_match(target, tokens);
    c.expect(fz && *fz->score == 1.0, "fuzzy rejects an exact span: " + target);
  }

  // abcde vs abcxy: LCS 3/5, edit 2/5, so s = 0.5*0.6 + 0.5*0.6 = 0.6.
  const double s = similarity("abcde", "abcxy");
  c.expect(s == 0.6, "boundary pair scores " + fmt(s, 17));
  const std::vector<OcrToken> boundary = {{"abcxy", {0, 0, 5, 5}}};
  c.expect(!matcher.fuzzy_phrase_match("abcde", boundary), "s = 0.6 accepted (not strict)");
  KeyTextMatcher looser(FuzzyParams{0.5, 0.59, 5});
  c.expect(looser.fuzzy_phrase_match("abcde", boundary).has_value(), "s = 0.6 > 0.59 rejected");
  return c.outcome("s = 0.9, 500 exact spans score 1, strict at 0.6");
}

Outcome criterion8() {
  Check c;
  // Dictionary stub: each class is a basis vector, captions are hand-weighted
  // mixes, so the top-5 ranking of every caption is known by inspection.
  const std::vector<std::string> names = {"cat", "dog", "fox",  "squirrel", "car",
                                          "truck", "bus", "boat", "zebra"};
  StubEmbeddingProvider dict(names.size(), 0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    Embedding e(names.size(), 0.0);
    e[i] = 1.0;
    dict.add_text(names[i], e);
  }
  auto caption = [&](const std::string& key, std::vector<double> w) {
    w.resize(names.size(), 0.0);
    dict.add_text(key, w);
  };
  //          cat dog fox sqr car trk bus boat zebra
  caption("c1", {9, 8, 7, 6, 5, 0, 0, 0, 0});  // top5: cat dog fox squirrel car
  caption("c2", {0, 0, 0, 0, 5, 9, 8, 7, 6});  // top5: truck bus boat car cat
  caption("c3", {9, 8, 7, 6, 0, 5, 0, 0, 0});  // top5: cat dog fox squirrel truck
  caption("c4", {0, 9, 8, 7, 6, 0, 0, 0, 5});  // top5: dog fox squirrel car zebra
  caption("c5", {1, 1, 1, 1, 1, 1, 1, 1, 0});  // all tie: names order

  ClassEmbedder embedder(dict, {"{}"});
  // zebra stays outside the class space; it only joins as an attack word.
  ClassSpace space({"cat", "dog", "fox", "squirrel", "car", "truck", "bus", "boat"}, embedder);

  struct Case {
    std::string caption;
    std::vector<std::string> gold;
    std::string attack;
    int want;
  };
  // Hand labels from the rankings above.
  const std::vector<Case> cases = {
      {"c1", {"cat"}, "truck", 1},   // gold in, attack out
      {"c2", {"fox"}, "truck", -1},  // gold out, attack in
      {"c3", {"cat"}, "truck", 0},   // both in
      {"c2", {"fox"}, "squirrel", 0},  // neither
      {"c4", {"cat"}, "zebra", -1},  // extra attack word ranks in
      {"c1", {"cat"}, "zebra", 1},   // extra attack word ranks out
      {"c4", {"cat", "dog"}, "truck", 1},
      // All tied, so names order: boat, bus, car, cat, dog.
      {"c5", {"dog"}, "fox", 1},
      {"c5", {"fox"}, "boat", -1},
  };
  for (const auto& k : cases) {
    const int got = r_clip_match(k.caption, k.gold, k.attack, space, 5);
    c.expect(got == k.want, k.caption + "/" + k.attack + ": got " + std::to_string(got) +
                                ", hand label " + std::to_string(k.want));
  }

  // Range over random hashed captions and class picks.
  StubEmbeddingProvider hashed(32, 5);
  ClassEmbedder hashed_embedder(hashed, default_class_templates());
  const auto tax = Taxonomy::from_json(typobench::testing::fixture_taxonomy_json());
  ClassSpace big(tax.classes(), hashed_embedder);
  Rng rng(8);
  std::set<int> seen;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& cls = big.classes();
    const std::vector<std::string> gold = {cls[rng.index(cls.size())]};
    const auto& attack = cls[rng.index(cls.size())];
    const int k = static_cast<int>(rng.uniform_int(1, 8));
    const int got = r_clip_match("caption " + std::to_string(trial), gold, attack, big, k);
    seen.insert(got);
    c.expect(got >= -1 && got <= 1, "R-CLIP-M out of range");
  }
  return c.outcome(std::to_string(cases.size()) + " hand-labeled cases, 2000 random in range, " +
                   std::to_string(seen.size()) + " distinct values seen");
}

nlohmann::ordered_json synthetic_item(const std::string& subset, std::size_t i) {
  const auto info = subset_info(subset);
  nlohmann::ordered_json item;
  item["image_id"] = "syn" + std::to_string(i);
  item["subset"] = subset;
  item["image_path"] = "attacks/" + subset + "/syn" + std::to_string(i) + ".png";
  nlohmann::ordered_json q;
  if (info.task == Task::obj_mc) {
    q["type"] = "mc";
    q["prompt"] = "Which object?";
    q["options"] = {"cat", "dog", "car", "mug"};
    q["correct_letter"] = "A";
  } else if (info.task == Task::obj_oe) {
    q["type"] = "oe_object";
    q["prompt"] = "What objects?";
    q["acceptable_answers"] = {"cat"};
  } else {
    q["type"] = "text_qa";
    q["prompt"] = "What does it say?";
    q["answers"] = std::vector<std::string>(10, "stop");
  }
  item["question"] = q;
  item["attack"] = info.condition == Condition::attack ? nlohmann::ordered_json{{"word", "x"}}
                                                       : nlohmann::ordered_json(nullptr);
  return item;
}

Outcome criterion9() {
  Check c;
  std::map<std::string, Manifest> manifests;
  for (const auto& s : all_subsets()) {
    Manifest m;
    m.header.subset = s.name;
    const std::size_t n = s.condition == Condition::attack ? 9000 : 100;
    for (std::size_t i = 0; i < n; ++i) m.items.push_back(synthetic_item(std::string(s.name), i));
    manifests[std::string(s.name)] = std::move(m);
  }

  auto count_by = [](const std::vector<TrainingExample>& ex) {
    std::map<std::string, std::size_t> by_subset;
    std::set<std::string> ids;
    for (const auto& e : ex) {
      ++by_subset[e.subset];
      ids.insert(e.id);
    }
    return std::make_pair(by_subset, ids.size());
  };

  const auto balanced = compose_mixture(preset_recipe("balanced"), manifests, "/m");
  const auto [bal, bal_unique] = count_by(balanced);
  c.expect(balanced.size() == 16000, "balanced emits " + std::to_string(balanced.size()));
  c.expect(bal_unique == balanced.size(), "balanced repeats an item");
  c.expect(bal.size() == 3 && bal.count("obj_attack_hard_mc") &&
               bal.at("obj_attack_hard_mc") == 4000 && bal.count("obj_attack_hard_oe") &&
               bal.at("obj_attack_hard_oe") == 4000 && bal.count("text_attack_hard") &&
               bal.at("text_attack_hard") == 8000,
           "balanced split is not 4000/4000/8000");

  const auto ignore = compose_mixture(preset_recipe("ignore_text"), manifests, "/m");
  std::size_t mc = 0, oe = 0, other = 0;
  for (const auto& e : ignore) {
    const auto info = subset_info(e.subset);
    if (info.task == Task::obj_mc && info.condition == Condition::attack) {
      ++mc;
    } else if (info.task == Task::obj_oe && info.condition == Condition::attack) {
      ++oe;
    } else {
      ++other;
    }
  }
  const auto [ign, ign_unique] = count_by(ignore);
  c.expect(ignore.size() == 16000 && mc == 8000 && oe == 8000 && other == 0,
           "ignore_text split " + std::to_string(mc) + "/" + std::to_string(oe) + "/" +
               std::to_string(other));
  c.expect(ign_unique == ignore.size(), "ignore_text repeats an item");
  return c.outcome("balanced 4000/4000/8000, ignore_text 8000/8000");
}

Outcome criterion10() {
  Check c;
  const std::vector<std::string> opts = {"cat", "dog", "car", "chair"};
  struct Case {
    const char* family;
    const char* response;
    std::optional<int> want;
  };
  const std::vector<Case> cases = {
      // answer-prefixed
      {"answer", "Answer: (C)", 2},
      {"answer", "answer: b", 1},
      {"answer", "The answer is d.", 3},
      {"answer", "ANSWER: A", 0},
      {"answer", "My answer is (B), the dog.", 1},
      {"answer", "Answer = c", 2},
      {"answer", "Final answer: (a) cat", 0},
      {"answer", "answer is b!", 1},
      // assistant-prefixed
      {"assistant", "Assistant: b", 1},
      {"assistant", "ASSISTANT: (D)", 3},
      {"assistant", "assistant: c.", 2},
      {"assistant", "USER: pick one ASSISTANT: a", 0},
      {"assistant", "assistant:d", 3},
      // parenthesized letter
      {"paren", "(d)", 3},
      {"paren", "I would pick (B) here", 1},
      {"paren", "It is (c) car", 2},
      {"paren", "Option (A)", 0},
      {"paren", "(a) or (b)", std::nullopt},
      // letter with a period
      {"period", "c.", 2},
      {"period", "B. dog", 1},
      {"period", "I choose d.", 3},
      {"period", "A.", 0},
      {"period", "so, b.", 1},
      // bare letter
      {"bare", "B", 1},
      {"bare", " d ", 3},
      {"bare", "a", 0},
      {"bare", "C!", 2},
      // option containment
      {"contain", "a dog", 1},
      {"contain", "Chair", 3},
      {"contain", "It looks like a car to me", 2},
      {"contain", "the CAT", 0},
      {"contain", "a chair, I think", 3},
      // rejected: ambiguous or unmatched
      {"reject", "a cat and a dog", std::nullopt},
      {"reject", "car or chair", std::nullopt},
      {"reject", "a horse", std::nullopt},
      {"reject", "", std::nullopt},
      {"reject", "A or B", std::nullopt},
      {"reject", "maybe e", std::nullopt},
      {"reject", "cats", std::nullopt},
      {"reject", "Answer: (a) ... actually answer: (b)", std::nullopt},
  };
  c.expect(cases.size() == 40, "fixture has " + std::to_string(cases.size()) + " cases");
  for (const auto& k : cases) {
    const auto got = extract_mc_choice(k.response, opts);
    auto show = [](const std::optional<int>& v) {
      return v ? std::string(1, char('A' + *v)) : std::string("none");
    };
    c.expect(got == k.want, std::string(k.family) + " \"" + k.response + "\": got " + show(got) +
                                ", want " + show(k.want));
  }
  return c.outcome("40-case extraction fixture");
}

}  // namespace

int main() {
  // Per-record skip warnings would bury the criterion lines.
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"subset cardinality", criterion1},
      {"build determinism", criterion2},
      {"placement buckets", criterion3},
      {"box distance", criterion4},
      {"negative sampling", criterion5},
      {"VQA accuracy", criterion6},
      {"fuzzy matcher", criterion7},
      {"R-CLIP-M", criterion8},
      {"mixture recipes", criterion9},
      {"MC extraction", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.ok;
    std::cout << (o.ok ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": "
              << criteria[i].first << " - " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
