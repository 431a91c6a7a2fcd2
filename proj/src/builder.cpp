// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/builder.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <opencv2/core.hpp>
#include <thread>

#include "typobench/attackgen.hpp"
#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/manifest.hpp"
#include "typobench/placement.hpp"
#include "typobench/random.hpp"
#include "typobench/render.hpp"
#include "typobench/textmatch.hpp"

namespace typobench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::size_t subset_index(std::string_view name) {
  const auto& all = all_subsets();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].name == name) return i;
  }
  throw ValidationError("unknown subset '" + std::string(name) + "'");
}

ojson box_json(const BBox& b) { return ojson::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

ojson font_json(const FontSpec& f) {
  ojson j;
  j["family"] = f.family;
  j["size_px"] = f.size_px;
  j["fill_color"] = f.fill_color;
  j["stroke_color"] = f.stroke_color ? ojson(*f.stroke_color) : ojson(nullptr);
  j["stroke_width_px"] = f.stroke_width_px;
  return j;
}

ojson placement_json(const Placement& p) {
  ojson j;
  j["position"] = box_json(p.position);
  j["level"] = to_string(p.level);
  j["bucket"] = to_string(p.bucket);
  j["attempts"] = p.attempts;
  j["overlaps_ocr"] = p.overlaps_ocr;
  j["cell"] = p.cell ? ojson::array({(*p.cell)[0], (*p.cell)[1]}) : ojson(nullptr);
  return j;
}

ojson negatives_json(const NegativeTriple& n) {
  ojson j;
  j["hard"] = n.hard;
  j["medium"] = n.medium;
  j["easy"] = n.easy;
  j["native"] = {{"hard", n.hard_native}, {"medium", n.medium_native}, {"easy", n.easy_native}};
  return j;
}

ojson item_base(const ImageRecord& r, const SubsetInfo& s, const std::string& image_path) {
  ojson j;
  j["image_id"] = r.image_id;
  j["subset"] = s.name;
  j["task"] = to_string(s.task);
  j["condition"] = to_string(s.condition);
  j["level"] = to_string(s.level);
  j["image_path"] = image_path;
  j["source_image_path"] = r.image_path;
  return j;
}

std::string attack_relpath(std::string_view subset, const std::string& image_id) {
  return "attacks/" + std::string(subset) + "/" + image_id + ".png";
}

void check_image_id(const std::string& id) {
  if (id.empty() || id.find('/') != std::string::npos || id.find('\\') != std::string::npos ||
      id == "." || id == "..") {
    throw ValidationError("image_id '" + id + "' cannot be used as a file name");
  }
}

}  // namespace

RecordItems build_record(const ImageRecord& r, const BuildInputs& in, ClassEmbedder& classes,
                         const fs::path& out_dir) {
  const RunConfig& cfg = in.config;
  RecordItems out;
  auto put = [&](std::string_view subset, ojson item) {
    out.items[subset_index(subset)] = std::move(item);
  };
  auto skip = [&](std::string_view subset, const std::string& reason) {
    out.skip_reasons[subset_index(subset)] = reason;
  };
  auto seed = [&](std::string_view stream) {
    return derive_record_seed(cfg.global_seed, r.image_id, stream);
  };
  check_image_id(r.image_id);

  static thread_local std::unique_ptr<TextRenderer> renderer;
  static thread_local std::string renderer_font;
  if (!renderer || renderer_font != cfg.font_file) {
    renderer = std::make_unique<TextRenderer>(cfg.font_file);
    renderer_font = cfg.font_file;
  }

  std::optional<cv::Mat> base_image;
  auto image = [&]() -> const cv::Mat& {
    if (!base_image) base_image = load_bgr(r.image_path);
    if (base_image->cols != r.width || base_image->rows != r.height) {
      throw ValidationError("image " + r.image_id + " is " + std::to_string(base_image->cols) +
                            "x" + std::to_string(base_image->rows) + ", corpus says " +
                            std::to_string(r.width) + "x" + std::to_string(r.height));
    }
    return *base_image;
  };

  // ---- object questions --------------------------------------------------
  const std::array<Level, 3> obj_levels = {Level::easy, Level::medium, Level::hard};
  auto skip_obj = [&](bool include_oe_clean, const std::string& reason) {
    for (const auto& s : all_subsets()) {
      if (s.task == Task::text) continue;
      if (!include_oe_clean && s.task == Task::obj_oe && s.condition == Condition::clean) continue;
      skip(s.name, reason);
    }
  };

  std::optional<GroundTruth> gt;
  try {
    const auto image_vec = in.embed.embed_image(r.image_path);
    gt = select_ground_truth(r.object_labels, in.taxonomy, classes, image_vec, cfg.min_gt_depth);
  } catch (const ValidationError& e) {
    spdlog::warn("image {}: no ground truth: {}", r.image_id, e.what());
    skip_obj(true, "no_ground_truth");
  }

  if (gt) {
    const auto oe = make_oe_question(*gt, cfg.oe_prompt);
    ojson oe_q;
    oe_q["type"] = "oe_object";
    oe_q["prompt"] = oe.prompt;
    oe_q["acceptable_answers"] = oe.acceptable_answers;
    oe_q["ground_truth"] = gt->label;
    {
      auto item = item_base(r, subset_info("obj_clean_oe"), r.image_path);
      item["question"] = oe_q;
      item["attack"] = nullptr;
      put("obj_clean_oe", std::move(item));
    }

    std::optional<McQuestion> mc;
    try {
      const auto negatives = in.taxonomy.sample_negatives(gt->label, seed("negatives"),
                                                          r.object_labels);
      mc = make_mc_question(gt->label, negatives, seed("mc_options"), cfg.mc_template);
    } catch (const ValidationError& e) {
      spdlog::warn("image {}: no negatives: {}", r.image_id, e.what());
      skip_obj(false, "negatives_unavailable");
    }

    if (mc) {
      ojson mc_q;
      mc_q["type"] = "mc";
      mc_q["prompt"] = mc->prompt;
      mc_q["options"] = mc->options;
      mc_q["correct_letter"] = std::string(1, mc->correct_letter);
      mc_q["answer"] = gt->label;
      mc_q["negatives"] = negatives_json(mc->negatives);
      {
        auto item = item_base(r, subset_info("obj_clean_mc"), r.image_path);
        item["question"] = mc_q;
        item["attack"] = nullptr;
        put("obj_clean_mc", std::move(item));
      }

      std::vector<BBox> ocr_boxes;
      for (const auto& t : r.ocr_tokens) ocr_boxes.push_back(t.box);

      for (const Level level : obj_levels) {
        const auto mc_name = subset_name(Task::obj_mc, Condition::attack, level);
        const auto oe_name = subset_name(Task::obj_oe, Condition::attack, level);
        const auto& word = obj_attack_word(mc->negatives, level);
        const auto attack_seed = seed("obj_attack_" + std::string(to_string(level)));
        Rng sub(attack_seed);
        const auto font_seed = sub.next();
        const auto position_seed = sub.next();
        const auto font = sample_obj_font(font_seed, cfg.obj_font_options());
        const auto extent = renderer->measure(word, font);
        if (extent.width > r.width || extent.height > r.height) {
          skip(mc_name, "attack_text_too_large");
          skip(oe_name, "attack_text_too_large");
          continue;
        }
        const auto placement = sample_obj_attack_position(
            r.size(), extent.width, extent.height, ocr_boxes, position_seed, cfg.obj_max_attempts);

        try {
          cv::Mat attacked = image().clone();
          renderer->render_overlay(attacked, word, font, placement.position);
          write_png(out_dir / attack_relpath(mc_name, r.image_id), attacked);
          write_png(out_dir / attack_relpath(oe_name, r.image_id), attacked);
        } catch (const ValidationError& e) {
          spdlog::warn("image {}: {}", r.image_id, e.what());
          skip(mc_name, "image_unusable");
          skip(oe_name, "image_unusable");
          continue;
        }

        ojson attack;
        attack["word"] = word;
        attack["task"] = "object";
        attack["level"] = to_string(level);
        attack["font"] = font_json(font);
        attack["placement"] = placement_json(placement);
        attack["rng_seed"] = attack_seed;

        auto mc_item = item_base(r, subset_info(mc_name), attack_relpath(mc_name, r.image_id));
        mc_item["question"] = mc_q;
        mc_item["attack"] = attack;
        put(mc_name, std::move(mc_item));

        auto oe_item = item_base(r, subset_info(oe_name), attack_relpath(oe_name, r.image_id));
        oe_item["question"] = oe_q;
        oe_item["attack"] = std::move(attack);
        put(oe_name, std::move(oe_item));
      }
    }
  }

  // ---- text questions ----------------------------------------------------
  ojson text_q;
  text_q["type"] = "text_qa";
  text_q["prompt"] = r.text_question;
  text_q["answers"] = r.text_answers;
  {
    auto item = item_base(r, subset_info("text_clean"), r.image_path);
    item["question"] = text_q;
    item["attack"] = nullptr;
    put("text_clean", std::move(item));
  }

  const std::array<Level, 2> text_levels = {Level::easy, Level::hard};
  auto skip_text = [&](const std::string& reason) {
    for (auto level : text_levels) skip(subset_name(Task::text, Condition::attack, level), reason);
  };
  if (r.ocr_tokens.empty()) {
    skip_text("no_ocr_tokens");
    return out;
  }

  const KeyTextMatcher matcher(cfg.fuzzy_params(), cfg.stopwords());
  const auto key = matcher.locate(r.text_question, r.text_answers, r.ocr_tokens);
  const auto generated = gen_text_attack_word(r.text_question, r.text_answers, in.generate,
                                              cfg.llm_attempts, cfg.providers.max_tokens);
  if (!generated.word) {
    spdlog::warn("image {}: {}", r.image_id, generated.skip_reason);
    skip_text("llm_no_valid_word");
    return out;
  }
  const auto& word = *generated.word;
  const auto font = text_attack_font(r.height, cfg.text_font_options());
  const auto extent = renderer->measure(word, font);
  if (extent.width == 0 || extent.width > r.width || extent.height > r.height) {
    skip_text(extent.width == 0 ? "attack_text_empty" : "attack_text_too_large");
    return out;
  }
  const auto buckets = bucket_cells(key.box, r.size(), cfg.grid_n, extent.width, extent.height);

  ojson key_json;
  key_json["box"] = box_json(key.box);
  key_json["matched_tokens"] = key.matched_tokens;
  key_json["method"] = to_string(key.method);
  key_json["source"] = to_string(key.source);
  key_json["score"] = key.score ? ojson(*key.score) : ojson(nullptr);
  key_json["fallback"] = key.method == MatchMethod::largest_box_fallback;

  for (const Level level : text_levels) {
    const auto name = subset_name(Task::text, Condition::attack, level);
    const auto attack_seed = seed("text_attack_" + std::string(to_string(level)));
    const auto placement = choose_text_attack_position(buckets, level, attack_seed);
    try {
      cv::Mat attacked = image().clone();
      renderer->render_overlay(attacked, word, font, placement.position);
      write_png(out_dir / attack_relpath(name, r.image_id), attacked);
    } catch (const ValidationError& e) {
      spdlog::warn("image {}: {}", r.image_id, e.what());
      skip(name, "image_unusable");
      continue;
    }

    ojson attack;
    attack["word"] = word;
    attack["task"] = "text";
    attack["level"] = to_string(level);
    attack["font"] = font_json(font);
    attack["placement"] = placement_json(placement);
    attack["rng_seed"] = attack_seed;
    attack["key_text"] = key_json;
    attack["distance"] = box_distance(placement.position, key.box, r.size());
    attack["word_attempts"] = generated.attempts;

    auto item = item_base(r, subset_info(name), attack_relpath(name, r.image_id));
    item["question"] = text_q;
    item["attack"] = std::move(attack);
    put(name, std::move(item));
  }
  return out;
}

ojson BuildSummary::to_json() const {
  ojson j;
  j["records"] = records;
  ojson subs = ojson::object();
  for (const auto& s : all_subsets()) {
    const auto it = subsets.find(std::string(s.name));
    const SubsetBuildStats empty;
    const auto& st = it == subsets.end() ? empty : it->second;
    ojson skips = ojson::object();
    for (const auto& [reason, n] : st.skips) skips[reason] = n;
    subs[std::string(s.name)] = {{"items", st.items}, {"skips", std::move(skips)}};
  }
  j["subsets"] = std::move(subs);
  return j;
}

BuildSummary build_benchmark(std::vector<ImageRecord> records, const BuildInputs& in,
                             const fs::path& out_dir) {
  in.config.validate();
  std::sort(records.begin(), records.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].image_id == records[i - 1].image_id) {
      throw ValidationError("duplicate image_id in corpus: " + records[i].image_id);
    }
  }
  fs::create_directories(out_dir);
  const auto started = std::chrono::system_clock::now();

  ClassEmbedder classes(in.embed, in.config.class_templates);
  std::vector<RecordItems> results(records.size());
  std::vector<std::exception_ptr> errors(records.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= records.size() || failed.load()) return;
      try {
        results[i] = build_record(records[i], in, classes, out_dir);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const auto n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(in.config.workers, records.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      if (dynamic_cast<const ProviderError*>(&e)) {
        throw ProviderError(static_cast<const ProviderError&>(e).kind(),
                            "image " + records[i].image_id + ": " + e.what());
      }
      throw;
    }
  }

  BuildSummary summary;
  summary.records = records.size();
  const auto hash = config_hash(in.config);
  const auto hashed = hashed_config_json(in.config);
  const auto& all = all_subsets();
  for (std::size_t s = 0; s < all.size(); ++s) {
    Manifest m;
    m.header.subset = all[s].name;
    m.header.config_hash = hash;
    m.header.config = hashed;
    auto& st = summary.subsets[std::string(all[s].name)];
    for (auto& r : results) {
      if (r.items[s]) {
        m.items.push_back(std::move(*r.items[s]));
        ++st.items;
      } else if (!r.skip_reasons[s].empty()) {
        ++st.skips[r.skip_reasons[s]];
      }
    }
    write_manifest(out_dir / (std::string(all[s].name) + ".jsonl"), m);
  }

  {
    std::ofstream stats(out_dir / "stats.json", std::ios::binary | std::ios::trunc);
    stats << summary.to_json().dump(2) << '\n';
  }
  {
    const auto finished = std::chrono::system_clock::now();
    auto stamp = [](std::chrono::system_clock::time_point t) {
      const std::time_t tt = std::chrono::system_clock::to_time_t(t);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
      return std::string(buf);
    };
    std::ofstream log(out_dir / "build.log", std::ios::binary | std::ios::app);
    log << stamp(started) << " build started, " << records.size() << " records, "
        << in.config.workers << " workers\n"
        << stamp(finished) << " build finished, config " << hash << '\n';
  }
  return summary;
}

}  // namespace typobench
