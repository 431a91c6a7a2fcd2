// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/mixture.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/random.hpp"
#include "typobench/subsets.hpp"

namespace typobench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::size_t MixtureRecipe::total() const {
  std::size_t n = 0;
  for (const auto& d : draws) n += d.count;
  return n;
}

MixtureRecipe recipe_from_json(const json& j) {
  MixtureRecipe r;
  try {
    r.name = j.at("name").get<std::string>();
    r.seed = j.value("seed", std::uint64_t{0});
    for (const auto& d : j.at("draws")) {
      MixtureDraw draw;
      draw.subsets = d.at("subsets").get<std::vector<std::string>>();
      if (d.contains("format") && !d["format"].is_null()) {
        draw.format = d["format"].get<std::string>();
      }
      draw.count = d.at("count").get<std::size_t>();
      r.draws.push_back(std::move(draw));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mixture recipe: ") + e.what());
  }
  for (const auto& d : r.draws) {
    if (d.subsets.empty()) throw ValidationError("mixture draw without subsets");
    for (const auto& s : d.subsets) subset_info(s);
    if (d.format && *d.format != "mc" && *d.format != "oe" && *d.format != "text") {
      throw ValidationError("mixture draw format must be mc, oe or text");
    }
  }
  return r;
}

MixtureRecipe load_recipe(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open recipe " + path.string());
  try {
    return recipe_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError("recipe " + path.string() + ": " + e.what());
  }
}

MixtureRecipe preset_recipe(const std::string& name) {
  MixtureRecipe r;
  r.name = name;
  if (name == "balanced") {
    r.draws = {{{"obj_attack_hard_mc"}, "mc", 4000},
               {{"obj_attack_hard_oe"}, "oe", 4000},
               {{"text_attack_hard"}, "text", 8000}};
  } else if (name == "ignore_text") {
    r.draws = {{{"obj_attack_easy_mc", "obj_attack_medium_mc", "obj_attack_hard_mc"}, "mc", 8000},
               {{"obj_attack_easy_oe", "obj_attack_medium_oe", "obj_attack_hard_oe"}, "oe", 8000}};
  } else {
    throw ValidationError("unknown mixture preset '" + name + "'");
  }
  return r;
}

std::vector<std::string> preset_names() { return {"balanced", "ignore_text"}; }

ojson TrainingExample::to_json() const {
  ojson j;
  j["id"] = id;
  j["subset"] = subset;
  j["image"] = image;
  j["prompt"] = prompt;
  j["target"] = target;
  return j;
}

namespace {

std::string item_format(const ojson& item) {
  const auto type = item.at("question").at("type").get<std::string>();
  if (type == "mc") return "mc";
  if (type == "oe_object") return "oe";
  if (type == "text_qa") return "text";
  throw ValidationError("unknown question type '" + type + "'");
}

}  // namespace

std::string training_target(const ojson& item) {
  const auto& q = item.at("question");
  const auto format = item_format(item);
  if (format == "mc") return q.at("correct_letter").get<std::string>();
  if (format == "oe") {
    std::string out;
    for (const auto& a : q.at("acceptable_answers")) {
      out += (out.empty() ? "" : ", ") + a.get<std::string>();
    }
    return out;
  }
  const auto answers = q.at("answers").get<std::vector<std::string>>();
  if (answers.empty()) throw ValidationError("text item without answers");
  std::string best = answers.front();
  long best_count = 0;
  for (const auto& a : answers) {
    const auto c = std::count(answers.begin(), answers.end(), a);
    if (c > best_count) {
      best = a;
      best_count = c;
    }
  }
  return best;
}

std::vector<TrainingExample> compose_mixture(const MixtureRecipe& recipe,
                                             const std::map<std::string, Manifest>& manifests,
                                             const fs::path& manifest_dir) {
  std::vector<TrainingExample> out;
  out.reserve(recipe.total());
  for (std::size_t d = 0; d < recipe.draws.size(); ++d) {
    const auto& draw = recipe.draws[d];
    std::vector<const ojson*> pool;
    for (const auto& subset : draw.subsets) {
      const auto it = manifests.find(subset);
      if (it == manifests.end()) throw ValidationError("no manifest for subset " + subset);
      for (const auto& item : it->second.items) {
        if (!draw.format || item_format(item) == *draw.format) pool.push_back(&item);
      }
    }
    if (draw.count > pool.size()) {
      throw ValidationError("recipe '" + recipe.name + "' draw " + std::to_string(d) + " asks for " +
                            std::to_string(draw.count) + " items but only " +
                            std::to_string(pool.size()) + " are available");
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_record_seed(recipe.seed, recipe.name, "draw:" + std::to_string(d)));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < draw.count; ++i) {
      const auto& item = *pool[order[i]];
      TrainingExample ex;
      ex.subset = item.at("subset").get<std::string>();
      ex.id = ex.subset + "/" + item.at("image_id").get<std::string>();
      fs::path image = item.at("image_path").get<std::string>();
      if (image.is_relative() && !item.at("attack").is_null()) {
        image = (manifest_dir / image).lexically_normal();
      }
      ex.image = image.string();
      ex.prompt = item.at("question").at("prompt").get<std::string>();
      ex.target = training_target(item);
      out.push_back(std::move(ex));
    }
  }
  Rng rng(derive_record_seed(recipe.seed, recipe.name, "shuffle"));
  rng.shuffle(std::span<TrainingExample>(out));
  return out;
}

void write_mixture(const fs::path& path, const std::vector<TrainingExample>& examples) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : examples) out << e.to_json().dump() << '\n';
}

}  // namespace typobench
