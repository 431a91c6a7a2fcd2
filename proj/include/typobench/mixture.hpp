// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "typobench/manifest.hpp"

namespace typobench {

/// Draws `count` items without replacement from the pooled items of
/// `subsets`, optionally restricted to one question format ("mc", "oe" or
/// "text").
struct MixtureDraw {
  std::vector<std::string> subsets;
  std::optional<std::string> format;
  std::size_t count = 0;
};

struct MixtureRecipe {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<MixtureDraw> draws;

  std::size_t total() const;
};

MixtureRecipe recipe_from_json(const nlohmann::json& j);
MixtureRecipe load_recipe(const std::filesystem::path& path);

/// Built-in recipes: "balanced" (4k hard object-attack MC, 4k hard
/// object-attack OE, 8k hard text-attack) and "ignore_text" (8k MC and 8k
/// OE pooled over all object-attack levels).
MixtureRecipe preset_recipe(const std::string& name);
std::vector<std::string> preset_names();

/// One SFT-ready training line.
struct TrainingExample {
  std::string id;
  std::string subset;
  std::string image;
  std::string prompt;
  std::string target;

  nlohmann::ordered_json to_json() const;
};

/// The supervised target for a manifest item: the option letter for MC, the
/// acceptable answers joined by ", " for object OE, and the most frequent
/// human answer (first on ties) for text questions.
std::string training_target(const nlohmann::ordered_json& item);

/// Samples each draw with its own seeded stream, then shuffles the union
/// with the recipe seed. Relative image paths are resolved against
/// `manifest_dir`. Throws ValidationError when a draw asks for more items
/// than its pool holds.
std::vector<TrainingExample> compose_mixture(const MixtureRecipe& recipe,
                                             const std::map<std::string, Manifest>& manifests,
                                             const std::filesystem::path& manifest_dir);

void write_mixture(const std::filesystem::path& path,
                   const std::vector<TrainingExample>& examples);

}  // namespace typobench
