// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/subsets.hpp"

#include <algorithm>

#include "typobench/error.hpp"

namespace typobench {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::none: return "none";
    case Level::easy: return "easy";
    case Level::medium: return "medium";
    case Level::hard: return "hard";
  }
  return "none";
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::obj_mc: return "obj_mc";
    case Task::obj_oe: return "obj_oe";
    case Task::text: return "text";
  }
  return "text";
}

std::string_view to_string(Condition condition) {
  return condition == Condition::clean ? "clean" : "attack";
}

Level level_from_string(std::string_view s) {
  for (auto l : {Level::none, Level::easy, Level::medium, Level::hard}) {
    if (to_string(l) == s) return l;
  }
  throw ValidationError("unknown attack level '" + std::string(s) + "'");
}

const std::array<SubsetInfo, kSubsetCount>& all_subsets() {
  static constexpr std::array<SubsetInfo, kSubsetCount> subsets = {{
      {"obj_clean_mc", Task::obj_mc, Condition::clean, Level::none},
      {"obj_clean_oe", Task::obj_oe, Condition::clean, Level::none},
      {"obj_attack_easy_mc", Task::obj_mc, Condition::attack, Level::easy},
      {"obj_attack_easy_oe", Task::obj_oe, Condition::attack, Level::easy},
      {"obj_attack_medium_mc", Task::obj_mc, Condition::attack, Level::medium},
      {"obj_attack_medium_oe", Task::obj_oe, Condition::attack, Level::medium},
      {"obj_attack_hard_mc", Task::obj_mc, Condition::attack, Level::hard},
      {"obj_attack_hard_oe", Task::obj_oe, Condition::attack, Level::hard},
      {"text_clean", Task::text, Condition::clean, Level::none},
      {"text_attack_easy", Task::text, Condition::attack, Level::easy},
      {"text_attack_hard", Task::text, Condition::attack, Level::hard},
  }};
  return subsets;
}

bool is_subset_name(std::string_view name) {
  const auto& all = all_subsets();
  return std::any_of(all.begin(), all.end(), [&](const SubsetInfo& s) { return s.name == name; });
}

const SubsetInfo& subset_info(std::string_view name) {
  for (const auto& s : all_subsets()) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown subset '" + std::string(name) + "'");
}

std::string subset_name(Task task, Condition condition, Level level) {
  for (const auto& s : all_subsets()) {
    if (s.task == task && s.condition == condition && s.level == level) return std::string(s.name);
  }
  throw ValidationError("no subset for " + std::string(to_string(task)) + "/" +
                        std::string(to_string(condition)) + "/" + std::string(to_string(level)));
}

}  // namespace typobench
