// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>

namespace typobench {

enum class Level { none, easy, medium, hard };
enum class Task { obj_mc, obj_oe, text };
enum class Condition { clean, attack };

std::string_view to_string(Level level);
std::string_view to_string(Task task);
std::string_view to_string(Condition condition);
Level level_from_string(std::string_view s);

/// One of the eleven frozen subset names and what it encodes.
struct SubsetInfo {
  std::string_view name;
  Task task;
  Condition condition;
  Level level;
};

inline constexpr std::size_t kSubsetCount = 11;

/// Subsets in canonical order: object clean, object attacks by level (MC
/// before OE), text clean, text attacks.
const std::array<SubsetInfo, kSubsetCount>& all_subsets();

/// Throws ValidationError for an unknown name.
const SubsetInfo& subset_info(std::string_view name);
bool is_subset_name(std::string_view name);

/// e.g. (obj_mc, attack, hard) -> "obj_attack_hard_mc".
std::string subset_name(Task task, Condition condition, Level level);

}  // namespace typobench
