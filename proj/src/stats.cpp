// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/stats.hpp"

#include <algorithm>
#include <sstream>

#include "typobench/error.hpp"
#include "typobench/manifest.hpp"
#include "typobench/subsets.hpp"

namespace typobench {

namespace fs = std::filesystem;

DatasetStats compute_stats(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  DatasetStats st;
  for (const auto& s : all_subsets()) {
    const auto path = dir / (std::string(s.name) + ".jsonl");
    if (!fs::exists(path)) continue;
    const auto n = count_manifest_items(path);
    st.subsets.emplace_back(s.name, n);
    st.total += n;
  }
  return st;
}

nlohmann::ordered_json DatasetStats::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json subs = nlohmann::ordered_json::object();
  for (const auto& [name, n] : subsets) subs[name] = n;
  j["subsets"] = std::move(subs);
  j["total"] = total;
  return j;
}

std::string DatasetStats::to_table() const {
  if (subsets.empty()) return "";
  std::size_t w = std::string("Total").size();
  for (const auto& [name, n] : subsets) w = std::max(w, name.size());
  const std::size_t nw = std::to_string(total).size();
  std::ostringstream out;
  auto row = [&](const std::string& name, std::size_t n) {
    const auto num = std::to_string(n);
    out << name << std::string(w - name.size() + 2, ' ') << std::string(nw - num.size(), ' ')
        << num << '\n';
  };
  for (const auto& [name, n] : subsets) row(name, n);
  row("Total", total);
  return out.str();
}

}  // namespace typobench
