// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace typobench {

/// Item counts recounted from manifest files.
struct DatasetStats {
  /// (subset, items) in canonical subset order, only for manifests present.
  std::vector<std::pair<std::string, std::size_t>> subsets;
  std::size_t total = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

DatasetStats compute_stats(const std::filesystem::path& manifest_dir);

}  // namespace typobench
