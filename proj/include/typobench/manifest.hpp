// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace typobench {

inline constexpr std::string_view kManifestFormat = "typobench-manifest";
inline constexpr int kManifestVersion = 1;

/// First line of every manifest: `# ` followed by this object as JSON.
struct ManifestHeader {
  std::string subset;
  std::string config_hash;
  nlohmann::ordered_json config;
};

struct Manifest {
  ManifestHeader header;
  /// Items in file order (image_id order when written by `build`).
  std::vector<nlohmann::ordered_json> items;
};

std::string header_line(const ManifestHeader& header);
ManifestHeader parse_header_line(const std::string& line);

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

/// `<dir>/<subset>.jsonl` for every subset file present, keyed by subset.
std::map<std::string, Manifest> read_manifest_dir(const std::filesystem::path& dir);

/// Number of item lines, counted directly from the file.
std::size_t count_manifest_items(const std::filesystem::path& path);

}  // namespace typobench
