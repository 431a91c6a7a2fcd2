// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/manifest.hpp"

#include <fstream>

#include "typobench/error.hpp"
#include "typobench/subsets.hpp"

namespace typobench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string header_line(const ManifestHeader& h) {
  ojson j;
  j["format"] = kManifestFormat;
  j["version"] = kManifestVersion;
  j["subset"] = h.subset;
  j["config_hash"] = h.config_hash;
  j["config"] = h.config;
  return "# " + j.dump();
}

ManifestHeader parse_header_line(const std::string& line) {
  if (!line.starts_with("# ")) throw ValidationError("manifest does not start with a '# ' header");
  ojson j;
  try {
    j = ojson::parse(line.substr(2));
  } catch (const ojson::exception& e) {
    throw ValidationError(std::string("manifest header: ") + e.what());
  }
  if (j.value("format", "") != kManifestFormat) {
    throw ValidationError("not a typobench manifest header");
  }
  if (j.value("version", 0) != kManifestVersion) {
    throw ValidationError("unsupported manifest version " + j["version"].dump());
  }
  ManifestHeader h;
  h.subset = j.at("subset").get<std::string>();
  h.config_hash = j.at("config_hash").get<std::string>();
  h.config = j.value("config", ojson::object());
  return h;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << header_line(m.header) << '\n';
    for (const auto& item : m.items) out << item.dump() << '\n';
  }
  fs::rename(tmp, path);
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty manifest " + path.string());
  m.header = parse_header_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      m.items.push_back(ojson::parse(line));
    } catch (const ojson::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

std::map<std::string, Manifest> read_manifest_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::map<std::string, Manifest> out;
  for (const auto& s : all_subsets()) {
    const auto path = dir / (std::string(s.name) + ".jsonl");
    if (fs::exists(path)) out.emplace(s.name, read_manifest(path));
  }
  return out;
}

std::size_t count_manifest_items(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  std::size_t n = 0;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line.starts_with("#")) continue;
    }
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace typobench
