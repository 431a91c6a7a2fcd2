// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic dual-annotated corpus for tests: rendered sign images with OCR
// tokens, object labels, TextVQA-style questions and a small taxonomy.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace typobench::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "typobench");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Entity{Mammal{Carnivore{Cat,Dog}, Rodent{Squirrel}}, Vehicle{Car,Truck}}.
nlohmann::json small_taxonomy_json();

/// Three top-level branches, four levels deep, 36 classes.
nlohmann::json fixture_taxonomy_json();

struct Fixture {
  std::filesystem::path root;
  std::filesystem::path qa;
  std::filesystem::path ocr;
  std::filesystem::path labels;
  std::filesystem::path taxonomy;
  std::filesystem::path images;
  std::vector<std::string> image_ids;
  /// Images that carry OCR tokens.
  std::set<std::string> with_ocr;
  /// Question text of the lowest-index QA per image.
  std::map<std::string, std::string> first_question;
  /// Every answer string that appears in the QA file.
  std::set<std::string> answer_words;
  std::size_t qa_entries = 0;
};

/// Writes `n_images` PNGs plus QA / OCR / label / taxonomy files under
/// `root`. Every image is labeled; every tenth image has no OCR tokens; each
/// image has one to three QA entries.
Fixture write_fixture(const std::filesystem::path& root, std::size_t n_images = 50,
                      std::uint64_t seed = 7);

/// Reads a whole file as bytes.
std::string slurp(const std::filesystem::path& path);

}  // namespace typobench::testing
