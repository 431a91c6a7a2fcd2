// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "typobench/config.hpp"
#include "typobench/corpus.hpp"
#include "typobench/providers.hpp"
#include "typobench/subsets.hpp"
#include "typobench/taxonomy.hpp"

namespace typobench {

struct BuildInputs {
  const RunConfig& config;
  const Taxonomy& taxonomy;
  EmbeddingProvider& embed;
  GenerationProvider& generate;
};

struct SubsetBuildStats {
  std::size_t items = 0;
  std::map<std::string, std::size_t> skips;
};

struct BuildSummary {
  std::size_t records = 0;
  std::map<std::string, SubsetBuildStats> subsets;

  nlohmann::ordered_json to_json() const;
};

/// Items and skip reasons for one record, indexed like all_subsets().
struct RecordItems {
  std::array<std::optional<nlohmann::ordered_json>, kSubsetCount> items;
  std::array<std::string, kSubsetCount> skip_reasons;
};

/// Builds every subset item for one record and writes its attacked images
/// under `out_dir/attacks/<subset>/<image_id>.png`. Provider failures
/// propagate; data problems become per-subset skip reasons.
RecordItems build_record(const ImageRecord& record, const BuildInputs& inputs,
                         ClassEmbedder& classes, const std::filesystem::path& out_dir);

/// Builds all eleven subsets with `config.workers` threads and writes
/// `<subset>.jsonl` manifests (records in image_id order), `stats.json`, and
/// a timestamped `build.log` sidecar. Output bytes do not depend on the
/// worker count.
BuildSummary build_benchmark(std::vector<ImageRecord> records, const BuildInputs& inputs,
                             const std::filesystem::path& out_dir);

}  // namespace typobench
