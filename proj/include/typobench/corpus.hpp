// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typobench/geometry.hpp"

namespace typobench {

class Taxonomy;

inline constexpr std::size_t kHumanAnswerCount = 10;

struct OcrToken {
  std::string text;
  BBox box;

  friend bool operator==(const OcrToken&, const OcrToken&) = default;
};

/// How a raw answer list was brought to exactly ten entries.
enum class AnswerAdjustment { none, padded, truncated };

/// One source QA entry before dedup.
struct QaRecord {
  std::string image_id;
  long long question_index = 0;
  std::string question;
  std::vector<std::string> answers;
  std::optional<std::string> image_path;
  std::optional<ImageSize> size;
};

/// One scene: a single text QA plus OCR tokens and object labels for the same
/// image.
struct ImageRecord {
  std::string image_id;
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<OcrToken> ocr_tokens;
  std::vector<std::string> object_labels;
  std::string text_question;
  std::vector<std::string> text_answers;
  long long source_question_index = 0;
  AnswerAdjustment answers_adjustment = AnswerAdjustment::none;

  ImageSize size() const { return {width, height}; }

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

using OcrTable = std::map<std::string, std::vector<OcrToken>>;
using LabelTable = std::map<std::string, std::vector<std::string>>;

/// Keeps, for every image, the QA with the smallest question index. Output
/// is sorted by image_id. Throws ValidationError on a duplicated
/// (image_id, question_index) pair.
std::vector<QaRecord> dedup_questions(std::vector<QaRecord> records);

/// Pads by cycling (fewer than ten) or truncates (more than ten).
AnswerAdjustment fit_answer_count(std::vector<std::string>& answers);

struct JoinOptions {
  /// Directory used to resolve `<image_id>.jpg` when a QA entry has no path.
  std::filesystem::path image_root;
  /// Drop labels unknown to the taxonomy instead of failing.
  bool drop_unknown_labels = false;
};

struct JoinResult {
  std::vector<ImageRecord> records;
  std::size_t dropped_unlabeled = 0;
  std::size_t dropped_unknown_labels = 0;
  std::size_t clipped_tokens = 0;
  std::size_t adjusted_answer_lists = 0;
};

/// Joins deduplicated QAs with OCR tokens and object labels. Records without
/// labels are dropped and counted; labels missing from `taxonomy` raise
/// ValidationError naming them.
JoinResult join_object_labels(const std::vector<QaRecord>& selected,
                              const LabelTable& labels, const OcrTable& ocr,
                              const Taxonomy& taxonomy,
                              const JoinOptions& options = {});

std::vector<QaRecord> load_qa_file(const std::filesystem::path& path);
OcrTable load_ocr_file(const std::filesystem::path& path);
/// CSV (`image_id,label` or Open Images `ImageID,...,LabelName,Confidence`)
/// or a JSON object mapping image_id to a list of class names.
LabelTable load_labels_file(const std::filesystem::path& path);

std::string record_to_json_line(const ImageRecord& record);
ImageRecord record_from_json_line(const std::string& line);

void write_corpus(const std::filesystem::path& path,
                  const std::vector<ImageRecord>& records);
std::vector<ImageRecord> read_corpus(const std::filesystem::path& path);

}  // namespace typobench
