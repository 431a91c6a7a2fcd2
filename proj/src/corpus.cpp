// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <set>

#include "csv.hpp"
#include "typobench/error.hpp"
#include "typobench/taxonomy.hpp"

namespace typobench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::vector<QaRecord> dedup_questions(std::vector<QaRecord> records) {
  std::sort(records.begin(), records.end(), [](const QaRecord& a, const QaRecord& b) {
    return std::tie(a.image_id, a.question_index) < std::tie(b.image_id, b.question_index);
  });
  std::vector<QaRecord> out;
  long long last_index = 0;
  for (auto& r : records) {
    if (!out.empty() && r.image_id == out.back().image_id) {
      if (r.question_index == last_index) {
        throw ValidationError("duplicate QA (image_id=" + r.image_id + ", question_index=" +
                              std::to_string(r.question_index) + ")");
      }
      last_index = r.question_index;
      continue;
    }
    last_index = r.question_index;
    out.push_back(std::move(r));
  }
  return out;
}

AnswerAdjustment fit_answer_count(std::vector<std::string>& answers) {
  if (answers.empty()) throw ValidationError("QA without answers");
  if (answers.size() == kHumanAnswerCount) return AnswerAdjustment::none;
  if (answers.size() > kHumanAnswerCount) {
    answers.resize(kHumanAnswerCount);
    return AnswerAdjustment::truncated;
  }
  const std::size_t original = answers.size();
  for (std::size_t i = 0; answers.size() < kHumanAnswerCount; ++i) {
    answers.push_back(answers[i % original]);
  }
  return AnswerAdjustment::padded;
}

namespace {

ImageSize read_image_size(const fs::path& path) {
  const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) {
    throw ValidationError("image size unknown and image unreadable: " + path.string());
  }
  return {img.cols, img.rows};
}

std::string_view adjustment_name(AnswerAdjustment a) {
  switch (a) {
    case AnswerAdjustment::none: return "none";
    case AnswerAdjustment::padded: return "padded";
    case AnswerAdjustment::truncated: return "truncated";
  }
  return "none";
}

AnswerAdjustment adjustment_from_name(const std::string& s) {
  if (s == "none") return AnswerAdjustment::none;
  if (s == "padded") return AnswerAdjustment::padded;
  if (s == "truncated") return AnswerAdjustment::truncated;
  throw ValidationError("unknown answers_adjustment '" + s + "'");
}

nlohmann::json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string id_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError("image_id must be a string or integer");
}

}  // namespace

JoinResult join_object_labels(const std::vector<QaRecord>& selected, const LabelTable& labels,
                              const OcrTable& ocr, const Taxonomy& taxonomy,
                              const JoinOptions& options) {
  JoinResult result;
  std::set<std::string> unknown;

  for (const auto& qa : selected) {
    const auto lit = labels.find(qa.image_id);
    if (lit == labels.end() || lit->second.empty()) {
      ++result.dropped_unlabeled;
      continue;
    }
    std::vector<std::string> resolved;
    for (const auto& raw : lit->second) {
      const auto name = taxonomy.resolve(raw);
      if (!name || *name == taxonomy.root()) {
        if (!name) unknown.insert(raw);
        ++result.dropped_unknown_labels;
        continue;
      }
      if (std::find(resolved.begin(), resolved.end(), *name) == resolved.end()) {
        resolved.push_back(*name);
      }
    }
    if (resolved.empty()) {
      ++result.dropped_unlabeled;
      continue;
    }

    ImageRecord rec;
    rec.image_id = qa.image_id;
    rec.image_path = qa.image_path ? *qa.image_path
                                   : (options.image_root / (qa.image_id + ".jpg")).string();
    const ImageSize size = qa.size ? *qa.size : read_image_size(rec.image_path);
    if (size.width <= 0 || size.height <= 0) {
      throw ValidationError("image " + qa.image_id + " has a non-positive size");
    }
    rec.width = size.width;
    rec.height = size.height;

    if (const auto oit = ocr.find(qa.image_id); oit != ocr.end()) {
      for (const auto& tok : oit->second) {
        const auto text = detail::trim(tok.text);
        if (text.empty()) continue;
        BBox box{std::min(tok.box.x_min, tok.box.x_max), std::min(tok.box.y_min, tok.box.y_max),
                 std::max(tok.box.x_min, tok.box.x_max), std::max(tok.box.y_min, tok.box.y_max)};
        const BBox clipped = clip_to(box, size);
        if (!(clipped == box)) ++result.clipped_tokens;
        rec.ocr_tokens.push_back({text, clipped});
      }
    }

    rec.object_labels = std::move(resolved);
    rec.text_question = qa.question;
    rec.text_answers = qa.answers;
    rec.answers_adjustment = fit_answer_count(rec.text_answers);
    if (rec.answers_adjustment != AnswerAdjustment::none) {
      ++result.adjusted_answer_lists;
      spdlog::warn("image {}: {} answers {} to {}", qa.image_id, qa.answers.size(),
                   adjustment_name(rec.answers_adjustment), kHumanAnswerCount);
    }
    rec.source_question_index = qa.question_index;
    result.records.push_back(std::move(rec));
  }

  if (!unknown.empty() && !options.drop_unknown_labels) {
    std::string names;
    for (const auto& u : unknown) names += (names.empty() ? "" : ", ") + u;
    throw ValidationError("labels not in taxonomy: " + names);
  }
  if (result.dropped_unlabeled > 0) {
    spdlog::info("dropped {} images without usable object labels", result.dropped_unlabeled);
  }
  return result;
}

std::vector<QaRecord> load_qa_file(const fs::path& path) {
  const auto doc = parse_file(path);
  const nlohmann::json* entries = &doc;
  if (doc.is_object() && doc.contains("data")) entries = &doc["data"];
  if (!entries->is_array()) throw ValidationError(path.string() + ": expected a QA array");

  std::vector<QaRecord> out;
  out.reserve(entries->size());
  for (const auto& e : *entries) {
    QaRecord r;
    if (!e.contains("image_id")) throw ValidationError("QA entry without image_id");
    r.image_id = id_string(e["image_id"]);
    if (e.contains("question_index")) {
      r.question_index = e["question_index"].get<long long>();
    } else if (e.contains("question_id")) {
      r.question_index = e["question_id"].get<long long>();
    } else {
      throw ValidationError("QA entry for " + r.image_id + " without question_index");
    }
    r.question = e.value("question", "");
    if (e.contains("answers")) r.answers = e["answers"].get<std::vector<std::string>>();
    if (e.contains("image_path")) r.image_path = e["image_path"].get<std::string>();
    if (e.contains("image_width") && e.contains("image_height")) {
      r.size = ImageSize{e["image_width"].get<int>(), e["image_height"].get<int>()};
    }
    out.push_back(std::move(r));
  }
  return out;
}

OcrTable load_ocr_file(const fs::path& path) {
  const auto doc = parse_file(path);
  if (!doc.is_object()) throw ValidationError(path.string() + ": expected an object");
  OcrTable out;
  for (const auto& [image_id, tokens] : doc.items()) {
    auto& list = out[image_id];
    for (const auto& t : tokens) {
      const auto& b = t.at("box");
      if (!b.is_array() || b.size() != 4) {
        throw ValidationError("OCR token box for " + image_id + " is not [x0,y0,x1,y1]");
      }
      list.push_back({t.at("text").get<std::string>(),
                      BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                           b[3].get<double>()}});
    }
  }
  return out;
}

LabelTable load_labels_file(const fs::path& path) {
  LabelTable out;
  auto add = [&](const std::string& id, const std::string& label) {
    auto& v = out[id];
    if (std::find(v.begin(), v.end(), label) == v.end()) v.push_back(label);
  };

  if (path.extension() == ".json") {
    const auto doc = parse_file(path);
    if (!doc.is_object()) throw ValidationError(path.string() + ": expected an object");
    for (const auto& [id, labels] : doc.items()) {
      out[id];
      for (const auto& l : labels) add(id, l.get<std::string>());
    }
    return out;
  }

  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) return out;
  auto header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);

  std::size_t id_col = 0, label_col = 1;
  std::optional<std::size_t> conf_col;
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  if (col("ImageID") && col("LabelName")) {
    id_col = *col("ImageID");
    label_col = *col("LabelName");
    conf_col = col("Confidence");
  } else if (!(header.size() >= 2 && header[0] == "image_id")) {
    // No header: the first line is data.
    if (header.size() < 2) throw ValidationError(path.string() + ": malformed label line");
    add(header[0], header[1]);
  }

  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() <= std::max(id_col, label_col)) {
      throw ValidationError(path.string() + ": malformed label line '" + line + "'");
    }
    // Open Images lists verified-absent classes with confidence 0.
    if (conf_col && *conf_col < f.size() && std::stod(f[*conf_col]) <= 0.0) continue;
    add(detail::trim(f[id_col]), detail::trim(f[label_col]));
  }
  return out;
}

std::string record_to_json_line(const ImageRecord& r) {
  ojson j;
  j["image_id"] = r.image_id;
  j["image_path"] = r.image_path;
  j["width"] = r.width;
  j["height"] = r.height;
  ojson tokens = ojson::array();
  for (const auto& t : r.ocr_tokens) {
    ojson tok;
    tok["text"] = t.text;
    tok["box"] = {t.box.x_min, t.box.y_min, t.box.x_max, t.box.y_max};
    tokens.push_back(std::move(tok));
  }
  j["ocr_tokens"] = std::move(tokens);
  j["object_labels"] = r.object_labels;
  j["text_question"] = r.text_question;
  j["text_answers"] = r.text_answers;
  j["source_question_index"] = r.source_question_index;
  j["answers_adjustment"] = adjustment_name(r.answers_adjustment);
  return j.dump();
}

ImageRecord record_from_json_line(const std::string& line) {
  ImageRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.image_id = j.at("image_id").get<std::string>();
    r.image_path = j.at("image_path").get<std::string>();
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    for (const auto& t : j.at("ocr_tokens")) {
      const auto& b = t.at("box");
      r.ocr_tokens.push_back({t.at("text").get<std::string>(),
                              BBox{b.at(0).get<double>(), b.at(1).get<double>(),
                                   b.at(2).get<double>(), b.at(3).get<double>()}});
    }
    r.object_labels = j.at("object_labels").get<std::vector<std::string>>();
    r.text_question = j.at("text_question").get<std::string>();
    r.text_answers = j.at("text_answers").get<std::vector<std::string>>();
    r.source_question_index = j.at("source_question_index").get<long long>();
    r.answers_adjustment = adjustment_from_name(j.value("answers_adjustment", "none"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed corpus line: ") + e.what());
  }
  if (r.text_answers.size() != kHumanAnswerCount) {
    throw ValidationError("corpus record " + r.image_id + " does not have 10 answers");
  }
  if (r.object_labels.empty()) {
    throw ValidationError("corpus record " + r.image_id + " has no object labels");
  }
  return r;
}

void write_corpus(const fs::path& path, const std::vector<ImageRecord>& records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<ImageRecord> read_corpus(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus " + path.string());
  std::vector<ImageRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json_line(line));
  }
  return out;
}

}  // namespace typobench
