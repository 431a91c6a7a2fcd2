// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixture.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "typobench/random.hpp"
#include "typobench/render.hpp"

namespace typobench::testing {

namespace fs = std::filesystem;
using nlohmann::json;

TempDir::TempDir(const std::string& prefix) {
  std::random_device rd;
  const auto base = fs::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / (prefix + "-" + std::to_string(rd()) + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = std::move(candidate);
      return;
    }
  }
  throw std::runtime_error("cannot create a temp directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

json node(const std::string& name, std::vector<json> children = {}) {
  json j = {{"LabelName", name}};
  if (!children.empty()) j["Subcategory"] = std::move(children);
  return j;
}

json leaves(std::initializer_list<const char*> names) {
  json arr = json::array();
  for (const auto* n : names) arr.push_back(node(n));
  return arr;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Sign words. None of them is in the stub generator vocabulary.
const std::vector<std::string> kSignWords = {
    "bus",    "cafe",    "books", "pharmacy", "bank",    "garage",
    "market", "library", "station", "bistro", "theater", "dell",
    "imac",   "taxi",    "parking", "ticket", "outlet",  "gallery"};

const std::vector<std::vector<std::string>> kLabelChoices = {
    {"Cat"},          {"Dog"},           {"Fox"},
    {"Squirrel"},     {"Mouse"},         {"Eagle"},
    {"Owl"},          {"Sparrow"},       {"Robin"},
    {"Car"},          {"Truck"},         {"Bus"},
    {"Boat"},         {"Canoe"},         {"Chair"},
    {"Table"},        {"Bed"},           {"Mug"},
    {"Bowl"},         {"Fork"},          {"Car", "Land vehicle"},
    {"Cat", "Mammal"}, {"Dog", "Chair"}, {"Mug", "Table", "Kitchenware"}};

}  // namespace

json small_taxonomy_json() {
  return node("Entity",
              {node("Mammal", {node("Carnivore", leaves({"Cat", "Dog"})),
                               node("Rodent", leaves({"Squirrel"}))}),
               node("Vehicle", leaves({"Car", "Truck"}))});
}

json fixture_taxonomy_json() {
  return node(
      "Entity",
      {node("Animal",
            {node("Mammal", {node("Carnivore", leaves({"Cat", "Dog", "Fox"})),
                             node("Rodent", leaves({"Squirrel", "Mouse"}))}),
             node("Bird", {node("Raptor", leaves({"Eagle", "Owl"})),
                           node("Songbird", leaves({"Sparrow", "Robin"}))})}),
       node("Vehicle", {node("Land vehicle", leaves({"Car", "Truck", "Bus"})),
                        node("Watercraft", leaves({"Boat", "Canoe"}))}),
       node("Household", {node("Furniture", leaves({"Chair", "Table", "Bed"})),
                          node("Kitchenware", leaves({"Mug", "Bowl", "Fork"}))})});
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Fixture write_fixture(const fs::path& root, std::size_t n_images, std::uint64_t seed) {
  Fixture f;
  f.root = root;
  f.images = root / "images";
  f.qa = root / "qa.json";
  f.ocr = root / "ocr.json";
  f.labels = root / "labels.csv";
  f.taxonomy = root / "hierarchy.json";
  fs::create_directories(f.images);
  write_file(f.taxonomy, fixture_taxonomy_json().dump(2));

  Rng rng(seed);
  TextRenderer renderer;
  json qa = json::array();
  json ocr = json::object();
  std::string labels = "image_id,label\n";

  for (std::size_t i = 0; i < n_images; ++i) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "img%03zu", i);
    const std::string id = id_buf;
    f.image_ids.push_back(id);

    const int w = 320 + static_cast<int>(rng.index(81));
    const int h = 240 + static_cast<int>(rng.index(41));
    cv::Mat img(h, w, CV_8UC3,
                cv::Scalar(60 + rng.index(120), 60 + rng.index(120), 60 + rng.index(120)));
    // A few flat shapes so images are not uniform.
    for (int s = 0; s < 3; ++s) {
      const cv::Point a(static_cast<int>(rng.index(w)), static_cast<int>(rng.index(h)));
      const cv::Point b(static_cast<int>(rng.index(w)), static_cast<int>(rng.index(h)));
      cv::rectangle(img, a, b,
                    cv::Scalar(rng.index(256), rng.index(256), rng.index(256)), cv::FILLED,
                    cv::LINE_8);
    }

    const bool has_ocr = i % 10 != 9;
    const bool misspelled = i % 10 == 4;
    const bool yes_no = i % 7 == 3 && !misspelled;

    std::vector<std::string> words;
    const std::size_t n_words = 1 + rng.index(2);
    while (words.size() < n_words) {
      const auto& w0 = kSignWords[rng.index(kSignWords.size())];
      if (std::find(words.begin(), words.end(), w0) == words.end()) words.push_back(w0);
    }
    if (misspelled) words = {"goverment", "office"};

    json tokens = json::array();
    if (has_ocr) {
      // One word per row on a light sign panel.
      const int sign_x = 20 + static_cast<int>(rng.index(40));
      int y = 20 + static_cast<int>(rng.index(40));
      cv::rectangle(img, cv::Point(sign_x - 8, y - 8), cv::Point(w - 20, y + 40 * 2 + 8),
                    cv::Scalar(235, 235, 235), cv::FILLED, cv::LINE_8);
      for (const auto& word : words) {
        FontSpec font;
        font.size_px = 22 + static_cast<int>(rng.index(6));
        font.fill_color = "black";
        const auto ext = renderer.measure(word, font);
        const BBox box{double(sign_x), double(y), double(sign_x + ext.width),
                       double(y + ext.height)};
        renderer.render_overlay(img, word, font, box);
        tokens.push_back({{"text", word}, {"box", {box.x_min, box.y_min, box.x_max, box.y_max}}});
        y += 40;
      }
      ocr[id] = tokens;
    }
    const auto image_path = f.images / (id + ".png");
    write_png(image_path, img);

    // QA: the selected question has the lowest index; decoys come first in
    // the file with higher indices.
    std::string question;
    std::vector<std::string> answers;
    if (misspelled) {
      question = "Which building is this?";
      answers = std::vector<std::string>(9, "government");
      answers.push_back("government office");
    } else if (yes_no) {
      question = "Is this a " + words[0] + " sign?";
      answers = {"yes", "yes", "yes", "yes", "yes", "yes", "no", "yes", "yes", "no"};
    } else if (!has_ocr) {
      question = "What brand is shown?";
      answers = std::vector<std::string>(10, words[0]);
    } else {
      question = "What does the sign say?";
      answers = std::vector<std::string>(8, words[0]);
      answers.push_back(std::string(1, char(std::toupper(words[0][0]))) + words[0].substr(1));
      answers.push_back(words[0] + " " + words.back());
    }
    if (i % 11 == 5) answers.resize(7);  // exercises padding

    const long long base = static_cast<long long>(i) * 100;
    if (i % 3 == 0) {
      qa.push_back({{"image_id", id},
                    {"question_index", base + 50},
                    {"question", "What color is the sign?"},
                    {"answers", std::vector<std::string>(10, "white")},
                    {"image_path", image_path.string()}});
      f.answer_words.insert("white");
    }
    qa.push_back({{"image_id", id},
                  {"question_index", base},
                  {"question", question},
                  {"answers", answers},
                  {"image_path", image_path.string()}});
    f.first_question[id] = question;
    for (const auto& a : answers) f.answer_words.insert(a);
    if (has_ocr) f.with_ocr.insert(id);

    for (const auto& label : kLabelChoices[rng.index(kLabelChoices.size())]) {
      labels += id + "," + label + "\n";
    }
  }
  f.qa_entries = qa.size();
  write_file(f.qa, json{{"data", qa}}.dump(1));
  write_file(f.ocr, ocr.dump(1));
  write_file(f.labels, labels);
  return f;
}

}  // namespace typobench::testing
