// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/render.hpp"

#include <cmath>
#include <map>
#include <opencv2/freetype.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "typobench/error.hpp"
#include "typobench/random.hpp"

namespace typobench {

namespace fs = std::filesystem;

const std::vector<std::string>& default_obj_colors() {
  static const std::vector<std::string> colors = {"white", "black", "red",    "orange",
                                                  "green", "blue",  "yellow", "purple"};
  return colors;
}

cv::Scalar color_bgr(std::string_view name) {
  static const std::map<std::string, cv::Scalar, std::less<>> table = {
      {"white", {255, 255, 255}}, {"black", {0, 0, 0}},     {"red", {0, 0, 255}},
      {"orange", {0, 165, 255}},  {"green", {0, 200, 0}},   {"blue", {255, 0, 0}},
      {"yellow", {0, 255, 255}},  {"purple", {128, 0, 128}},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("unknown color '" + std::string(name) + "'");
  return it->second;
}

FontSpec sample_obj_font(std::uint64_t seed, const ObjFontOptions& options) {
  if (options.min_size <= 0 || options.max_size < options.min_size) {
    throw ValidationError("invalid object-attack font size range");
  }
  if (options.colors.empty()) throw ValidationError("empty object-attack color list");
  Rng rng(seed);
  FontSpec f;
  f.family = options.family;
  f.size_px = static_cast<int>(rng.uniform_int(options.min_size, options.max_size));
  f.fill_color = options.colors[rng.index(options.colors.size())];
  return f;
}

FontSpec text_attack_font(int image_height, const TextFontOptions& options) {
  if (image_height <= 0) throw ValidationError("image height must be positive");
  FontSpec f;
  f.family = options.family;
  f.size_px = std::max(options.min_size,
                       static_cast<int>(std::lround(options.height_ratio * image_height)));
  f.fill_color = "white";
  f.stroke_color = "black";
  f.stroke_width_px = std::max(1, f.size_px / options.stroke_divisor);
  return f;
}

// ---------------------------------------------------------------------------

struct TextRenderer::Glyphs {
  cv::Mat fill;    // CV_8U, nonzero where the fill color goes
  cv::Mat stroke;  // CV_8U, nonzero where the stroke color goes
  int width = 0;
  int height = 0;
};

TextRenderer::TextRenderer(const fs::path& font_file) : font_file_(font_file) {
  if (!fs::is_regular_file(font_file_)) {
    throw ValidationError("font file not found: " + font_file_.string());
  }
  ft_ = cv::freetype::createFreeType2();
  ft_->loadFontData(font_file_.string(), 0);
}

TextRenderer::~TextRenderer() = default;

TextRenderer::Glyphs TextRenderer::rasterize(std::string_view word, const FontSpec& font) const {
  Glyphs g;
  if (word.empty()) return g;
  if (font.size_px <= 0) throw ValidationError("font size must be positive");
  const std::string text(word);
  const int stroke = font.stroke_color ? font.stroke_width_px : 0;

  std::lock_guard lock(mu_);
  int baseline = 0;
  const cv::Size size = ft_->getTextSize(text, font.size_px, -1, &baseline);
  const int pad = font.size_px + 2 * stroke + 4;
  const cv::Size canvas_size(size.width + 2 * pad, size.height + baseline + 2 * pad);

  auto draw = [&](int thickness) {
    cv::Mat canvas(canvas_size, CV_8UC3, cv::Scalar::all(0));
    ft_->putText(canvas, text, cv::Point(pad, pad), font.size_px, cv::Scalar::all(255),
                 thickness, cv::LINE_8, false);
    cv::Mat mask;
    cv::extractChannel(canvas, mask, 0);
    return mask;
  };
  cv::Mat fill = draw(-1);
  cv::Mat outline = stroke > 0 ? draw(2 * stroke) : cv::Mat::zeros(canvas_size, CV_8U);

  cv::Mat any = fill | outline;
  std::vector<cv::Point> points;
  cv::findNonZero(any, points);
  if (points.empty()) return g;
  const cv::Rect tight = cv::boundingRect(points);
  g.fill = fill(tight).clone();
  g.stroke = outline(tight).clone();
  g.width = tight.width;
  g.height = tight.height;
  return g;
}

TextExtent TextRenderer::measure(std::string_view word, const FontSpec& font) const {
  const auto g = rasterize(word, font);
  return {g.width, g.height};
}

void TextRenderer::render_overlay(cv::Mat& image, std::string_view word, const FontSpec& font,
                                  const BBox& position) const {
  if (image.type() != CV_8UC3) throw ValidationError("render_overlay needs an 8-bit BGR image");
  const auto g = rasterize(word, font);
  if (g.width == 0) return;

  const int x0 = static_cast<int>(std::lround(position.x_min));
  const int y0 = static_cast<int>(std::lround(position.y_min));
  if (x0 < 0 || y0 < 0 || x0 + g.width > image.cols || y0 + g.height > image.rows) {
    throw ValidationError("rendered text does not fit inside the image at the given position");
  }
  cv::Mat roi = image(cv::Rect(x0, y0, g.width, g.height));
  if (font.stroke_color && font.stroke_width_px > 0) {
    roi.setTo(color_bgr(*font.stroke_color), g.stroke);
  }
  roi.setTo(color_bgr(font.fill_color), g.fill);
}

cv::Mat load_bgr(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR | cv::IMREAD_IGNORE_ORIENTATION);
  if (img.empty()) throw ValidationError("cannot read image " + path.string());
  return img;
}

void write_png(const fs::path& path, const cv::Mat& image) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6, cv::IMWRITE_PNG_STRATEGY,
                                   cv::IMWRITE_PNG_STRATEGY_DEFAULT};
  if (!cv::imwrite(path.string(), image, params)) {
    throw Error("cannot write image " + path.string());
  }
}

}  // namespace typobench
