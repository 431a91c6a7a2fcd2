// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "typobench/geometry.hpp"

namespace cv::freetype {
class FreeType2;
}

namespace typobench {

struct FontSpec {
  std::string family = "DejaVuSans";
  int size_px = 24;
  std::string fill_color = "white";
  std::optional<std::string> stroke_color;
  int stroke_width_px = 0;

  friend bool operator==(const FontSpec&, const FontSpec&) = default;
};

/// The eight object-attack colors.
const std::vector<std::string>& default_obj_colors();

/// BGR triple for a named color. Throws ValidationError for unknown names.
cv::Scalar color_bgr(std::string_view name);

struct ObjFontOptions {
  int min_size = 24;
  int max_size = 32;
  std::vector<std::string> colors = default_obj_colors();
  std::string family = "DejaVuSans";
};

/// Size uniform over [min_size, max_size], color uniform over `colors`.
FontSpec sample_obj_font(std::uint64_t seed, const ObjFontOptions& options = {});

struct TextFontOptions {
  double height_ratio = 0.05;
  int min_size = 12;
  int stroke_divisor = 12;
  std::string family = "DejaVuSans";
};

/// White fill, black stroke, size max(min_size, round(ratio * height)).
FontSpec text_attack_font(int image_height, const TextFontOptions& options = {});

struct TextExtent {
  int width = 0;
  int height = 0;

  friend bool operator==(const TextExtent&, const TextExtent&) = default;
};

/// Draws words with a single TrueType font file and no anti-aliasing, so
/// output is bit-exact for a given font file.
class TextRenderer {
 public:
  explicit TextRenderer(const std::filesystem::path& font_file = TYPOBENCH_DEFAULT_FONT);
  ~TextRenderer();
  TextRenderer(const TextRenderer&) = delete;
  TextRenderer& operator=(const TextRenderer&) = delete;

  /// Tight raster bounds of the word including its stroke; (0, 0) if empty.
  TextExtent measure(std::string_view word, const FontSpec& font) const;

  /// Draws `word` with its tight bounds' top-left at the top-left of
  /// `position` (rounded). Only glyph pixels are written. `image` must be
  /// 8-bit BGR.
  void render_overlay(cv::Mat& image, std::string_view word, const FontSpec& font,
                      const BBox& position) const;

  const std::filesystem::path& font_file() const { return font_file_; }

 private:
  struct Glyphs;
  Glyphs rasterize(std::string_view word, const FontSpec& font) const;

  std::filesystem::path font_file_;
  cv::Ptr<cv::freetype::FreeType2> ft_;
  mutable std::mutex mu_;
};

/// Reads any image as 8-bit BGR. Throws ValidationError if unreadable.
cv::Mat load_bgr(const std::filesystem::path& path);

/// Lossless PNG with fixed encoder settings.
void write_png(const std::filesystem::path& path, const cv::Mat& image);

}  // namespace typobench
