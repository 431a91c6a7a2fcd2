// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "typobench/geometry.hpp"
#include "typobench/subsets.hpp"

namespace typobench {

/// 0 when the boxes intersect (closed), otherwise the smallest of the 16
/// corner-to-corner Euclidean distances divided by the image diagonal.
double box_distance(const BBox& a, const BBox& b, ImageSize image);

enum class Bucket { near, mid, far, free };
std::string_view to_string(Bucket b);
Bucket bucket_from_string(std::string_view s);

struct GridCell {
  int row = 0;
  int col = 0;
  /// Hypothetical attack box centred in the cell.
  BBox box;
  double distance = 0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridBuckets {
  int n = 0;
  std::vector<GridCell> near;
  std::vector<GridCell> mid;
  std::vector<GridCell> far;
};

/// (near, mid, far) sizes for `cells` cells; near takes the ceiling.
std::array<std::size_t, 3> tertile_sizes(std::size_t cells);

/// Integer-aligned `width` x `height` box centred in cell (row, col) of an
/// n x n grid, shifted (never shrunk) to stay inside the image.
BBox cell_attack_box(ImageSize image, int n, int row, int col, int width, int height);

/// Places a hypothetical attack box in every cell, sorts cells by
/// (distance to `key_box`, row-major index) and splits them into tertiles.
GridBuckets bucket_cells(const BBox& key_box, ImageSize image, int n, int attack_width,
                         int attack_height);

struct Placement {
  BBox position;
  Level level = Level::none;
  Bucket bucket = Bucket::free;
  int attempts = 0;
  /// Rejection sampling ran out and the last sample still touches OCR text.
  bool overlaps_ocr = false;
  /// (row, col) of the grid cell for text attacks.
  std::optional<std::array<int, 2>> cell;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Uniform cell from the far bucket (easy) or the mid bucket (hard).
Placement choose_text_attack_position(const GridBuckets& buckets, Level level,
                                      std::uint64_t seed);

/// Uniform integer top-left corner with the text fully inside the image,
/// resampled while it intersects any OCR box. After `max_attempts` the last
/// sample is kept and flagged.
Placement sample_obj_attack_position(ImageSize image, int text_width, int text_height,
                                     std::span<const BBox> ocr_boxes, std::uint64_t seed,
                                     int max_attempts = 100);

}  // namespace typobench
