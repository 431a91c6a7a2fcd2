// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "typobench/error.hpp"
#include "typobench/random.hpp"

namespace typobench {

double box_distance(const BBox& a, const BBox& b, ImageSize image) {
  if (image.width <= 0 || image.height <= 0) {
    throw ValidationError("box_distance: image has zero area");
  }
  if (intersects(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.corners()) {
    for (const auto& q : b.corners()) {
      best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
    }
  }
  return best / std::hypot(static_cast<double>(image.width), static_cast<double>(image.height));
}

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::near: return "near";
    case Bucket::mid: return "mid";
    case Bucket::far: return "far";
    case Bucket::free: return "free";
  }
  return "free";
}

Bucket bucket_from_string(std::string_view s) {
  for (auto b : {Bucket::near, Bucket::mid, Bucket::far, Bucket::free}) {
    if (to_string(b) == s) return b;
  }
  throw ValidationError("unknown bucket '" + std::string(s) + "'");
}

std::array<std::size_t, 3> tertile_sizes(std::size_t cells) {
  const std::size_t near = (cells + 2) / 3;
  const std::size_t mid = cells / 3;
  return {near, mid, cells - near - mid};
}

BBox cell_attack_box(ImageSize image, int n, int row, int col, int width, int height) {
  if (width > image.width || height > image.height) {
    throw ValidationError("attack box " + std::to_string(width) + "x" + std::to_string(height) +
                          " does not fit a " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) + " image");
  }
  const double cx = (col + 0.5) * image.width / n;
  const double cy = (row + 0.5) * image.height / n;
  const long x0 = std::clamp<long>(std::lround(cx - width / 2.0), 0, image.width - width);
  const long y0 = std::clamp<long>(std::lround(cy - height / 2.0), 0, image.height - height);
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x0 + width),
          static_cast<double>(y0 + height)};
}

GridBuckets bucket_cells(const BBox& key_box, ImageSize image, int n, int attack_width,
                         int attack_height) {
  if (n < 2) throw ValidationError("grid size must be at least 2");
  if (attack_width < 0 || attack_height < 0) throw ValidationError("negative attack box size");

  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      GridCell cell;
      cell.row = r;
      cell.col = c;
      cell.box = cell_attack_box(image, n, r, c, attack_width, attack_height);
      cell.distance = box_distance(cell.box, key_box, image);
      cells.push_back(cell);
    }
  }
  // Cells are generated in row-major order, so a stable sort on distance
  // alone orders ties by row-major index.
  std::stable_sort(cells.begin(), cells.end(),
                   [](const GridCell& a, const GridCell& b) { return a.distance < b.distance; });

  const auto sizes = tertile_sizes(cells.size());
  GridBuckets out;
  out.n = n;
  const auto near_end = cells.begin() + static_cast<long>(sizes[0]);
  const auto mid_end = near_end + static_cast<long>(sizes[1]);
  out.near.assign(cells.begin(), near_end);
  out.mid.assign(near_end, mid_end);
  out.far.assign(mid_end, cells.end());
  return out;
}

Placement choose_text_attack_position(const GridBuckets& buckets, Level level,
                                      std::uint64_t seed) {
  const std::vector<GridCell>* pool = nullptr;
  Bucket bucket;
  if (level == Level::easy) {
    pool = &buckets.far;
    bucket = Bucket::far;
  } else if (level == Level::hard) {
    pool = &buckets.mid;
    bucket = Bucket::mid;
  } else {
    throw ValidationError("text attacks only have easy and hard levels");
  }
  if (pool->empty()) throw ValidationError("empty placement bucket");

  Rng rng(seed);
  const auto& cell = (*pool)[rng.index(pool->size())];
  Placement p;
  p.position = cell.box;
  p.level = level;
  p.bucket = bucket;
  p.attempts = 1;
  p.cell = std::array<int, 2>{cell.row, cell.col};
  return p;
}

Placement sample_obj_attack_position(ImageSize image, int text_width, int text_height,
                                     std::span<const BBox> ocr_boxes, std::uint64_t seed,
                                     int max_attempts) {
  if (text_width > image.width || text_height > image.height) {
    throw ValidationError("attack text larger than the image");
  }
  if (max_attempts < 1) throw ValidationError("max_attempts must be positive");

  Rng rng(seed);
  Placement p;
  p.level = Level::none;
  p.bucket = Bucket::free;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto x = rng.uniform_int(0, image.width - text_width);
    const auto y = rng.uniform_int(0, image.height - text_height);
    p.position = {static_cast<double>(x), static_cast<double>(y),
                  static_cast<double>(x + text_width), static_cast<double>(y + text_height)};
    p.attempts = attempt;
    const bool hit = std::any_of(ocr_boxes.begin(), ocr_boxes.end(),
                                 [&](const BBox& b) { return intersects(p.position, b); });
    if (!hit) {
      p.overlaps_ocr = false;
      return p;
    }
    p.overlaps_ocr = true;
  }
  return p;
}

}  // namespace typobench
