// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>

namespace typobench {

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Axis-aligned rectangle in pixel coordinates, origin top-left.
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  /// x_min <= x_max, y_min <= y_max and all coordinates non-negative.
  bool valid() const;
  bool inside(ImageSize image) const;

  std::array<std::array<double, 2>, 4> corners() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Closed-interval intersection: boxes sharing only an edge or a corner
/// intersect.
bool intersects(const BBox& a, const BBox& b);

/// Tight union of two boxes.
BBox unite(const BBox& a, const BBox& b);

/// Tight union of a non-empty list of boxes.
BBox unite(std::span<const BBox> boxes);

BBox clip_to(const BBox& box, ImageSize image);

}  // namespace typobench
