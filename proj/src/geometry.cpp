// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "typobench/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace typobench {

bool BBox::valid() const {
  return x_min <= x_max && y_min <= y_max && x_min >= 0 && y_min >= 0;
}

bool BBox::inside(ImageSize image) const {
  return valid() && x_max <= image.width && y_max <= image.height;
}

std::array<std::array<double, 2>, 4> BBox::corners() const {
  return {{{x_min, y_min}, {x_max, y_min}, {x_min, y_max}, {x_max, y_max}}};
}

bool intersects(const BBox& a, const BBox& b) {
  return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max &&
         b.y_min <= a.y_max;
}

BBox unite(const BBox& a, const BBox& b) {
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
          std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

BBox unite(std::span<const BBox> boxes) {
  if (boxes.empty()) {
    throw std::invalid_argument("unite: empty box list");
  }
  BBox out = boxes.front();
  for (const auto& b : boxes.subspan(1)) {
    out = unite(out, b);
  }
  return out;
}

BBox clip_to(const BBox& box, ImageSize image) {
  const double w = image.width;
  const double h = image.height;
  BBox out{std::clamp(box.x_min, 0.0, w), std::clamp(box.y_min, 0.0, h),
           std::clamp(box.x_max, 0.0, w), std::clamp(box.y_max, 0.0, h)};
  if (out.x_min > out.x_max) std::swap(out.x_min, out.x_max);
  if (out.y_min > out.y_max) std::swap(out.y_min, out.y_max);
  return out;
}

}  // namespace typobench
