#pragma once

#include <algorithm>
#include <cmath>

namespace lrp {

// Axis-aligned image rectangle, inclusive-exclusive:
// area = (right - left) * (bottom - top).
struct BBox2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const { return width() * height(); }
  bool valid() const { return left < right && top < bottom; }

  // Positive-area overlap against [0,w) x [0,h).
  bool overlaps_image(double w, double h) const {
    const double iw = std::min(right, w) - std::max(left, 0.0);
    const double ih = std::min(bottom, h) - std::max(top, 0.0);
    return iw > 0.0 && ih > 0.0;
  }
};

inline double intersection_area(const BBox2D& a, const BBox2D& b) {
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

// Per-axis min/max of a 3D point set, with extent deltas.
struct Extent3 {
  double min_x = 0.0, max_x = 0.0;
  double min_y = 0.0, max_y = 0.0;
  double min_z = 0.0, max_z = 0.0;

  double dx() const { return max_x - min_x; }
  double dy() const { return max_y - min_y; }
  double dz() const { return max_z - min_z; }

  bool contains(double x, double y, double z) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y &&
           z >= min_z && z <= max_z;
  }
};

}  // namespace lrp
