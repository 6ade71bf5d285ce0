#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace lrp {

// Sensor frame: x forward, y left, z up. Intensity is carried through the
// pipeline untouched.
struct Point3 {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;

  double range() const {
    const double dx = x, dy = y, dz = z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
};

// Point order is preserved from file order; indices into `points` are the
// stable identifiers used by ground removal and clustering.
struct PointCloud {
  std::string frame_id;
  std::vector<Point3> points;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace lrp
