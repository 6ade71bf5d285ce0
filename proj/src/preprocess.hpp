#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "point_cloud.hpp"

namespace lrp {

struct DownsampleParams {
  int density_reference = 32;  // per-bin cap at bin 0, points
  double bin_width = 1.0;      // meters along radial distance
  uint64_t seed = 1;
};

// Range-compensated density reduction. Points are partitioned by radial
// distance r = sqrt(x^2+y^2+z^2) into bins of bin_width; a bin whose count
// exceeds cap = density_reference * (1 + bin_index)^2 keeps a seeded uniform
// subsample of exactly cap points. The quadratic cap growth inverts the
// 1/distance^2 falloff of received point density, so the retained cloud
// approximates range-uniform surface density. Relative order of surviving
// points is preserved; the sub-stream for each bin derives from
// (seed, frame_id, bin_index) so results are scheduling-independent.
PointCloud downsample(const PointCloud& cloud, const DownsampleParams& params);

struct GroundParams {
  double grid_step = 0.5;     // meters, x-y floor discretization
  double seed_band = 0.20;    // meters, vertical band above each cell minimum
  double removal_band = 0.15; // meters, |z - surface| classified as ground
};

// Degree-2 bivariate surface z = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2.
struct GroundModel {
  std::array<double, 6> coeffs{};
  double grid_step = 0.5;
  double seed_band = 0.20;
  double removal_band = 0.15;
  // Set when the normal equations were rank-deficient and the fit fell back
  // to a horizontal plane at the median seed height.
  bool degenerate_fallback = false;

  double eval(double x, double y) const {
    return coeffs[0] + coeffs[1] * x + coeffs[2] * y + coeffs[3] * x * x +
           coeffs[4] * x * y + coeffs[5] * y * y;
  }
};

struct GroundExtraction {
  GroundModel model;
  std::vector<uint32_t> ground_indices;  // ascending indices into the cloud
  size_t floor_set_size = 0;             // points that fed the surface fit
};

// Grid-minimum seeding plus least-squares surface fit: (1) per occupied
// grid cell the minimum-z point seeds the floor; (2) points within
// seed_band above their cell's seed join the floor set; (3) a degree-2
// surface is fit to the floor set by normal equations with a rank check;
// (4) ground_indices = all points within removal_band of the surface.
GroundExtraction extract_ground(const PointCloud& cloud, const GroundParams& params);

// Least-squares polynomial surface fit used by extract_ground. degree in
// {0, 1, 2} selects 1, 3 or 6 terms of the basis (1, x, y, x^2, xy, y^2);
// unused coefficients are zero. Returns false when the system is
// rank-deficient. Exposed for residual-monotonicity checks.
bool fit_polynomial_surface(const std::vector<Point3>& points,
                            const std::vector<uint32_t>& indices, int degree,
                            std::array<double, 6>& coeffs);

struct RemovalResult {
  PointCloud cloud;
  // old_to_new[i] is the index of source point i in the output, or -1 if
  // the point was removed.
  std::vector<int32_t> old_to_new;
};

// Cloud minus the given (ground) points, original relative order preserved.
RemovalResult remove_ground(const PointCloud& cloud,
                            const std::vector<uint32_t>& ground_indices);

}  // namespace lrp
