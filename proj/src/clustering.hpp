#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"
#include "point_cloud.hpp"

namespace lrp {

struct DbscanParams {
  double eps = 0.5;  // meters, neighborhood radius
  int min_pts = 10;  // minimum cluster population, inclusive of self
};

struct Cluster {
  int id = 0;
  std::vector<uint32_t> point_indices;  // ascending indices into the cloud
  Extent3 extent;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double centroid_z = 0.0;
};

// Uniform-grid spatial index for 3D Euclidean radius queries. Immutable
// after build and safely shareable across threads.
class SpatialIndex {
 public:
  SpatialIndex(const PointCloud& cloud, double cell);

  // Exactly the points with Euclidean distance <= radius from the center
  // (inclusive boundary), ascending index order.
  std::vector<uint32_t> radius_query(const Point3& center, double radius) const;

  size_t occupied_cells() const { return cells_.size(); }

 private:
  const PointCloud* cloud_;
  double cell_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> cells_;
};

struct DbscanResult {
  std::vector<Cluster> clusters;
  std::vector<uint32_t> noise;       // ascending
  std::vector<int32_t> labels;       // per point: cluster id, or -1 for noise
};

// Density clustering over 3D points. Core points (>= min_pts neighbors
// within eps, inclusive of self) seed expansion; border points join the
// first cluster that reaches them; cluster ids are assigned in order of
// first core-point discovery by ascending point index, so the partition is
// deterministic. Neighborhoods are 3D Euclidean balls.
DbscanResult dbscan(const PointCloud& cloud, const DbscanParams& params);

// Per-axis min/max and arithmetic-mean centroid over the member points.
Cluster summarize_cluster(const PointCloud& cloud,
                          const std::vector<uint32_t>& indices);

}  // namespace lrp
