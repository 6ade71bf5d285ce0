#include "clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "error.hpp"

namespace lrp {

namespace {

constexpr uint64_t kAxisMask = (1ULL << 21) - 1;

uint64_t pack_cell(int64_t ix, int64_t iy, int64_t iz) {
  return ((static_cast<uint64_t>(ix) & kAxisMask) << 42) |
         ((static_cast<uint64_t>(iy) & kAxisMask) << 21) |
         (static_cast<uint64_t>(iz) & kAxisMask);
}

int64_t cell_of(double v, double cell) {
  return static_cast<int64_t>(std::floor(v / cell));
}

}  // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud, double cell)
    : cloud_(&cloud), cell_(cell) {
  if (!(cell > 0.0)) throw_argument("SpatialIndex: cell size must be > 0");
  cells_.reserve(cloud.size());
  for (uint32_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    cells_[pack_cell(cell_of(p.x, cell), cell_of(p.y, cell), cell_of(p.z, cell))]
        .push_back(i);
  }
}

std::vector<uint32_t> SpatialIndex::radius_query(const Point3& center,
                                                 double radius) const {
  if (!(radius > 0.0)) throw_argument("radius_query: radius must be > 0");
  const double r2 = radius * radius;
  const int64_t x0 = cell_of(center.x - radius, cell_);
  const int64_t x1 = cell_of(center.x + radius, cell_);
  const int64_t y0 = cell_of(center.y - radius, cell_);
  const int64_t y1 = cell_of(center.y + radius, cell_);
  const int64_t z0 = cell_of(center.z - radius, cell_);
  const int64_t z1 = cell_of(center.z + radius, cell_);

  std::vector<uint32_t> hits;
  for (int64_t ix = x0; ix <= x1; ++ix) {
    for (int64_t iy = y0; iy <= y1; ++iy) {
      for (int64_t iz = z0; iz <= z1; ++iz) {
        auto it = cells_.find(pack_cell(ix, iy, iz));
        if (it == cells_.end()) continue;
        for (uint32_t idx : it->second) {
          const Point3& p = cloud_->points[idx];
          const double dx = static_cast<double>(p.x) - center.x;
          const double dy = static_cast<double>(p.y) - center.y;
          const double dz = static_cast<double>(p.z) - center.z;
          if (dx * dx + dy * dy + dz * dz <= r2) hits.push_back(idx);
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

DbscanResult dbscan(const PointCloud& cloud, const DbscanParams& params) {
  if (!(params.eps > 0.0)) throw_argument("dbscan: eps must be > 0");
  if (params.min_pts < 1) throw_argument("dbscan: min_pts must be >= 1");

  const size_t n = cloud.size();
  DbscanResult result;
  result.labels.assign(n, -1);

  // Grid cell size equal to eps keeps every query inside a 3x3x3
  // neighborhood.
  const SpatialIndex index(cloud, params.eps);
  const auto min_pts = static_cast<size_t>(params.min_pts);

  constexpr int32_t kUnvisited = -2;
  std::vector<int32_t> label(n, kUnvisited);
  int32_t next_id = 0;

  std::deque<uint32_t> frontier;
  for (uint32_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    const auto neighbors = index.radius_query(cloud.points[p], params.eps);
    if (neighbors.size() < min_pts) {
      label[p] = -1;  // provisional noise; may become a border point later
      continue;
    }
    const int32_t cid = next_id++;
    label[p] = cid;
    frontier.assign(neighbors.begin(), neighbors.end());
    while (!frontier.empty()) {
      const uint32_t q = frontier.front();
      frontier.pop_front();
      if (label[q] == -1) label[q] = cid;  // border point, not expanded
      if (label[q] != kUnvisited) continue;
      label[q] = cid;
      const auto qn = index.radius_query(cloud.points[q], params.eps);
      if (qn.size() >= min_pts) {
        frontier.insert(frontier.end(), qn.begin(), qn.end());
      }
    }
  }

  std::vector<std::vector<uint32_t>> members(static_cast<size_t>(next_id));
  for (uint32_t i = 0; i < n; ++i) {
    result.labels[i] = label[i];
    if (label[i] < 0) {
      result.noise.push_back(i);
    } else {
      members[static_cast<size_t>(label[i])].push_back(i);
    }
  }
  result.clusters.reserve(members.size());
  for (int32_t cid = 0; cid < next_id; ++cid) {
    Cluster c = summarize_cluster(cloud, members[static_cast<size_t>(cid)]);
    c.id = cid;
    result.clusters.push_back(std::move(c));
  }
  return result;
}

Cluster summarize_cluster(const PointCloud& cloud,
                          const std::vector<uint32_t>& indices) {
  if (indices.empty()) throw_argument("summarize_cluster: empty index set");

  Cluster c;
  c.point_indices = indices;
  const Point3& first = cloud.points.at(indices.front());
  c.extent.min_x = c.extent.max_x = first.x;
  c.extent.min_y = c.extent.max_y = first.y;
  c.extent.min_z = c.extent.max_z = first.z;
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (uint32_t idx : indices) {
    const Point3& p = cloud.points.at(idx);
    c.extent.min_x = std::min<double>(c.extent.min_x, p.x);
    c.extent.max_x = std::max<double>(c.extent.max_x, p.x);
    c.extent.min_y = std::min<double>(c.extent.min_y, p.y);
    c.extent.max_y = std::max<double>(c.extent.max_y, p.y);
    c.extent.min_z = std::min<double>(c.extent.min_z, p.z);
    c.extent.max_z = std::max<double>(c.extent.max_z, p.z);
    sx += p.x;
    sy += p.y;
    sz += p.z;
  }
  const auto n = static_cast<double>(indices.size());
  c.centroid_x = sx / n;
  c.centroid_y = sy / n;
  c.centroid_z = sz / n;
  return c;
}

}  // namespace lrp
