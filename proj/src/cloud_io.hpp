#pragma once

#include <filesystem>

#include "point_cloud.hpp"

namespace lrp {

// KITTI velodyne layout: consecutive records of 4 little-endian IEEE-754
// 32-bit floats (x, y, z, intensity), no header. This is the canonical
// on-disk cloud format for both input and output.
PointCloud read_kitti_bin(const std::filesystem::path& path);
void write_kitti_bin(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace lrp
