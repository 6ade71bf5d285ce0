#include "cloud_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"

static_assert(std::endian::native == std::endian::little,
              "KITTI binary I/O assumes a little-endian host");
static_assert(sizeof(float) == 4 && sizeof(lrp::Point3) == 16,
              "Point3 must match the 4x float32 record layout");

namespace lrp {

PointCloud read_kitti_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw_io("cannot open point cloud file: " + path.string());

  const std::streamoff size = in.tellg();
  if (size % 16 != 0) {
    throw_format(path.string() + ": length " + std::to_string(size) +
                 " is not a multiple of 16 bytes (4 float32 per point)");
  }
  in.seekg(0);

  PointCloud cloud;
  cloud.frame_id = path.stem().string();
  const size_t n = static_cast<size_t>(size) / 16;
  cloud.points.resize(n);
  if (n > 0) {
    in.read(reinterpret_cast<char*>(cloud.points.data()),
            static_cast<std::streamsize>(size));
    if (!in) throw_io("short read on " + path.string());
  }

  // Reject rather than drop non-finite points: silently filtering would
  // desynchronize point indices used downstream by clustering.
  for (size_t i = 0; i < n; ++i) {
    const Point3& p = cloud.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      throw_data(path.string() + ": non-finite value at point index " +
                 std::to_string(i));
    }
  }
  return cloud;
}

void write_kitti_bin(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  if (!cloud.points.empty()) {
    out.write(reinterpret_cast<const char*>(cloud.points.data()),
              static_cast<std::streamsize>(cloud.points.size() * 16));
  }
  if (!out) throw_io("write failed on " + path.string());
}

}  // namespace lrp
