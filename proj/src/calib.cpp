#include "calib.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "error.hpp"

namespace lrp {

CalibrationSet::CalibrationSet(const Eigen::Matrix<double, 3, 4>& p,
                               const Eigen::Matrix3d& r_rect,
                               const Eigen::Matrix<double, 3, 4>& t_velo_to_cam,
                               int image_width, int image_height)
    : p_(p),
      r_rect_(r_rect),
      velo_to_cam_(t_velo_to_cam),
      image_width_(image_width),
      image_height_(image_height) {
  if (p_(0, 0) <= 0.0 || p_(1, 1) <= 0.0) {
    throw_data("projection matrix has non-positive focal length");
  }
  const double dev = (r_rect_ * r_rect_.transpose() - Eigen::Matrix3d::Identity())
                         .cwiseAbs()
                         .maxCoeff();
  rect_orthonormal_ = dev <= 1e-3;
  if (!rect_orthonormal_) {
    std::cerr << "warning: R0_rect deviates from orthonormal by " << dev << "\n";
  }
}

void CalibrationSet::set_image_size(int w, int h) {
  if (w <= 0 || h <= 0) throw_argument("image size must be positive");
  image_width_ = w;
  image_height_ = h;
}

Eigen::Vector3d CalibrationSet::to_camera(const Point3& p) const {
  const Eigen::Vector4d x(p.x, p.y, p.z, 1.0);
  return r_rect_ * (velo_to_cam_ * x);
}

std::optional<PixelPoint> CalibrationSet::project(const Point3& p) const {
  const Eigen::Vector3d cam = to_camera(p);
  // Depth exactly 0 is treated as behind: rejects without epsilon tuning.
  if (cam.z() <= 0.0) return std::nullopt;
  const Eigen::Vector3d img = p_ * cam.homogeneous();
  return PixelPoint{img.x() / img.z(), img.y() / img.z(), cam.z()};
}

namespace {

std::vector<double> parse_values(const std::string& rest, const std::string& key,
                                 size_t expected, const std::string& file) {
  std::istringstream iss(rest);
  std::vector<double> vals;
  double v;
  while (iss >> v) vals.push_back(v);
  if (vals.size() != expected) {
    throw_format(file + ": key " + key + " has " + std::to_string(vals.size()) +
                 " values, expected " + std::to_string(expected));
  }
  return vals;
}

}  // namespace

CalibrationSet parse_calib(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open calibration file: " + path.string());

  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    const size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    entries[key] = line.substr(colon + 1);
  }

  auto require = [&](const char* key, size_t n) {
    auto it = entries.find(key);
    if (it == entries.end()) {
      throw_format(path.string() + ": missing key " + key);
    }
    return parse_values(it->second, key, n, path.string());
  };

  const auto p2 = require("P2", 12);
  const auto r0 = require("R0_rect", 9);
  const auto tr = require("Tr_velo_to_cam", 12);

  Eigen::Matrix<double, 3, 4> p;
  Eigen::Matrix3d r;
  Eigen::Matrix<double, 3, 4> t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) p(i, j) = p2[i * 4 + j];
    for (int j = 0; j < 3; ++j) r(i, j) = r0[i * 3 + j];
    for (int j = 0; j < 4; ++j) t(i, j) = tr[i * 4 + j];
  }
  return CalibrationSet(p, r, t, kDefaultImageWidth, kDefaultImageHeight);
}

void write_calib(const CalibrationSet& calib, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  char buf[32];
  auto emit = [&](const char* key, const double* vals, int n) {
    out << key << ":";
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), " %.12e", vals[i]);
      out << buf;
    }
    out << "\n";
  };
  // Eigen stores column-major; serialize row-major to match the file layout.
  Eigen::Matrix<double, 3, 4, Eigen::RowMajor> p = calib.p();
  Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = calib.r_rect();
  Eigen::Matrix<double, 3, 4, Eigen::RowMajor> t = calib.t_velo_to_cam();
  emit("P2", p.data(), 12);
  emit("R0_rect", r.data(), 9);
  emit("Tr_velo_to_cam", t.data(), 12);
  if (!out) throw_io("write failed on " + path.string());
}

std::optional<BBox2D> project_cluster_bbox(const std::vector<Point3>& points,
                                           const CalibrationSet& calib) {
  if (points.empty()) throw_argument("project_cluster_bbox: empty point list");

  BBox2D box;
  box.left = box.top = std::numeric_limits<double>::infinity();
  box.right = box.bottom = -std::numeric_limits<double>::infinity();
  size_t in_front = 0;
  for (const Point3& p : points) {
    const auto px = calib.project(p);
    if (!px) continue;
    ++in_front;
    box.left = std::min(box.left, px->u);
    box.right = std::max(box.right, px->u);
    box.top = std::min(box.top, px->v);
    box.bottom = std::max(box.bottom, px->v);
  }
  if (in_front < 2) return std::nullopt;
  if (!box.overlaps_image(calib.image_width(), calib.image_height())) {
    return std::nullopt;
  }
  return box;
}

}  // namespace lrp
