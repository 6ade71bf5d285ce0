#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "geometry.hpp"
#include "point_cloud.hpp"

namespace lrp {

// Image-plane projection of a sensor point. depth is the camera-frame
// forward distance (positive in front of the camera).
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Rectified-camera calibration parsed from a KITTI calib file. Camera 2
// (left color) is the reference camera. Immutable after parse.
class CalibrationSet {
 public:
  CalibrationSet(const Eigen::Matrix<double, 3, 4>& p,
                 const Eigen::Matrix3d& r_rect,
                 const Eigen::Matrix<double, 3, 4>& t_velo_to_cam,
                 int image_width, int image_height);

  const Eigen::Matrix<double, 3, 4>& p() const { return p_; }
  const Eigen::Matrix3d& r_rect() const { return r_rect_; }
  const Eigen::Matrix<double, 3, 4>& t_velo_to_cam() const { return velo_to_cam_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  bool rect_orthonormal() const { return rect_orthonormal_; }

  void set_image_size(int w, int h);

  // Sensor point -> rectified camera frame (3-vector, z forward).
  Eigen::Vector3d to_camera(const Point3& p) const;

  // Sensor point -> pixel coordinates. nullopt when the camera-frame
  // forward depth is <= 0. Points outside the image bounds still project;
  // bounds filtering is the caller's job.
  std::optional<PixelPoint> project(const Point3& p) const;

 private:
  Eigen::Matrix<double, 3, 4> p_;
  Eigen::Matrix3d r_rect_;
  Eigen::Matrix<double, 3, 4> velo_to_cam_;
  int image_width_;
  int image_height_;
  bool rect_orthonormal_;
};

inline constexpr int kDefaultImageWidth = 1242;
inline constexpr int kDefaultImageHeight = 375;

// KITTI calib text: lines of `KEY: v0 v1 ... vN`, row-major values. Consumed
// keys: P2 (12), R0_rect (9), Tr_velo_to_cam (12). Missing image size
// defaults to 1242x375.
CalibrationSet parse_calib(const std::filesystem::path& path);
void write_calib(const CalibrationSet& calib, const std::filesystem::path& path);

// Axis-aligned min/max over the pixel projections of all points with
// positive depth. nullopt when fewer than 2 points project in front of the
// camera or the raw box has no positive-area overlap with the image.
std::optional<BBox2D> project_cluster_bbox(const std::vector<Point3>& points,
                                           const CalibrationSet& calib);

}  // namespace lrp
