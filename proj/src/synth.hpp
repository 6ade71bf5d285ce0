#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "calib.hpp"
#include "geometry.hpp"
#include "point_cloud.hpp"

namespace lrp {

// Vertical jitter envelope of synthesized ground points, meters. Fixed so
// ground-extraction tests have a known noise bound.
inline constexpr double kSynthGroundJitter = 0.02;

struct PedestrianSpec {
  double cx = 0.0;  // center x, meters
  double cy = 0.0;  // center y, meters
  double dx = 0.6;  // extent along x, meters
  double dy = 0.6;
  double dz = 1.7;
  int points = 400;
};

// Randomized pedestrian placement used by multi-frame synthesis: counts,
// extents and point budgets drawn per frame, centers rejection-sampled to
// respect the minimum separation and the forward field of view.
struct RandomPedestrians {
  int count_min = 2, count_max = 5;
  double dx_min = 0.4, dx_max = 0.8;
  double dy_min = 0.4, dy_max = 0.8;
  double dz_min = 1.5, dz_max = 1.9;
  int points_min = 300, points_max = 500;
  double region_x_min = 8.0, region_x_max = 30.0;
  double fov = 0.45;  // |cy| <= fov * cx keeps objects in front of the camera
  double min_separation = 2.0;
};

struct SceneSpec {
  std::array<double, 6> ground_coeffs{};  // z = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
  int ground_points = 8000;
  double ground_x_min = 2.0, ground_x_max = 42.0;
  double ground_y_min = -15.0, ground_y_max = 15.0;
  std::vector<PedestrianSpec> pedestrians;
  std::optional<RandomPedestrians> random_pedestrians;
  int clutter_points = 0;
  std::array<double, 6> clutter_region{2.0, 42.0, -15.0, 15.0, -1.0, 2.0};
  uint64_t seed = 1;

  void validate() const;
  double ground_z(double x, double y) const;
};

// `key = value` grammar shared with the pipeline config; `pedestrian`
// lines are repeatable. See the repo docs for the full key list.
SceneSpec parse_scene_spec(const std::filesystem::path& path);
SceneSpec parse_scene_spec_text(const std::string& text, const std::string& origin);

struct SceneObject {
  double cx = 0.0, cy = 0.0;
  double base_z = 0.0;  // ground surface height at the center
  Extent3 box;
};

struct SynthResult {
  PointCloud cloud;
  std::vector<SceneObject> truths;
};

// Deterministic scene synthesis: ground points lie on the polynomial
// surface plus vertical jitter within +/- kSynthGroundJitter, pedestrian
// points are uniform inside their extent boxes (standing on the surface),
// clutter is uniform in its region. Equal (spec, stream_seed) gives a
// bitwise-identical cloud; stream_seed defaults to spec.seed.
SynthResult synth_scene(const SceneSpec& spec,
                        std::optional<uint64_t> stream_seed = std::nullopt);

// Calibration used for synthesized datasets (KITTI-like camera-2 chain).
CalibrationSet synth_calib(int image_width, int image_height);

// Writes `frames` synthesized frames in KITTI layout under out_dir:
// velodyne/FFFFFF.bin, calib/FFFFFF.txt, label_2/FFFFFF.txt. Frame f uses
// stream seed mix(spec.seed, f). Labels are the projections of the
// ground-truth boxes, clipped to the image.
void synth_dataset(const SceneSpec& spec, const std::filesystem::path& out_dir,
                   int frames, int image_width, int image_height);

std::string frame_name(int index);

}  // namespace lrp
