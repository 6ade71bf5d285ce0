#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "calib.hpp"
#include "clustering.hpp"
#include "geometry.hpp"
#include "preprocess.hpp"

namespace lrp {

// Per-axis plausibility ranges, meters. A cluster is valid iff every extent
// lies within its configured [min, max] range (inclusive bounds). z is
// vertical in the sensor frame.
struct ValidationParams {
  double dx_min = 0.1, dx_max = 1.2;
  double dy_min = 0.1, dy_max = 1.2;
  double dz_min = 0.4, dz_max = 2.2;
};

bool validate_cluster(const Cluster& cluster, const ValidationParams& params);

// Candidate image rectangle with provenance.
struct Proposal {
  BBox2D bbox;
  long source = -1;  // cluster id or window id
  std::optional<Extent3> cluster_extent;
  std::optional<double> score;
};

// Extends bbox.bottom down to the image row of the ground surface under the
// cluster footprint centroid (clamped to image height). Never shrinks the
// box upward; returns bbox unchanged when the ground point is behind the
// camera or its row is above the current bottom.
BBox2D adjust_ground_line(const BBox2D& bbox, const Cluster& cluster,
                          const GroundModel& ground, const CalibrationSet& calib);

// Sets width to ratio * height, re-centered on the original horizontal
// center; height is preserved. Clamps to image bounds by shifting, shrinking
// symmetrically only when the target width exceeds the image width.
BBox2D fix_aspect_ratio(const BBox2D& bbox, double ratio, int image_width,
                        int image_height);

struct PipelineParams {
  DownsampleParams downsample;
  GroundParams ground;
  DbscanParams dbscan;
  ValidationParams validation;
  double aspect_ratio = 0.41;  // width / height
};

struct StageTimings {
  double downsample_ms = 0.0;
  double ground_ms = 0.0;
  double cluster_ms = 0.0;
  double project_ms = 0.0;
  double total_ms = 0.0;
};

// Full cluster-proposal pipeline: downsample -> ground removal -> dbscan ->
// validate -> project -> ground-line adjust -> aspect fix. Emits at most one
// proposal per cluster; deterministic for a fixed seed.
std::vector<Proposal> generate_cluster_proposals(const PointCloud& cloud,
                                                 const CalibrationSet& calib,
                                                 const PipelineParams& params,
                                                 StageTimings* timings = nullptr);

struct SlidingWindowParams {
  std::vector<double> heights{32, 48, 72, 108, 162, 243};  // px, ascending
  double aspect_ratio = 0.41;  // width / height
  double stride_x = 0.25;      // fraction of window width
  double stride_y = 0.25;      // fraction of window height
};

// Exhaustive baseline: for each window height, windows are placed at
// stride * size steps, with the final row/column snapped to the image edge
// so every pixel is covered. Scales larger than the image are skipped.
std::vector<Proposal> generate_sliding_windows(int image_width, int image_height,
                                               const SlidingWindowParams& params);

// One text line per proposal: `frame_id left top right bottom source score`
// (score `-` when absent), plus a structured JSON variant.
void write_proposals_text(const std::vector<Proposal>& proposals,
                          const std::string& frame_id,
                          const std::filesystem::path& path);
void write_proposals_json(const std::vector<Proposal>& proposals,
                          const std::string& frame_id,
                          const std::filesystem::path& path);
std::vector<Proposal> read_proposals(const std::filesystem::path& path,
                                     std::string* frame_id_out = nullptr);

}  // namespace lrp
