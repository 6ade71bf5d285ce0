#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "proposals.hpp"

namespace lrp {

// All pipeline parameters as named `section.key` entries plus dataset
// layout. Parsed from a plain-text config file (`key = value` lines, `#`
// comments); unknown keys are rejected and every value is validated against
// its module's invariants at load.
struct PipelineConfig {
  uint64_t seed = 1;

  PipelineParams pipeline;           // downsample, ground, dbscan, validation, aspect
  SlidingWindowParams sliding;

  double eval_iou_threshold = 0.5;
  std::string eval_class_filter = "Pedestrian";

  std::string velodyne_dir = "velodyne";
  std::string calib_dir = "calib";
  std::string label_dir = "label_2";
  int image_width = 1242;
  int image_height = 375;

  // `key = value` assignment with full validation; the config is left
  // untouched when the value is rejected. Unknown key -> config error.
  void set(const std::string& key, const std::string& value);
  // Assignment without cross-field validation; the file parser applies all
  // lines first and validates once, so key order cannot matter.
  void set_raw(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  static const std::vector<std::string>& known_keys();

  std::string serialize() const;
  void validate() const;
};

PipelineConfig parse_config(const std::filesystem::path& path);
PipelineConfig parse_config_text(const std::string& text, const std::string& origin);
void write_config(const PipelineConfig& config, const std::filesystem::path& path);

}  // namespace lrp
