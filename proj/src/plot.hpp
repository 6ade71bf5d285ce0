#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lrp {

struct RecallCurve {
  std::string name;  // legend entry
  std::vector<std::pair<double, double>> points;  // (iou threshold, recall)
};

// `threshold,recall` rows with an optional header line; curve name is the
// file stem.
RecallCurve read_curve_csv(const std::filesystem::path& path);

// Single SVG figure, one polyline per curve, legend from curve names,
// axes fixed to [0.3, 0.9] x [0, 1].
std::string render_recall_svg(const std::vector<RecallCurve>& curves);

void write_recall_svg(const std::vector<RecallCurve>& curves,
                      const std::filesystem::path& path);

}  // namespace lrp
