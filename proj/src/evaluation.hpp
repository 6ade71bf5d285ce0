#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "proposals.hpp"

namespace lrp {

// Intersection area over union area; 0 when disjoint.
double iou(const BBox2D& a, const BBox2D& b);

struct GroundTruthLabel {
  std::string frame_id;
  std::string klass;
  BBox2D bbox;
  double truncation = 0.0;  // fraction in [0, 1]
  int occlusion = 0;        // {0, 1, 2, 3}

  double height_px() const { return bbox.height(); }
};

// Labels for one frame: class-filtered objects plus DontCare regions kept
// separately for match exclusion.
struct LabelSet {
  std::string frame_id;
  std::vector<GroundTruthLabel> labels;
  std::vector<BBox2D> dont_care;
};

// KITTI label layout per line:
// `type truncated occluded alpha left top right bottom h w l x y z ry`.
// Only `class_filter` lines are retained; DontCare regions are parsed into
// their own list.
LabelSet parse_labels(const std::filesystem::path& path,
                      const std::string& class_filter = "Pedestrian");

// KITTI difficulty strata. Constraints relax from easy to hard, so the
// tiers nest as label sets.
struct DifficultyTier {
  std::string name;
  double min_height_px;
  int max_occlusion;
  double max_truncation;

  bool admits(const GroundTruthLabel& label) const {
    return label.height_px() >= min_height_px &&
           label.occlusion <= max_occlusion &&
           label.truncation <= max_truncation;
  }
};

const DifficultyTier& tier_easy();
const DifficultyTier& tier_moderate();
const DifficultyTier& tier_hard();

enum class ProposalOutcome : int8_t { kFalsePositive = 0, kTruePositive = 1, kIgnored = 2 };

struct MatchResult {
  std::vector<int32_t> label_match;  // per label: proposal index or -1
  std::vector<ProposalOutcome> proposal_outcome;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

// Greedy one-to-one matching within a frame. Proposals are processed in
// descending score order (unscored: descending best-IoU order, ties by
// proposal index); each matches the unmatched label of highest IoU when
// that IoU exceeds the threshold (strict), else counts FP unless it
// overlaps a DontCare region above the threshold (then ignored). Multiple
// detections of one object count as false positives.
MatchResult match(const std::vector<Proposal>& proposals, const LabelSet& labels,
                  double iou_threshold);

using FrameProposals = std::map<std::string, std::vector<Proposal>>;
using FrameLabels = std::map<std::string, LabelSet>;

// Coverage-based recall ceiling: a label is covered iff at least one
// proposal exceeds the IoU threshold against it (no one-to-one constraint).
// Returns (missed, recall).
std::pair<int, double> max_recall(const FrameProposals& proposals,
                                  const FrameLabels& labels, double iou_threshold);

// max_recall evaluated per ascending threshold; output is monotonically
// non-increasing in the threshold.
std::vector<std::pair<double, double>> recall_curve(
    const FrameProposals& proposals, const FrameLabels& labels,
    const std::vector<double>& thresholds);

// 11-point interpolated average precision over tier-filtered labels.
// Every proposal must carry a score.
double average_precision(const FrameProposals& proposals, const FrameLabels& labels,
                         const DifficultyTier& tier, double iou_threshold);

struct EvalReport {
  size_t frames = 0;
  size_t total_labels = 0;
  double iou_threshold = 0.5;
  int missed_labels = 0;
  double max_recall = 0.0;
  double region_count_mean = 0.0;
  std::vector<std::pair<double, double>> recall_curve;
  std::optional<double> ap_easy;
  std::optional<double> ap_moderate;
  std::optional<double> ap_hard;
  std::optional<StageTimings> timing;  // present when the pipeline was timed

  std::string to_json() const;
  std::string to_csv() const;        // metric,value rows; timing excluded
  std::string curve_csv() const;     // threshold,recall rows
};

inline const std::vector<double>& default_curve_thresholds() {
  static const std::vector<double> grid = [] {
    std::vector<double> t;
    for (int i = 0; i <= 12; ++i) t.push_back(0.30 + 0.05 * i);
    return t;
  }();
  return grid;
}

// Full evaluation over aligned frames. AP tiers are computed only when
// every proposal carries a score.
EvalReport evaluate(const FrameProposals& proposals, const FrameLabels& labels,
                    double iou_threshold, bool with_ap);

// Score file: text lines `frame_id proposal_index score`. Applies scores to
// the proposal sets in place; every proposal must end up scored.
void apply_score_file(const std::filesystem::path& path, FrameProposals& proposals);

}  // namespace lrp
