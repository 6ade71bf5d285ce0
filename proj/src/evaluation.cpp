#include "evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace lrp {

double iou(const BBox2D& a, const BBox2D& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

LabelSet parse_labels(const std::filesystem::path& path,
                      const std::string& class_filter) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open label file: " + path.string());

  LabelSet set;
  set.frame_id = path.stem().string();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string type;
    double trunc, alpha, l, t, r, b;
    int occ;
    if (!(iss >> type >> trunc >> occ >> alpha >> l >> t >> r >> b)) {
      throw_format(path.string() + ":" + std::to_string(line_no) +
                   ": short label line");
    }
    if (type == "DontCare") {
      set.dont_care.push_back(BBox2D{l, t, r, b});
      continue;
    }
    if (type != class_filter) continue;
    GroundTruthLabel label;
    label.frame_id = set.frame_id;
    label.klass = type;
    label.bbox = BBox2D{l, t, r, b};
    label.truncation = trunc;
    label.occlusion = occ;
    if (label.occlusion < 0 || label.occlusion > 3) {
      throw_data(path.string() + ":" + std::to_string(line_no) +
                 ": occlusion level out of range");
    }
    set.labels.push_back(std::move(label));
  }
  return set;
}

const DifficultyTier& tier_easy() {
  static const DifficultyTier t{"easy", 40.0, 0, 0.15};
  return t;
}
const DifficultyTier& tier_moderate() {
  static const DifficultyTier t{"moderate", 25.0, 1, 0.30};
  return t;
}
const DifficultyTier& tier_hard() {
  static const DifficultyTier t{"hard", 25.0, 2, 0.50};
  return t;
}

namespace {

// Processing order: descending score when all proposals are scored,
// otherwise descending best-IoU against any label, ties by proposal index.
std::vector<size_t> match_order(const std::vector<Proposal>& proposals,
                                const LabelSet& labels) {
  std::vector<size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), 0);
  const bool all_scored =
      std::all_of(proposals.begin(), proposals.end(),
                  [](const Proposal& p) { return p.score.has_value(); });
  std::vector<double> key(proposals.size(), 0.0);
  for (size_t i = 0; i < proposals.size(); ++i) {
    if (all_scored) {
      key[i] = *proposals[i].score;
    } else {
      double best = 0.0;
      for (const GroundTruthLabel& gt : labels.labels) {
        best = std::max(best, iou(proposals[i].bbox, gt.bbox));
      }
      key[i] = best;
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return key[a] > key[b]; });
  return order;
}

}  // namespace

MatchResult match(const std::vector<Proposal>& proposals, const LabelSet& labels,
                  double iou_threshold) {
  MatchResult result;
  result.label_match.assign(labels.labels.size(), -1);
  result.proposal_outcome.assign(proposals.size(), ProposalOutcome::kFalsePositive);

  std::vector<char> label_taken(labels.labels.size(), 0);
  for (size_t pi : match_order(proposals, labels)) {
    const Proposal& p = proposals[pi];
    int best_label = -1;
    double best_iou = 0.0;
    for (size_t li = 0; li < labels.labels.size(); ++li) {
      if (label_taken[li]) continue;
      const double v = iou(p.bbox, labels.labels[li].bbox);
      if (v > best_iou) {
        best_iou = v;
        best_label = static_cast<int>(li);
      }
    }
    if (best_label >= 0 && best_iou > iou_threshold) {
      label_taken[static_cast<size_t>(best_label)] = 1;
      result.label_match[static_cast<size_t>(best_label)] = static_cast<int32_t>(pi);
      result.proposal_outcome[pi] = ProposalOutcome::kTruePositive;
      ++result.tp;
      continue;
    }
    bool ignored = false;
    for (const BBox2D& dc : labels.dont_care) {
      if (iou(p.bbox, dc) > iou_threshold) {
        ignored = true;
        break;
      }
    }
    if (ignored) {
      result.proposal_outcome[pi] = ProposalOutcome::kIgnored;
    } else {
      ++result.fp;
    }
  }
  result.fn = static_cast<int>(labels.labels.size()) - result.tp;
  return result;
}

std::pair<int, double> max_recall(const FrameProposals& proposals,
                                  const FrameLabels& labels, double iou_threshold) {
  size_t total = 0;
  size_t covered = 0;
  static const std::vector<Proposal> kNone;
  for (const auto& [frame_id, label_set] : labels) {
    auto it = proposals.find(frame_id);
    const std::vector<Proposal>& frame_props =
        it == proposals.end() ? kNone : it->second;
    for (const GroundTruthLabel& gt : label_set.labels) {
      ++total;
      for (const Proposal& p : frame_props) {
        if (iou(p.bbox, gt.bbox) > iou_threshold) {
          ++covered;
          break;
        }
      }
    }
  }
  const int missed = static_cast<int>(total - covered);
  const double recall =
      total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
  return {missed, recall};
}

std::vector<std::pair<double, double>> recall_curve(
    const FrameProposals& proposals, const FrameLabels& labels,
    const std::vector<double>& thresholds) {
  for (size_t i = 0; i + 1 < thresholds.size(); ++i) {
    if (thresholds[i] >= thresholds[i + 1]) {
      throw_argument("recall_curve: thresholds must be ascending");
    }
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    if (!(t > 0.0) || t >= 1.0) {
      throw_argument("recall_curve: thresholds must lie in (0, 1)");
    }
    curve.emplace_back(t, max_recall(proposals, labels, t).second);
  }
  return curve;
}

double average_precision(const FrameProposals& proposals, const FrameLabels& labels,
                         const DifficultyTier& tier, double iou_threshold) {
  // Global score ordering; matching only interacts within a frame, so
  // per-frame greedy state is kept while walking the global order.
  struct Entry {
    double score;
    std::string frame_id;
    size_t index;
  };
  std::vector<Entry> entries;
  for (const auto& [frame_id, props] : proposals) {
    for (size_t i = 0; i < props.size(); ++i) {
      if (!props[i].score) {
        throw_argument(
            "average_precision: proposal without score in frame " + frame_id +
            "; supply per-proposal scores via the score file interface");
      }
      entries.push_back({*props[i].score, frame_id, i});
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
    return a.index < b.index;
  });

  // Tier-filtered label sets with taken flags.
  std::map<std::string, std::vector<const GroundTruthLabel*>> tier_labels;
  std::map<std::string, std::vector<char>> taken;
  size_t total_labels = 0;
  for (const auto& [frame_id, label_set] : labels) {
    auto& v = tier_labels[frame_id];
    for (const GroundTruthLabel& gt : label_set.labels) {
      if (tier.admits(gt)) v.push_back(&gt);
    }
    taken[frame_id].assign(v.size(), 0);
    total_labels += v.size();
  }
  if (total_labels == 0) return 0.0;

  std::vector<std::pair<double, double>> pr;  // (precision, recall)
  int tp = 0, fp = 0;
  for (const Entry& e : entries) {
    auto lit = tier_labels.find(e.frame_id);
    const Proposal& p = proposals.at(e.frame_id)[e.index];
    int best = -1;
    double best_iou = 0.0;
    if (lit != tier_labels.end()) {
      auto& flags = taken[e.frame_id];
      for (size_t li = 0; li < lit->second.size(); ++li) {
        if (flags[li]) continue;
        const double v = iou(p.bbox, lit->second[li]->bbox);
        if (v > best_iou) {
          best_iou = v;
          best = static_cast<int>(li);
        }
      }
    }
    if (best >= 0 && best_iou > iou_threshold) {
      taken[e.frame_id][static_cast<size_t>(best)] = 1;
      ++tp;
    } else {
      bool ignored = false;
      auto fl = labels.find(e.frame_id);
      if (fl != labels.end()) {
        for (const BBox2D& dc : fl->second.dont_care) {
          if (iou(p.bbox, dc) > iou_threshold) {
            ignored = true;
            break;
          }
        }
      }
      if (ignored) continue;
      ++fp;
    }
    pr.emplace_back(static_cast<double>(tp) / static_cast<double>(tp + fp),
                    static_cast<double>(tp) / static_cast<double>(total_labels));
  }

  // 11-point interpolation: mean over recall levels {0, 0.1, ..., 1.0} of
  // the maximum precision at recall >= level.
  double ap = 0.0;
  for (int level = 0; level <= 10; ++level) {
    const double r = static_cast<double>(level) / 10.0;
    double best_p = 0.0;
    for (const auto& [prec, rec] : pr) {
      if (rec >= r - 1e-12) best_p = std::max(best_p, prec);
    }
    ap += best_p;
  }
  return ap / 11.0;
}

EvalReport evaluate(const FrameProposals& proposals, const FrameLabels& labels,
                    double iou_threshold, bool with_ap) {
  EvalReport report;
  report.frames = labels.size();
  report.iou_threshold = iou_threshold;
  for (const auto& [frame_id, label_set] : labels) {
    report.total_labels += label_set.labels.size();
  }
  size_t proposal_count = 0;
  for (const auto& [frame_id, props] : proposals) proposal_count += props.size();
  report.region_count_mean =
      report.frames == 0
          ? 0.0
          : static_cast<double>(proposal_count) / static_cast<double>(report.frames);

  const auto [missed, recall] = max_recall(proposals, labels, iou_threshold);
  report.missed_labels = missed;
  report.max_recall = recall;
  report.recall_curve = recall_curve(proposals, labels, default_curve_thresholds());

  if (with_ap) {
    report.ap_easy = average_precision(proposals, labels, tier_easy(), iou_threshold);
    report.ap_moderate =
        average_precision(proposals, labels, tier_moderate(), iou_threshold);
    report.ap_hard = average_precision(proposals, labels, tier_hard(), iou_threshold);
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json doc;
  doc["frames"] = frames;
  doc["labels"] = total_labels;
  doc["iou_threshold"] = iou_threshold;
  doc["missed_labels"] = missed_labels;
  doc["max_recall"] = max_recall;
  doc["region_count_mean"] = region_count_mean;
  auto& curve = doc["recall_curve"] = nlohmann::json::array();
  for (const auto& [t, r] : recall_curve) curve.push_back({t, r});
  if (ap_easy) {
    doc["ap"] = {{"easy", *ap_easy}, {"moderate", *ap_moderate}, {"hard", *ap_hard}};
  }
  if (timing) {
    doc["timing_ms"] = {{"downsample", timing->downsample_ms},
                        {"ground", timing->ground_ms},
                        {"cluster", timing->cluster_ms},
                        {"project", timing->project_ms},
                        {"total", timing->total_ms}};
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "metric,value\n";
  out << "frames," << frames << "\n";
  out << "labels," << total_labels << "\n";
  out << "iou_threshold," << format_metric(iou_threshold) << "\n";
  out << "missed_labels," << missed_labels << "\n";
  out << "max_recall," << format_metric(max_recall) << "\n";
  out << "region_count_mean," << format_metric(region_count_mean) << "\n";
  for (const auto& [t, r] : recall_curve) {
    char key[48];
    std::snprintf(key, sizeof(key), "recall_at_%.2f", t);
    out << key << "," << format_metric(r) << "\n";
  }
  if (ap_easy) {
    out << "ap_easy," << format_metric(*ap_easy) << "\n";
    out << "ap_moderate," << format_metric(*ap_moderate) << "\n";
    out << "ap_hard," << format_metric(*ap_hard) << "\n";
  }
  return out.str();
}

std::string EvalReport::curve_csv() const {
  std::ostringstream out;
  out << "threshold,recall\n";
  for (const auto& [t, r] : recall_curve) {
    char line[64];
    std::snprintf(line, sizeof(line), "%.2f,%.6f\n", t, r);
    out << line;
  }
  return out.str();
}

void apply_score_file(const std::filesystem::path& path, FrameProposals& proposals) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open score file: " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string frame_id;
    size_t index;
    double score;
    if (!(iss >> frame_id >> index >> score)) {
      throw_format(path.string() + ":" + std::to_string(line_no) +
                   ": expected `frame_id proposal_index score`");
    }
    auto it = proposals.find(frame_id);
    if (it == proposals.end()) {
      throw_data(path.string() + ":" + std::to_string(line_no) +
                 ": unknown frame id " + frame_id);
    }
    if (index >= it->second.size()) {
      throw_data(path.string() + ":" + std::to_string(line_no) +
                 ": proposal index " + std::to_string(index) +
                 " out of range for frame " + frame_id);
    }
    it->second[index].score = score;
  }
  for (const auto& [frame_id, props] : proposals) {
    for (size_t i = 0; i < props.size(); ++i) {
      if (!props[i].score) {
        throw_argument("score file " + path.string() + " leaves proposal " +
                       std::to_string(i) + " of frame " + frame_id + " unscored");
      }
    }
  }
}

}  // namespace lrp
