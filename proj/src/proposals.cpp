#include "proposals.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace lrp {

bool validate_cluster(const Cluster& cluster, const ValidationParams& p) {
  const Extent3& e = cluster.extent;
  return e.dx() >= p.dx_min && e.dx() <= p.dx_max &&
         e.dy() >= p.dy_min && e.dy() <= p.dy_max &&
         e.dz() >= p.dz_min && e.dz() <= p.dz_max;
}

BBox2D adjust_ground_line(const BBox2D& bbox, const Cluster& cluster,
                          const GroundModel& ground, const CalibrationSet& calib) {
  const double gx = cluster.centroid_x;
  const double gy = cluster.centroid_y;
  const double gz = ground.eval(gx, gy);
  const auto px = calib.project(Point3{static_cast<float>(gx),
                                       static_cast<float>(gy),
                                       static_cast<float>(gz), 0.0f});
  if (!px) return bbox;
  BBox2D out = bbox;
  const double row = std::min(px->v, static_cast<double>(calib.image_height()));
  if (row > out.bottom) out.bottom = row;
  return out;
}

BBox2D fix_aspect_ratio(const BBox2D& bbox, double ratio, int image_width,
                        int image_height) {
  (void)image_height;  // height is preserved; only width is reshaped
  if (!(ratio > 0.0)) throw_argument("fix_aspect_ratio: ratio must be > 0");
  const double w = static_cast<double>(image_width);
  const double height = bbox.height();
  double width = ratio * height;
  const double center = 0.5 * (bbox.left + bbox.right);

  BBox2D out = bbox;
  if (width > w) {
    // Target wider than the image: shrink symmetrically to fit.
    out.left = 0.0;
    out.right = w;
    return out;
  }
  out.left = center - 0.5 * width;
  out.right = center + 0.5 * width;
  if (out.left < 0.0) {
    out.right -= out.left;
    out.left = 0.0;
  } else if (out.right > w) {
    out.left -= out.right - w;
    out.right = w;
  }
  return out;
}

std::vector<Proposal> generate_cluster_proposals(const PointCloud& cloud,
                                                 const CalibrationSet& calib,
                                                 const PipelineParams& params,
                                                 StageTimings* timings) {
  using clock = std::chrono::steady_clock;
  const auto ms_between = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  const auto t0 = clock::now();
  const PointCloud reduced = downsample(cloud, params.downsample);
  const auto t1 = clock::now();

  const GroundExtraction ground = extract_ground(reduced, params.ground);
  const RemovalResult objects = remove_ground(reduced, ground.ground_indices);
  const auto t2 = clock::now();

  const DbscanResult clup = dbscan(objects.cloud, params.dbscan);
  const auto t3 = clock::now();

  std::vector<Proposal> proposals;
  for (const Cluster& cluster : clup.clusters) {
    if (!validate_cluster(cluster, params.validation)) continue;
    std::vector<Point3> members;
    members.reserve(cluster.point_indices.size());
    for (uint32_t idx : cluster.point_indices) {
      members.push_back(objects.cloud.points[idx]);
    }
    auto raw = project_cluster_bbox(members, calib);
    if (!raw) continue;
    BBox2D box = adjust_ground_line(*raw, cluster, ground.model, calib);
    box = fix_aspect_ratio(box, params.aspect_ratio, calib.image_width(),
                           calib.image_height());
    if (!box.valid() ||
        !box.overlaps_image(calib.image_width(), calib.image_height())) {
      continue;
    }
    Proposal p;
    p.bbox = box;
    p.source = cluster.id;
    p.cluster_extent = cluster.extent;
    proposals.push_back(std::move(p));
  }
  const auto t4 = clock::now();

  if (timings) {
    timings->downsample_ms = ms_between(t0, t1);
    timings->ground_ms = ms_between(t1, t2);
    timings->cluster_ms = ms_between(t2, t3);
    timings->project_ms = ms_between(t3, t4);
    timings->total_ms = ms_between(t0, t4);
  }
  return proposals;
}

namespace {

// Window origins covering [0, extent] at the given step, final position
// snapped to the edge so coverage is complete.
std::vector<double> window_positions(double extent, double size, double step) {
  std::vector<double> out;
  double x = 0.0;
  for (;;) {
    if (x + size > extent) x = extent - size;
    if (!out.empty() && x <= out.back()) break;
    out.push_back(x);
    if (x >= extent - size) break;
    x += step;
  }
  return out;
}

}  // namespace

std::vector<Proposal> generate_sliding_windows(int image_width, int image_height,
                                               const SlidingWindowParams& params) {
  if (!(params.aspect_ratio > 0.0)) {
    throw_argument("sliding windows: aspect_ratio must be > 0");
  }
  if (!(params.stride_x > 0.0) || params.stride_x > 1.0 ||
      !(params.stride_y > 0.0) || params.stride_y > 1.0) {
    throw_argument("sliding windows: strides must be in (0, 1]");
  }
  for (size_t i = 0; i + 1 < params.heights.size(); ++i) {
    if (params.heights[i] >= params.heights[i + 1]) {
      throw_argument("sliding windows: heights must be positive ascending");
    }
  }

  const double w = image_width;
  const double h = image_height;
  std::vector<Proposal> out;
  long window_id = 0;
  for (double height : params.heights) {
    if (!(height > 0.0)) throw_argument("sliding windows: heights must be positive");
    const double width = params.aspect_ratio * height;
    if (width > w || height > h) {
      std::cerr << "warning: sliding-window scale h=" << height
                << " exceeds the image, skipped\n";
      continue;
    }
    const auto ys = window_positions(h, height, params.stride_y * height);
    const auto xs = window_positions(w, width, params.stride_x * width);
    for (double y : ys) {
      for (double x : xs) {
        Proposal p;
        p.bbox = BBox2D{x, y, x + width, y + height};
        p.source = window_id++;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

void write_proposals_text(const std::vector<Proposal>& proposals,
                          const std::string& frame_id,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  char line[256];
  for (const Proposal& p : proposals) {
    std::snprintf(line, sizeof(line), "%s %.2f %.2f %.2f %.2f %ld",
                  frame_id.c_str(), p.bbox.left, p.bbox.top, p.bbox.right,
                  p.bbox.bottom, p.source);
    out << line;
    if (p.score) {
      std::snprintf(line, sizeof(line), " %.6f", *p.score);
      out << line;
    } else {
      out << " -";
    }
    out << "\n";
  }
  if (!out) throw_io("write failed on " + path.string());
}

void write_proposals_json(const std::vector<Proposal>& proposals,
                          const std::string& frame_id,
                          const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["frame_id"] = frame_id;
  auto& arr = doc["proposals"] = nlohmann::json::array();
  for (const Proposal& p : proposals) {
    nlohmann::json j;
    j["left"] = p.bbox.left;
    j["top"] = p.bbox.top;
    j["right"] = p.bbox.right;
    j["bottom"] = p.bbox.bottom;
    j["source"] = p.source;
    if (p.score) {
      j["score"] = *p.score;
    } else {
      j["score"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw_io("write failed on " + path.string());
}

std::vector<Proposal> read_proposals(const std::filesystem::path& path,
                                     std::string* frame_id_out) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open proposal file: " + path.string());

  std::vector<Proposal> out;
  std::string frame_id;

  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
      frame_id = doc.at("frame_id").get<std::string>();
      for (const auto& j : doc.at("proposals")) {
        Proposal p;
        p.bbox = BBox2D{j.at("left").get<double>(), j.at("top").get<double>(),
                        j.at("right").get<double>(), j.at("bottom").get<double>()};
        p.source = j.at("source").get<long>();
        if (j.contains("score") && !j.at("score").is_null()) {
          p.score = j.at("score").get<double>();
        }
        out.push_back(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw_format(path.string() + ": " + e.what());
    }
  } else {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream iss(line);
      Proposal p;
      std::string fid, score_tok;
      if (!(iss >> fid >> p.bbox.left >> p.bbox.top >> p.bbox.right >>
            p.bbox.bottom >> p.source >> score_tok)) {
        throw_format(path.string() + ":" + std::to_string(line_no) +
                     ": malformed proposal line");
      }
      if (score_tok != "-") {
        try {
          p.score = std::stod(score_tok);
        } catch (const std::exception&) {
          throw_format(path.string() + ":" + std::to_string(line_no) +
                       ": bad score value '" + score_tok + "'");
        }
      }
      if (frame_id.empty()) {
        frame_id = fid;
      } else if (frame_id != fid) {
        throw_format(path.string() + ":" + std::to_string(line_no) +
                     ": mixed frame ids in one proposal file");
      }
      out.push_back(std::move(p));
    }
  }
  if (frame_id.empty()) frame_id = path.stem().string();
  if (frame_id_out) *frame_id_out = frame_id;
  return out;
}

}  // namespace lrp
