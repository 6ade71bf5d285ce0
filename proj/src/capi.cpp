#include "lidarprop.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "calib.hpp"
#include "cloud_io.hpp"
#include "config.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "plot.hpp"
#include "proposals.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace {

thread_local std::string g_last_error;

lrp_status status_of(const lrp::Error& e) {
  switch (e.kind()) {
    case lrp::ErrorKind::kArgument: return LRP_ERR_ARG;
    case lrp::ErrorKind::kIo: return LRP_ERR_IO;
    case lrp::ErrorKind::kFormat: return LRP_ERR_FORMAT;
    case lrp::ErrorKind::kData: return LRP_ERR_DATA;
    case lrp::ErrorKind::kConfig: return LRP_ERR_CONFIG;
  }
  return LRP_ERR_ARG;
}

// Runs fn, translating exceptions into status codes + last-error text.
template <typename Fn>
lrp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LRP_OK;
  } catch (const lrp::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LRP_ERR_ARG;
  }
}

lrp_status require(bool ok, const char* message) {
  if (ok) return LRP_OK;
  g_last_error = message;
  return LRP_ERR_ARG;
}

lrp_status copy_string(const std::string& value, char* buf, size_t buflen) {
  if (!buf || buflen == 0) return require(false, "output buffer is null/empty");
  const size_t n = std::min(value.size(), buflen - 1);
  std::memcpy(buf, value.data(), n);
  buf[n] = '\0';
  return LRP_OK;
}

}  // namespace

struct lrp_config {
  lrp::PipelineConfig impl;
};

struct lrp_cloud {
  lrp::PointCloud impl;
};

struct lrp_calib {
  lrp::CalibrationSet impl;
};

struct lrp_proposals {
  std::string frame_id;
  std::vector<lrp::Proposal> impl;
  lrp::StageTimings timings;
};

struct lrp_labels {
  lrp::LabelSet impl;
};

struct lrp_eval {
  lrp::FrameProposals proposals;
  lrp::FrameLabels labels;
  double iou_threshold = 0.5;
  bool with_ap = false;
  bool finished = false;
  lrp::EvalReport report;
};

struct lrp_scene {
  lrp::SceneSpec impl;
};

extern "C" {

const char* lrp_version(void) { return "1.0.0"; }

const char* lrp_status_name(lrp_status status) {
  switch (status) {
    case LRP_OK: return "ok";
    case LRP_ERR_ARG: return "argument-error";
    case LRP_ERR_IO: return "io-error";
    case LRP_ERR_FORMAT: return "format-error";
    case LRP_ERR_DATA: return "data-error";
    case LRP_ERR_CONFIG: return "config-error";
  }
  return "unknown";
}

const char* lrp_last_error(void) { return g_last_error.c_str(); }

/* ---- config ---- */

lrp_status lrp_config_create(lrp_config** out) {
  if (lrp_status s = require(out != nullptr, "out is null")) return s;
  return guarded([&] { *out = new lrp_config(); });
}

lrp_status lrp_config_load(const char* path, lrp_config** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] { *out = new lrp_config{lrp::parse_config(path)}; });
}

lrp_status lrp_config_set(lrp_config* config, const char* key, const char* value) {
  if (lrp_status s = require(config && key && value, "config/key/value is null"))
    return s;
  return guarded([&] { config->impl.set(key, value); });
}

lrp_status lrp_config_get(const lrp_config* config, const char* key, char* buf,
                          size_t buflen) {
  if (lrp_status s = require(config && key, "config/key is null")) return s;
  std::string value;
  if (lrp_status s = guarded([&] { value = config->impl.get(key); })) return s;
  return copy_string(value, buf, buflen);
}

lrp_status lrp_config_save(const lrp_config* config, const char* path) {
  if (lrp_status s = require(config && path, "config/path is null")) return s;
  return guarded([&] { lrp::write_config(config->impl, path); });
}

void lrp_config_free(lrp_config* config) { delete config; }

/* ---- cloud ---- */

lrp_status lrp_cloud_load(const char* path, lrp_cloud** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] { *out = new lrp_cloud{lrp::read_kitti_bin(path)}; });
}

lrp_status lrp_cloud_save(const lrp_cloud* cloud, const char* path) {
  if (lrp_status s = require(cloud && path, "cloud/path is null")) return s;
  return guarded([&] { lrp::write_kitti_bin(cloud->impl, path); });
}

size_t lrp_cloud_size(const lrp_cloud* cloud) {
  return cloud ? cloud->impl.size() : 0;
}

lrp_status lrp_cloud_point(const lrp_cloud* cloud, size_t index, float xyzi[4]) {
  if (lrp_status s = require(cloud && xyzi, "cloud/xyzi is null")) return s;
  if (lrp_status s = require(index < cloud->impl.size(), "point index out of range"))
    return s;
  const lrp::Point3& p = cloud->impl.points[index];
  xyzi[0] = p.x;
  xyzi[1] = p.y;
  xyzi[2] = p.z;
  xyzi[3] = p.intensity;
  return LRP_OK;
}

void lrp_cloud_free(lrp_cloud* cloud) { delete cloud; }

/* ---- calib ---- */

lrp_status lrp_calib_load(const char* path, lrp_calib** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] { *out = new lrp_calib{lrp::parse_calib(path)}; });
}

lrp_status lrp_calib_set_image_size(lrp_calib* calib, int width, int height) {
  if (lrp_status s = require(calib != nullptr, "calib is null")) return s;
  return guarded([&] { calib->impl.set_image_size(width, height); });
}

lrp_status lrp_calib_image_size(const lrp_calib* calib, int* width, int* height) {
  if (lrp_status s = require(calib && width && height, "calib/out is null")) return s;
  *width = calib->impl.image_width();
  *height = calib->impl.image_height();
  return LRP_OK;
}

lrp_status lrp_calib_project(const lrp_calib* calib, float x, float y, float z,
                             double* u, double* v, double* depth, int* in_front) {
  if (lrp_status s = require(calib && u && v && depth && in_front,
                             "calib/out is null"))
    return s;
  const auto px = calib->impl.project(lrp::Point3{x, y, z, 0.0f});
  *in_front = px.has_value() ? 1 : 0;
  if (px) {
    *u = px->u;
    *v = px->v;
    *depth = px->depth;
  }
  return LRP_OK;
}

void lrp_calib_free(lrp_calib* calib) { delete calib; }

/* ---- proposals ---- */

lrp_status lrp_propose(const lrp_config* config, const lrp_cloud* cloud,
                       const lrp_calib* calib, lrp_proposals** out) {
  if (lrp_status s = require(config && cloud && calib && out,
                             "config/cloud/calib/out is null"))
    return s;
  return guarded([&] {
    auto result = std::make_unique<lrp_proposals>();
    result->frame_id = cloud->impl.frame_id;
    result->impl = lrp::generate_cluster_proposals(
        cloud->impl, calib->impl, config->impl.pipeline, &result->timings);
    *out = result.release();
  });
}

lrp_status lrp_sliding_windows(const lrp_config* config, const char* frame_id,
                               lrp_proposals** out) {
  if (lrp_status s = require(config && frame_id && out, "config/frame_id/out is null"))
    return s;
  return guarded([&] {
    auto result = std::make_unique<lrp_proposals>();
    result->frame_id = frame_id;
    result->impl = lrp::generate_sliding_windows(
        config->impl.image_width, config->impl.image_height, config->impl.sliding);
    *out = result.release();
  });
}

size_t lrp_proposals_size(const lrp_proposals* proposals) {
  return proposals ? proposals->impl.size() : 0;
}

lrp_status lrp_proposals_get(const lrp_proposals* proposals, size_t index,
                             lrp_box* out) {
  if (lrp_status s = require(proposals && out, "proposals/out is null")) return s;
  if (lrp_status s = require(index < proposals->impl.size(),
                             "proposal index out of range"))
    return s;
  const lrp::Proposal& p = proposals->impl[index];
  out->left = p.bbox.left;
  out->top = p.bbox.top;
  out->right = p.bbox.right;
  out->bottom = p.bbox.bottom;
  out->source = p.source;
  out->has_score = p.score.has_value() ? 1 : 0;
  out->score = p.score.value_or(0.0);
  return LRP_OK;
}

lrp_status lrp_proposals_frame_id(const lrp_proposals* proposals, char* buf,
                                  size_t buflen) {
  if (lrp_status s = require(proposals != nullptr, "proposals is null")) return s;
  return copy_string(proposals->frame_id, buf, buflen);
}

lrp_status lrp_proposals_stage_ms(const lrp_proposals* proposals, lrp_stage stage,
                                  double* out) {
  if (lrp_status s = require(proposals && out, "proposals/out is null")) return s;
  switch (stage) {
    case LRP_STAGE_DOWNSAMPLE: *out = proposals->timings.downsample_ms; return LRP_OK;
    case LRP_STAGE_GROUND: *out = proposals->timings.ground_ms; return LRP_OK;
    case LRP_STAGE_CLUSTER: *out = proposals->timings.cluster_ms; return LRP_OK;
    case LRP_STAGE_PROJECT: *out = proposals->timings.project_ms; return LRP_OK;
    case LRP_STAGE_TOTAL: *out = proposals->timings.total_ms; return LRP_OK;
  }
  return require(false, "unknown stage");
}

lrp_status lrp_proposals_save(const lrp_proposals* proposals, const char* path) {
  if (lrp_status s = require(proposals && path, "proposals/path is null")) return s;
  return guarded(
      [&] { lrp::write_proposals_text(proposals->impl, proposals->frame_id, path); });
}

lrp_status lrp_proposals_save_json(const lrp_proposals* proposals, const char* path) {
  if (lrp_status s = require(proposals && path, "proposals/path is null")) return s;
  return guarded(
      [&] { lrp::write_proposals_json(proposals->impl, proposals->frame_id, path); });
}

lrp_status lrp_proposals_load(const char* path, lrp_proposals** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] {
    auto result = std::make_unique<lrp_proposals>();
    result->impl = lrp::read_proposals(path, &result->frame_id);
    *out = result.release();
  });
}

void lrp_proposals_free(lrp_proposals* proposals) { delete proposals; }

/* ---- labels ---- */

lrp_status lrp_labels_load(const char* path, const char* class_filter,
                           lrp_labels** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] {
    *out = new lrp_labels{
        lrp::parse_labels(path, class_filter ? class_filter : "Pedestrian")};
  });
}

size_t lrp_labels_size(const lrp_labels* labels) {
  return labels ? labels->impl.labels.size() : 0;
}

void lrp_labels_free(lrp_labels* labels) { delete labels; }

/* ---- eval ---- */

lrp_status lrp_eval_create(const lrp_config* config, lrp_eval** out) {
  if (lrp_status s = require(config && out, "config/out is null")) return s;
  return guarded([&] {
    auto eval = std::make_unique<lrp_eval>();
    eval->iou_threshold = config->impl.eval_iou_threshold;
    *out = eval.release();
  });
}

lrp_status lrp_eval_add_frame(lrp_eval* eval, const char* frame_id,
                              const lrp_proposals* proposals,
                              const lrp_labels* labels) {
  if (lrp_status s = require(eval && frame_id && labels, "eval/frame_id/labels is null"))
    return s;
  if (lrp_status s = require(!eval->finished, "eval already finished")) return s;
  if (lrp_status s = require(!eval->labels.contains(frame_id),
                             "frame added twice to evaluation"))
    return s;
  return guarded([&] {
    eval->labels[frame_id] = labels->impl;
    eval->labels[frame_id].frame_id = frame_id;
    eval->proposals[frame_id] =
        proposals ? proposals->impl : std::vector<lrp::Proposal>{};
  });
}

lrp_status lrp_eval_set_scores(lrp_eval* eval, const char* scores_path) {
  if (lrp_status s = require(eval && scores_path, "eval/path is null")) return s;
  if (lrp_status s = require(!eval->finished, "eval already finished")) return s;
  return guarded([&] {
    lrp::apply_score_file(scores_path, eval->proposals);
    eval->with_ap = true;
  });
}

lrp_status lrp_eval_finish(lrp_eval* eval) {
  if (lrp_status s = require(eval != nullptr, "eval is null")) return s;
  return guarded([&] {
    eval->report = lrp::evaluate(eval->proposals, eval->labels, eval->iou_threshold,
                                 eval->with_ap);
    eval->finished = true;
  });
}

lrp_status lrp_eval_metric(const lrp_eval* eval, const char* name, double* out) {
  if (lrp_status s = require(eval && name && out, "eval/name/out is null")) return s;
  if (lrp_status s = require(eval->finished, "lrp_eval_finish has not run")) return s;
  const lrp::EvalReport& r = eval->report;
  const std::string key = name;
  if (key == "frames") { *out = static_cast<double>(r.frames); return LRP_OK; }
  if (key == "labels") { *out = static_cast<double>(r.total_labels); return LRP_OK; }
  if (key == "missed_labels") { *out = r.missed_labels; return LRP_OK; }
  if (key == "max_recall") { *out = r.max_recall; return LRP_OK; }
  if (key == "region_count_mean") { *out = r.region_count_mean; return LRP_OK; }
  if (key == "ap_easy" && r.ap_easy) { *out = *r.ap_easy; return LRP_OK; }
  if (key == "ap_moderate" && r.ap_moderate) { *out = *r.ap_moderate; return LRP_OK; }
  if (key == "ap_hard" && r.ap_hard) { *out = *r.ap_hard; return LRP_OK; }
  if (key.rfind("recall_at_", 0) == 0) {
    const double t = std::strtod(key.c_str() + 10, nullptr);
    for (const auto& [thr, rec] : r.recall_curve) {
      if (std::abs(thr - t) < 1e-9) {
        *out = rec;
        return LRP_OK;
      }
    }
  }
  return require(false, "unknown or unavailable metric");
}

lrp_status lrp_eval_save_json(const lrp_eval* eval, const char* path) {
  if (lrp_status s = require(eval && path, "eval/path is null")) return s;
  if (lrp_status s = require(eval->finished, "lrp_eval_finish has not run")) return s;
  return guarded([&] {
    std::ofstream out(path, std::ios::trunc);
    if (!out) lrp::throw_io(std::string("cannot open output file: ") + path);
    out << eval->report.to_json();
  });
}

lrp_status lrp_eval_save_csv(const lrp_eval* eval, const char* path) {
  if (lrp_status s = require(eval && path, "eval/path is null")) return s;
  if (lrp_status s = require(eval->finished, "lrp_eval_finish has not run")) return s;
  return guarded([&] {
    std::ofstream out(path, std::ios::trunc);
    if (!out) lrp::throw_io(std::string("cannot open output file: ") + path);
    out << eval->report.to_csv();
  });
}

lrp_status lrp_eval_save_curve_csv(const lrp_eval* eval, const char* path) {
  if (lrp_status s = require(eval && path, "eval/path is null")) return s;
  if (lrp_status s = require(eval->finished, "lrp_eval_finish has not run")) return s;
  return guarded([&] {
    std::ofstream out(path, std::ios::trunc);
    if (!out) lrp::throw_io(std::string("cannot open output file: ") + path);
    out << eval->report.curve_csv();
  });
}

void lrp_eval_free(lrp_eval* eval) { delete eval; }

/* ---- scenes ---- */

lrp_status lrp_scene_load(const char* path, lrp_scene** out) {
  if (lrp_status s = require(path && out, "path/out is null")) return s;
  return guarded([&] { *out = new lrp_scene{lrp::parse_scene_spec(path)}; });
}

lrp_status lrp_scene_synth_dataset(const lrp_scene* scene, const char* out_dir,
                                   int frames, int image_width, int image_height,
                                   unsigned long long seed) {
  if (lrp_status s = require(scene && out_dir, "scene/out_dir is null")) return s;
  return guarded([&] {
    lrp::SceneSpec spec = scene->impl;
    if (seed != 0) spec.seed = seed;
    lrp::synth_dataset(spec, out_dir, frames, image_width, image_height);
  });
}

void lrp_scene_free(lrp_scene* scene) { delete scene; }

/* ---- plots ---- */

lrp_status lrp_plot_recall_curves(const char* const* csv_paths, size_t count,
                                  const char* svg_path) {
  if (lrp_status s = require(csv_paths && svg_path && count > 0,
                             "csv_paths/svg_path is null or count is zero"))
    return s;
  return guarded([&] {
    std::vector<lrp::RecallCurve> curves;
    curves.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!csv_paths[i]) lrp::throw_argument("csv path " + std::to_string(i) + " is null");
      curves.push_back(lrp::read_curve_csv(csv_paths[i]));
    }
    lrp::write_recall_svg(curves, svg_path);
  });
}

}  // extern "C"
