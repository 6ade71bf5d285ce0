/* lidarprop — LiDAR-based pedestrian region proposals and evaluation.
 *
 * C interface to the proposal engine: opaque handles, integer status
 * codes, and a thread-local last-error message. All functions returning
 * lrp_status set the last-error message on failure; output parameters are
 * untouched unless LRP_OK is returned. Handles are freed with their
 * matching _free function; passing NULL to a _free function is a no-op.
 *
 * Thread safety: distinct handles may be used from distinct threads
 * concurrently; a single handle must not be mutated concurrently.
 */
#ifndef LIDARPROP_H
#define LIDARPROP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrp_status {
  LRP_OK = 0,
  LRP_ERR_ARG = 1,    /* bad argument, index out of range, missing input */
  LRP_ERR_IO = 2,     /* file missing / unreadable / unwritable */
  LRP_ERR_FORMAT = 3, /* malformed file */
  LRP_ERR_DATA = 4,   /* well-formed file with invalid values */
  LRP_ERR_CONFIG = 5, /* unknown key or invalid parameter value */
} lrp_status;

const char *lrp_version(void);
const char *lrp_status_name(lrp_status status);
/* Message for the most recent failure on this thread; empty string if none. */
const char *lrp_last_error(void);

/* ------------------------------------------------------------------ */
/* Pipeline configuration                                              */

typedef struct lrp_config lrp_config;

lrp_status lrp_config_create(lrp_config **out);              /* defaults */
lrp_status lrp_config_load(const char *path, lrp_config **out);
lrp_status lrp_config_set(lrp_config *config, const char *key, const char *value);
/* Writes the value into buf (NUL-terminated, truncated to buflen). */
lrp_status lrp_config_get(const lrp_config *config, const char *key,
                          char *buf, size_t buflen);
lrp_status lrp_config_save(const lrp_config *config, const char *path);
void lrp_config_free(lrp_config *config);

/* ------------------------------------------------------------------ */
/* Point clouds (KITTI velodyne .bin: float32 x,y,z,intensity records)  */

typedef struct lrp_cloud lrp_cloud;

lrp_status lrp_cloud_load(const char *path, lrp_cloud **out);
lrp_status lrp_cloud_save(const lrp_cloud *cloud, const char *path);
size_t lrp_cloud_size(const lrp_cloud *cloud);
/* xyzi receives x, y, z, intensity of point `index`. */
lrp_status lrp_cloud_point(const lrp_cloud *cloud, size_t index, float xyzi[4]);
void lrp_cloud_free(lrp_cloud *cloud);

/* ------------------------------------------------------------------ */
/* Calibration (KITTI calib .txt: P2, R0_rect, Tr_velo_to_cam)          */

typedef struct lrp_calib lrp_calib;

lrp_status lrp_calib_load(const char *path, lrp_calib **out);
lrp_status lrp_calib_set_image_size(lrp_calib *calib, int width, int height);
lrp_status lrp_calib_image_size(const lrp_calib *calib, int *width, int *height);
/* Sensor point -> pixel (u, v) and camera-frame depth; *in_front is 0 when
 * the point is behind the camera (u/v/depth are then unset). */
lrp_status lrp_calib_project(const lrp_calib *calib, float x, float y, float z,
                             double *u, double *v, double *depth, int *in_front);
void lrp_calib_free(lrp_calib *calib);

/* ------------------------------------------------------------------ */
/* Proposals                                                           */

typedef struct lrp_proposals lrp_proposals;

typedef struct lrp_box {
  double left, top, right, bottom; /* pixels, inclusive-exclusive */
  long source;                     /* cluster id or window id */
  double score;                    /* valid iff has_score */
  int has_score;
} lrp_box;

typedef enum lrp_stage {
  LRP_STAGE_DOWNSAMPLE = 0,
  LRP_STAGE_GROUND = 1,
  LRP_STAGE_CLUSTER = 2,
  LRP_STAGE_PROJECT = 3,
  LRP_STAGE_TOTAL = 4,
} lrp_stage;

/* Full cluster pipeline on one frame: downsample, ground removal, DBSCAN,
 * validation, projection, ground-line and aspect-ratio adjustment. */
lrp_status lrp_propose(const lrp_config *config, const lrp_cloud *cloud,
                       const lrp_calib *calib, lrp_proposals **out);
/* Sliding-window baseline for the configured image size. */
lrp_status lrp_sliding_windows(const lrp_config *config, const char *frame_id,
                               lrp_proposals **out);
size_t lrp_proposals_size(const lrp_proposals *proposals);
lrp_status lrp_proposals_get(const lrp_proposals *proposals, size_t index,
                             lrp_box *out);
lrp_status lrp_proposals_frame_id(const lrp_proposals *proposals, char *buf,
                                  size_t buflen);
/* Per-stage wall time of the generating lrp_propose call, milliseconds;
 * zero for loaded or sliding-window proposal sets. */
lrp_status lrp_proposals_stage_ms(const lrp_proposals *proposals, lrp_stage stage,
                                  double *out);
/* Text format: `frame_id left top right bottom source score` per line. */
lrp_status lrp_proposals_save(const lrp_proposals *proposals, const char *path);
lrp_status lrp_proposals_save_json(const lrp_proposals *proposals, const char *path);
lrp_status lrp_proposals_load(const char *path, lrp_proposals **out);
void lrp_proposals_free(lrp_proposals *proposals);

/* ------------------------------------------------------------------ */
/* Ground-truth labels (KITTI label .txt)                              */

typedef struct lrp_labels lrp_labels;

/* class_filter NULL selects the default ("Pedestrian"). */
lrp_status lrp_labels_load(const char *path, const char *class_filter,
                           lrp_labels **out);
size_t lrp_labels_size(const lrp_labels *labels);
void lrp_labels_free(lrp_labels *labels);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

typedef struct lrp_eval lrp_eval;

lrp_status lrp_eval_create(const lrp_config *config, lrp_eval **out);
/* proposals may be NULL to evaluate a frame with labels but no proposals.
 * Frames must not repeat. */
lrp_status lrp_eval_add_frame(lrp_eval *eval, const char *frame_id,
                              const lrp_proposals *proposals,
                              const lrp_labels *labels);
/* Score file: `frame_id proposal_index score` lines. Every proposal must
 * end up scored; enables the AP metrics. */
lrp_status lrp_eval_set_scores(lrp_eval *eval, const char *scores_path);
/* Computes all metrics over the added frames. */
lrp_status lrp_eval_finish(lrp_eval *eval);
/* Metric names: frames, labels, missed_labels, max_recall,
 * region_count_mean, recall_at_<t> (t from the 0.30..0.90 grid), ap_easy,
 * ap_moderate, ap_hard. */
lrp_status lrp_eval_metric(const lrp_eval *eval, const char *name, double *out);
lrp_status lrp_eval_save_json(const lrp_eval *eval, const char *path);
lrp_status lrp_eval_save_csv(const lrp_eval *eval, const char *path);
lrp_status lrp_eval_save_curve_csv(const lrp_eval *eval, const char *path);
void lrp_eval_free(lrp_eval *eval);

/* ------------------------------------------------------------------ */
/* Synthetic scenes                                                    */

typedef struct lrp_scene lrp_scene;

lrp_status lrp_scene_load(const char *path, lrp_scene **out);
/* Writes velodyne/, calib/ and label_2/ in KITTI layout under out_dir.
 * seed 0 keeps the seed from the scene spec. */
lrp_status lrp_scene_synth_dataset(const lrp_scene *scene, const char *out_dir,
                                   int frames, int image_width, int image_height,
                                   unsigned long long seed);
void lrp_scene_free(lrp_scene *scene);

/* ------------------------------------------------------------------ */
/* Plots                                                               */

/* Renders one SVG with a polyline per input recall-curve CSV. */
lrp_status lrp_plot_recall_curves(const char *const *csv_paths, size_t count,
                                  const char *svg_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIDARPROP_H */
