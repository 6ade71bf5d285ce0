// lidarprop command-line front end. Talks to the engine exclusively through
// the public C API (lidarprop.h); all file formats and pipeline semantics
// live behind it.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lidarprop.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kErrorPrefix = "lidarprop: error: ";

int fail(const std::string& message) {
  std::cerr << kErrorPrefix << message << "\n";
  return 1;
}

// Throws on non-OK status so command bodies can use straight-line code;
// main() turns it into the one-line error + nonzero exit.
struct CliError {
  std::string message;
};

void check(lrp_status status, const std::string& context) {
  if (status == LRP_OK) return;
  throw CliError{context + ": " + lrp_status_name(status) + ": " + lrp_last_error()};
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<void (*)(T*), Free>>;

using ConfigHandle = Handle<lrp_config, lrp_config_free>;
using CloudHandle = Handle<lrp_cloud, lrp_cloud_free>;
using CalibHandle = Handle<lrp_calib, lrp_calib_free>;
using ProposalsHandle = Handle<lrp_proposals, lrp_proposals_free>;
using LabelsHandle = Handle<lrp_labels, lrp_labels_free>;
using EvalHandle = Handle<lrp_eval, lrp_eval_free>;
using SceneHandle = Handle<lrp_scene, lrp_scene_free>;

struct CommonOptions {
  std::string config_path;
  std::string data_root;
  std::string frames = "all";
  std::optional<long> seed;
  int workers = 1;
  std::string image_size;
};

ConfigHandle load_config(const CommonOptions& opts) {
  lrp_config* raw = nullptr;
  if (opts.config_path.empty()) {
    check(lrp_config_create(&raw), "config defaults");
  } else {
    check(lrp_config_load(opts.config_path.c_str(), &raw), opts.config_path);
  }
  ConfigHandle config(raw);
  if (opts.seed) {
    check(lrp_config_set(config.get(), "seed", std::to_string(*opts.seed).c_str()),
          "--seed");
  }
  if (!opts.image_size.empty()) {
    const auto x = opts.image_size.find('x');
    if (x == std::string::npos) throw CliError{"--image-size expects WxH"};
    check(lrp_config_set(config.get(), "dataset.image_width",
                         opts.image_size.substr(0, x).c_str()),
          "--image-size");
    check(lrp_config_set(config.get(), "dataset.image_height",
                         opts.image_size.substr(x + 1).c_str()),
          "--image-size");
  }
  return config;
}

std::string config_value(const lrp_config* config, const char* key) {
  char buf[256];
  check(lrp_config_get(config, key, buf, sizeof(buf)), key);
  return buf;
}

fs::path dataset_root(const CommonOptions& opts) {
  if (!opts.data_root.empty()) return opts.data_root;
  if (const char* env = std::getenv("LIDARPROP_DATA")) return env;
  return ".";
}

fs::path resolve_dir(const fs::path& root, const std::string& configured) {
  const fs::path p(configured);
  return p.is_absolute() ? p : root / p;
}

// Frame selector: "all", or comma-separated ids / numeric ranges ("0-9,15",
// "000042"). Numeric tokens match stems by integer value.
bool frame_selected(const std::string& selector, const std::string& stem) {
  if (selector == "all" || selector.empty()) return true;
  auto as_number = [](const std::string& s) -> std::optional<long> {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      return std::nullopt;
    }
    return std::stol(s);
  };
  const auto stem_num = as_number(stem);
  std::stringstream ss(selector);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dash = token.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = as_number(token.substr(0, dash));
      const auto hi = as_number(token.substr(dash + 1));
      if (lo && hi && stem_num && *stem_num >= *lo && *stem_num <= *hi) return true;
      continue;
    }
    if (token == stem) return true;
    const auto tok_num = as_number(token);
    if (tok_num && stem_num && *tok_num == *stem_num) return true;
  }
  return false;
}

std::vector<std::string> list_frames(const fs::path& dir, const std::string& ext,
                                     const std::string& selector) {
  if (!fs::is_directory(dir)) {
    throw CliError{"not a directory: " + dir.string()};
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    const std::string stem = entry.path().stem().string();
    if (frame_selected(selector, stem)) stems.push_back(stem);
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

struct FrameTimings {
  double downsample = 0.0, ground = 0.0, cluster = 0.0, project = 0.0, total = 0.0;
};

void print_timing_summary(const std::vector<FrameTimings>& timings) {
  std::vector<double> ds, gr, cl, pj, tot;
  for (const auto& t : timings) {
    ds.push_back(t.downsample);
    gr.push_back(t.ground);
    cl.push_back(t.cluster);
    pj.push_back(t.project);
    tot.push_back(t.total);
  }
  std::printf("stage timing, median ms over %zu frames:\n", timings.size());
  std::printf("  downsample %8.3f\n", median(ds));
  std::printf("  ground     %8.3f\n", median(gr));
  std::printf("  cluster    %8.3f\n", median(cl));
  std::printf("  project    %8.3f\n", median(pj));
  std::printf("  total      %8.3f\n", median(tot));
}

FrameTimings read_timings(const lrp_proposals* proposals) {
  FrameTimings t;
  check(lrp_proposals_stage_ms(proposals, LRP_STAGE_DOWNSAMPLE, &t.downsample), "timing");
  check(lrp_proposals_stage_ms(proposals, LRP_STAGE_GROUND, &t.ground), "timing");
  check(lrp_proposals_stage_ms(proposals, LRP_STAGE_CLUSTER, &t.cluster), "timing");
  check(lrp_proposals_stage_ms(proposals, LRP_STAGE_PROJECT, &t.project), "timing");
  check(lrp_proposals_stage_ms(proposals, LRP_STAGE_TOTAL, &t.total), "timing");
  return t;
}

// Runs fn(frame_index) over a worker pool. Results and errors are collected
// per frame, so output order and content are independent of scheduling.
std::vector<std::string> run_pool(size_t frames, int workers,
                                  const std::function<void(size_t)>& fn) {
  std::vector<std::string> errors(frames);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= frames) return;
      try {
        fn(i);
      } catch (const CliError& e) {
        errors[i] = e.message;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return errors;
}

/* ---------------- propose ---------------- */

struct ProposeResult {
  std::vector<FrameTimings> timings;
  size_t proposal_count = 0;
  int failures = 0;
};

ProposeResult run_propose(const lrp_config* config, const CommonOptions& opts,
                          const fs::path& out_dir, bool also_json) {
  const fs::path root = dataset_root(opts);
  const fs::path velo_dir = resolve_dir(root, config_value(config, "dataset.velodyne_dir"));
  const fs::path calib_dir = resolve_dir(root, config_value(config, "dataset.calib_dir"));
  const auto frames = list_frames(velo_dir, ".bin", opts.frames);
  if (frames.empty()) throw CliError{"no frames selected under " + velo_dir.string()};
  fs::create_directories(out_dir);

  const int width = std::stoi(config_value(config, "dataset.image_width"));
  const int height = std::stoi(config_value(config, "dataset.image_height"));

  ProposeResult result;
  result.timings.resize(frames.size());
  std::vector<size_t> counts(frames.size(), 0);

  auto process = [&](size_t i) {
    const std::string& frame = frames[i];
    const fs::path bin = velo_dir / (frame + ".bin");
    const fs::path cal = calib_dir / (frame + ".txt");

    lrp_cloud* cloud_raw = nullptr;
    check(lrp_cloud_load(bin.string().c_str(), &cloud_raw), bin.string());
    CloudHandle cloud(cloud_raw);

    lrp_calib* calib_raw = nullptr;
    check(lrp_calib_load(cal.string().c_str(), &calib_raw), cal.string());
    CalibHandle calib(calib_raw);
    check(lrp_calib_set_image_size(calib.get(), width, height), "image size");

    lrp_proposals* props_raw = nullptr;
    check(lrp_propose(config, cloud.get(), calib.get(), &props_raw), frame);
    ProposalsHandle props(props_raw);

    const fs::path txt = out_dir / (frame + ".txt");
    check(lrp_proposals_save(props.get(), txt.string().c_str()), txt.string());
    if (also_json) {
      const fs::path json = out_dir / (frame + ".json");
      check(lrp_proposals_save_json(props.get(), json.string().c_str()), json.string());
    }
    result.timings[i] = read_timings(props.get());
    counts[i] = lrp_proposals_size(props.get());
  };

  const auto errors = run_pool(frames.size(), opts.workers, process);
  for (size_t i = 0; i < frames.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << kErrorPrefix << "frame " << frames[i] << ": " << errors[i] << "\n";
      ++result.failures;
    } else {
      result.proposal_count += counts[i];
    }
  }
  return result;
}

int cmd_propose(const CommonOptions& opts, const std::string& out,
                bool also_json) {
  ConfigHandle config = load_config(opts);
  const ProposeResult result = run_propose(config.get(), opts, out, also_json);
  const size_t ok_frames = result.timings.size() - static_cast<size_t>(result.failures);
  std::printf("propose: %zu frames, %zu proposals (%.2f/frame)\n", ok_frames,
              result.proposal_count,
              ok_frames ? static_cast<double>(result.proposal_count) /
                              static_cast<double>(ok_frames)
                        : 0.0);
  print_timing_summary(result.timings);
  return result.failures == 0 ? 0 : 1;
}

/* ---------------- eval ---------------- */

EvalHandle build_eval(const lrp_config* config, const fs::path& proposals_dir,
                      const fs::path& labels_dir, const std::string& selector,
                      const std::string& scores_path) {
  const std::string class_filter = config_value(config, "eval.class_filter");
  const auto label_frames = list_frames(labels_dir, ".txt", selector);
  if (label_frames.empty()) {
    throw CliError{"no label files under " + labels_dir.string()};
  }

  // Frame-id alignment: proposals without labels are a hard error; labels
  // without proposals evaluate as zero proposals (with a warning).
  std::vector<std::string> proposal_frames;
  if (fs::is_directory(proposals_dir)) {
    proposal_frames = list_frames(proposals_dir, ".txt", selector);
    auto json_frames = list_frames(proposals_dir, ".json", selector);
    proposal_frames.insert(proposal_frames.end(), json_frames.begin(),
                           json_frames.end());
    std::sort(proposal_frames.begin(), proposal_frames.end());
    proposal_frames.erase(
        std::unique(proposal_frames.begin(), proposal_frames.end()),
        proposal_frames.end());
  }
  std::vector<std::string> unmatched;
  for (const auto& frame : proposal_frames) {
    if (!std::binary_search(label_frames.begin(), label_frames.end(), frame)) {
      unmatched.push_back(frame);
    }
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& f : unmatched) list += " " + f;
    throw CliError{"proposal frames without labels:" + list};
  }

  lrp_eval* eval_raw = nullptr;
  check(lrp_eval_create(config, &eval_raw), "eval");
  EvalHandle eval(eval_raw);

  for (const auto& frame : label_frames) {
    const fs::path label_path = labels_dir / (frame + ".txt");
    lrp_labels* labels_raw = nullptr;
    check(lrp_labels_load(label_path.string().c_str(), class_filter.c_str(),
                          &labels_raw),
          label_path.string());
    LabelsHandle labels(labels_raw);

    ProposalsHandle props;
    fs::path prop_path = proposals_dir / (frame + ".txt");
    if (!fs::exists(prop_path)) prop_path = proposals_dir / (frame + ".json");
    if (fs::exists(prop_path)) {
      lrp_proposals* props_raw = nullptr;
      check(lrp_proposals_load(prop_path.string().c_str(), &props_raw),
            prop_path.string());
      props.reset(props_raw);
    } else {
      std::cerr << "warning: no proposals for frame " << frame
                << ", evaluating as empty\n";
    }
    check(lrp_eval_add_frame(eval.get(), frame.c_str(), props.get(), labels.get()),
          frame);
  }
  if (!scores_path.empty()) {
    check(lrp_eval_set_scores(eval.get(), scores_path.c_str()), scores_path);
  }
  check(lrp_eval_finish(eval.get()), "eval finish");
  return eval;
}

void save_reports(const lrp_eval* eval, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const fs::path json = out_dir / "report.json";
  const fs::path csv = out_dir / "report.csv";
  const fs::path curve = out_dir / "recall_curve.csv";
  check(lrp_eval_save_json(eval, json.string().c_str()), json.string());
  check(lrp_eval_save_csv(eval, csv.string().c_str()), csv.string());
  check(lrp_eval_save_curve_csv(eval, curve.string().c_str()), curve.string());
}

int cmd_eval(const CommonOptions& opts, const std::string& proposals_dir,
             const std::string& labels_dir, const std::string& scores,
             const std::string& out) {
  ConfigHandle config = load_config(opts);
  EvalHandle eval = build_eval(config.get(), proposals_dir, labels_dir,
                               opts.frames, scores);
  save_reports(eval.get(), out);

  double labels = 0, missed = 0, recall = 0, regions = 0;
  check(lrp_eval_metric(eval.get(), "labels", &labels), "metric");
  check(lrp_eval_metric(eval.get(), "missed_labels", &missed), "metric");
  check(lrp_eval_metric(eval.get(), "max_recall", &recall), "metric");
  check(lrp_eval_metric(eval.get(), "region_count_mean", &regions), "metric");
  std::printf("eval: %d labels, %d missed, max recall %.4f, %.2f regions/frame\n",
              static_cast<int>(labels), static_cast<int>(missed), recall, regions);
  if (!scores.empty()) {
    double easy = 0, moderate = 0, hard = 0;
    check(lrp_eval_metric(eval.get(), "ap_easy", &easy), "metric");
    check(lrp_eval_metric(eval.get(), "ap_moderate", &moderate), "metric");
    check(lrp_eval_metric(eval.get(), "ap_hard", &hard), "metric");
    std::printf("eval: AP easy %.4f, moderate %.4f, hard %.4f\n", easy, moderate, hard);
  }
  std::printf("eval: reports written to %s\n", out.c_str());
  return 0;
}

/* ---------------- bench ---------------- */

struct BenchRow {
  std::string scheme;
  double mean_regions = 0.0;
  int missed = 0;
  double max_recall = 0.0;
  double roi_ms = 0.0;
};

BenchRow bench_clustering(const lrp_config* config, const CommonOptions& opts,
                          const fs::path& labels_dir, const fs::path& work_dir) {
  const fs::path proposals_dir = work_dir / "proposals_clustering";
  ProposeResult propose = run_propose(config, opts, proposals_dir, false);
  if (propose.failures > 0) {
    throw CliError{"bench: " + std::to_string(propose.failures) +
                   " frame(s) failed during proposal generation"};
  }
  EvalHandle eval = build_eval(config, proposals_dir, labels_dir, opts.frames, "");

  BenchRow row;
  row.scheme = "clustering";
  std::vector<double> totals;
  for (const auto& t : propose.timings) totals.push_back(t.total);
  row.roi_ms = median(totals);
  double missed = 0, recall = 0, regions = 0;
  check(lrp_eval_metric(eval.get(), "missed_labels", &missed), "metric");
  check(lrp_eval_metric(eval.get(), "max_recall", &recall), "metric");
  check(lrp_eval_metric(eval.get(), "region_count_mean", &regions), "metric");
  row.missed = static_cast<int>(missed);
  row.max_recall = recall;
  row.mean_regions = regions;
  return row;
}

BenchRow bench_sliding(const lrp_config* config, const CommonOptions& opts,
                       const fs::path& labels_dir) {
  const std::string class_filter = config_value(config, "eval.class_filter");
  const auto frames = list_frames(labels_dir, ".txt", opts.frames);
  if (frames.empty()) throw CliError{"no label files under " + labels_dir.string()};

  lrp_eval* eval_raw = nullptr;
  check(lrp_eval_create(config, &eval_raw), "eval");
  EvalHandle eval(eval_raw);

  std::vector<double> roi_times;
  for (const auto& frame : frames) {
    const auto start = std::chrono::steady_clock::now();
    lrp_proposals* props_raw = nullptr;
    check(lrp_sliding_windows(config, frame.c_str(), &props_raw), frame);
    ProposalsHandle props(props_raw);
    roi_times.push_back(std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count());

    const fs::path label_path = labels_dir / (frame + ".txt");
    lrp_labels* labels_raw = nullptr;
    check(lrp_labels_load(label_path.string().c_str(), class_filter.c_str(),
                          &labels_raw),
          label_path.string());
    LabelsHandle labels(labels_raw);
    check(lrp_eval_add_frame(eval.get(), frame.c_str(), props.get(), labels.get()),
          frame);
  }
  check(lrp_eval_finish(eval.get()), "eval finish");

  BenchRow row;
  row.scheme = "sliding";
  row.roi_ms = median(roi_times);
  double missed = 0, recall = 0, regions = 0;
  check(lrp_eval_metric(eval.get(), "missed_labels", &missed), "metric");
  check(lrp_eval_metric(eval.get(), "max_recall", &recall), "metric");
  check(lrp_eval_metric(eval.get(), "region_count_mean", &regions), "metric");
  row.missed = static_cast<int>(missed);
  row.max_recall = recall;
  row.mean_regions = regions;
  return row;
}

int cmd_bench(const CommonOptions& opts, const std::string& scheme,
              const std::string& sweep_aspect, const std::string& out) {
  ConfigHandle config = load_config(opts);
  const fs::path root = dataset_root(opts);
  const fs::path labels_dir =
      resolve_dir(root, config_value(config.get(), "dataset.label_dir"));
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  std::vector<BenchRow> rows;
  if (scheme.empty() || scheme == "clustering") {
    if (!sweep_aspect.empty()) {
      // lo:hi:step ratio sweep; the best row (fewest missed labels) is kept
      // as the clustering entry and the full sweep is reported alongside.
      double lo = 0, hi = 0, step = 0;
      if (std::sscanf(sweep_aspect.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
          !(step > 0.0) || !(lo > 0.0) || hi < lo) {
        return fail("--sweep-aspect expects lo:hi:step with 0 < lo <= hi, step > 0");
      }
      std::optional<BenchRow> best;
      for (double ratio = lo; ratio <= hi + 1e-9; ratio += step) {
        char value[32];
        std::snprintf(value, sizeof(value), "%.4f", ratio);
        check(lrp_config_set(config.get(), "aspect.ratio", value), "aspect.ratio");
        BenchRow row = bench_clustering(config.get(), opts, labels_dir, out_dir);
        row.scheme = std::string("clustering@") + value;
        std::printf("sweep aspect %.4f: missed %d, recall %.4f\n", ratio,
                    row.missed, row.max_recall);
        rows.push_back(row);
        if (!best || row.missed < best->missed) best = row;
      }
      best->scheme = "clustering(best)";
      rows.push_back(*best);
    } else {
      rows.push_back(bench_clustering(config.get(), opts, labels_dir, out_dir));
    }
  }
  if (scheme.empty() || scheme == "sliding") {
    rows.push_back(bench_sliding(config.get(), opts, labels_dir));
  }
  if (rows.empty()) return fail("unknown scheme: " + scheme);

  const fs::path csv_path = out_dir / "bench.csv";
  {
    std::FILE* f = std::fopen(csv_path.string().c_str(), "w");
    if (!f) return fail("cannot write " + csv_path.string());
    std::fprintf(f, "scheme,mean_regions_per_frame,missed_labels,max_recall,roi_ms\n");
    for (const auto& r : rows) {
      std::fprintf(f, "%s,%.6f,%d,%.6f,%.3f\n", r.scheme.c_str(), r.mean_regions,
                   r.missed, r.max_recall, r.roi_ms);
    }
    std::fclose(f);
  }

  std::printf("%-20s %18s %14s %12s %10s\n", "scheme", "regions/frame",
              "missed labels", "max recall", "roi ms");
  for (const auto& r : rows) {
    std::printf("%-20s %18.2f %14d %12.4f %10.3f\n", r.scheme.c_str(),
                r.mean_regions, r.missed, r.max_recall, r.roi_ms);
  }
  std::printf("bench: table written to %s\n", csv_path.string().c_str());
  return 0;
}

/* ---------------- synth ---------------- */

int cmd_synth(const CommonOptions& opts, const std::string& spec_path,
              const std::string& out, int frames) {
  ConfigHandle config = load_config(opts);
  const int width = std::stoi(config_value(config.get(), "dataset.image_width"));
  const int height = std::stoi(config_value(config.get(), "dataset.image_height"));

  lrp_scene* scene_raw = nullptr;
  check(lrp_scene_load(spec_path.c_str(), &scene_raw), spec_path);
  SceneHandle scene(scene_raw);

  const unsigned long long seed =
      opts.seed ? static_cast<unsigned long long>(*opts.seed) : 0ULL;
  check(lrp_scene_synth_dataset(scene.get(), out.c_str(), frames, width, height,
                                seed),
        out);
  std::printf("synth: %d frame(s) written under %s\n", frames, out.c_str());
  return 0;
}

/* ---------------- plot ---------------- */

int cmd_plot(const std::vector<std::string>& curves, const std::string& out) {
  std::vector<const char*> paths;
  paths.reserve(curves.size());
  for (const auto& c : curves) paths.push_back(c.c_str());
  check(lrp_plot_recall_curves(paths.data(), paths.size(), out.c_str()), out);
  std::printf("plot: %zu curve(s) rendered to %s\n", curves.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR point-cloud region proposals for pedestrian detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lrp_version());

  CommonOptions opts;
  std::string out_dir = "out";
  bool also_json = false;
  std::string proposals_dir, labels_dir, scores;
  std::string scheme, sweep_aspect;
  std::string spec_path;
  int synth_frames = 1;
  std::vector<std::string> curve_files;
  std::string svg_out = "recall.svg";

  auto add_common = [&](CLI::App* cmd, bool with_frames = true) {
    cmd->add_option("--config", opts.config_path, "pipeline config file");
    cmd->add_option("--data-root", opts.data_root,
                    "dataset root (default: $LIDARPROP_DATA or .)");
    if (with_frames) {
      cmd->add_option("--frames", opts.frames, "frame selector, e.g. all | 0-9,15");
    }
    cmd->add_option("--seed", opts.seed, "override config seed");
    cmd->add_option("--workers", opts.workers, "worker pool width")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--image-size", opts.image_size, "image size WxH");
  };

  CLI::App* propose = app.add_subcommand("propose", "generate cluster proposals");
  add_common(propose);
  propose->add_option("--out", out_dir, "output directory for proposal files");
  propose->add_flag("--json", also_json, "also write JSON proposal files");

  CLI::App* eval = app.add_subcommand("eval", "evaluate proposals against labels");
  add_common(eval);
  eval->add_option("--proposals", proposals_dir, "proposal directory")->required();
  eval->add_option("--labels", labels_dir, "label directory")->required();
  eval->add_option("--scores", scores, "per-proposal score file (enables AP)");
  eval->add_option("--out", out_dir, "report output directory");

  CLI::App* bench = app.add_subcommand("bench", "compare proposal schemes");
  add_common(bench);
  bench->add_option("--scheme", scheme, "clustering | sliding (default: both)")
      ->check(CLI::IsMember({"clustering", "sliding"}));
  bench->add_option("--sweep-aspect", sweep_aspect, "aspect-ratio sweep lo:hi:step");
  bench->add_option("--out", out_dir, "bench output directory");

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic KITTI-layout dataset");
  add_common(synth, false);
  synth->add_option("--spec", spec_path, "scene spec file")->required();
  synth->add_option("--out", out_dir, "dataset output directory")->required();
  synth->add_option("--frames", synth_frames, "number of frames")
      ->check(CLI::NonNegativeNumber);

  CLI::App* plot = app.add_subcommand("plot", "render recall-vs-IoU curves as SVG");
  plot->add_option("--out", svg_out, "output SVG path");
  plot->add_option("curves", curve_files, "recall-curve CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (propose->parsed()) return cmd_propose(opts, out_dir, also_json);
    if (eval->parsed()) return cmd_eval(opts, proposals_dir, labels_dir, scores, out_dir);
    if (bench->parsed()) return cmd_bench(opts, scheme, sweep_aspect, out_dir);
    if (synth->parsed()) return cmd_synth(opts, spec_path, out_dir, synth_frames);
    if (plot->parsed()) return cmd_plot(curve_files, svg_out);
  } catch (const CliError& e) {
    return fail(e.message);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("no command given");
}
