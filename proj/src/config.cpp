#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "error.hpp"

namespace lrp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw_config("config key " + key + ": not a number: '" + value + "'");
  }
}

int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw_config("config key " + key + ": not an integer: '" + value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::istringstream iss(value);
  std::vector<double> out;
  std::string tok;
  while (iss >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) throw_config("config key " + key + ": empty list");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct KeyHandler {
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<std::pair<std::string, KeyHandler>>& key_table() {
  static const std::vector<std::pair<std::string, KeyHandler>> table = {
      {"seed",
       {[](PipelineConfig& c, const std::string& v) {
          const int64_t s = parse_int("seed", v);
          if (s < 0) throw_config("seed must be non-negative");
          c.seed = static_cast<uint64_t>(s);
          c.pipeline.downsample.seed = c.seed;
        },
        [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
      {"downsample.density_reference",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.downsample.density_reference =
              static_cast<int>(parse_int("downsample.density_reference", v));
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.pipeline.downsample.density_reference);
        }}},
      {"downsample.bin_width",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.downsample.bin_width = parse_double("downsample.bin_width", v);
        },
        [](const PipelineConfig& c) {
          return format_double(c.pipeline.downsample.bin_width);
        }}},
      {"ground.grid_step",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.ground.grid_step = parse_double("ground.grid_step", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.ground.grid_step); }}},
      {"ground.seed_band",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.ground.seed_band = parse_double("ground.seed_band", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.ground.seed_band); }}},
      {"ground.removal_band",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.ground.removal_band = parse_double("ground.removal_band", v);
        },
        [](const PipelineConfig& c) {
          return format_double(c.pipeline.ground.removal_band);
        }}},
      {"dbscan.eps",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.dbscan.eps = parse_double("dbscan.eps", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.dbscan.eps); }}},
      {"dbscan.min_pts",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.dbscan.min_pts = static_cast<int>(parse_int("dbscan.min_pts", v));
        },
        [](const PipelineConfig& c) { return std::to_string(c.pipeline.dbscan.min_pts); }}},
      {"validate.dx_min",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dx_min = parse_double("validate.dx_min", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dx_min); }}},
      {"validate.dx_max",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dx_max = parse_double("validate.dx_max", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dx_max); }}},
      {"validate.dy_min",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dy_min = parse_double("validate.dy_min", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dy_min); }}},
      {"validate.dy_max",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dy_max = parse_double("validate.dy_max", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dy_max); }}},
      {"validate.dz_min",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dz_min = parse_double("validate.dz_min", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dz_min); }}},
      {"validate.dz_max",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.validation.dz_max = parse_double("validate.dz_max", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.validation.dz_max); }}},
      {"aspect.ratio",
       {[](PipelineConfig& c, const std::string& v) {
          c.pipeline.aspect_ratio = parse_double("aspect.ratio", v);
        },
        [](const PipelineConfig& c) { return format_double(c.pipeline.aspect_ratio); }}},
      {"sliding.heights",
       {[](PipelineConfig& c, const std::string& v) {
          c.sliding.heights = parse_double_list("sliding.heights", v);
        },
        [](const PipelineConfig& c) {
          std::string out;
          for (double h : c.sliding.heights) {
            if (!out.empty()) out += ' ';
            out += format_double(h);
          }
          return out;
        }}},
      {"sliding.aspect_ratio",
       {[](PipelineConfig& c, const std::string& v) {
          c.sliding.aspect_ratio = parse_double("sliding.aspect_ratio", v);
        },
        [](const PipelineConfig& c) { return format_double(c.sliding.aspect_ratio); }}},
      {"sliding.stride_x",
       {[](PipelineConfig& c, const std::string& v) {
          c.sliding.stride_x = parse_double("sliding.stride_x", v);
        },
        [](const PipelineConfig& c) { return format_double(c.sliding.stride_x); }}},
      {"sliding.stride_y",
       {[](PipelineConfig& c, const std::string& v) {
          c.sliding.stride_y = parse_double("sliding.stride_y", v);
        },
        [](const PipelineConfig& c) { return format_double(c.sliding.stride_y); }}},
      {"eval.iou_threshold",
       {[](PipelineConfig& c, const std::string& v) {
          c.eval_iou_threshold = parse_double("eval.iou_threshold", v);
        },
        [](const PipelineConfig& c) { return format_double(c.eval_iou_threshold); }}},
      {"eval.class_filter",
       {[](PipelineConfig& c, const std::string& v) {
          if (v.empty()) throw_config("eval.class_filter must not be empty");
          c.eval_class_filter = v;
        },
        [](const PipelineConfig& c) { return c.eval_class_filter; }}},
      {"dataset.velodyne_dir",
       {[](PipelineConfig& c, const std::string& v) { c.velodyne_dir = v; },
        [](const PipelineConfig& c) { return c.velodyne_dir; }}},
      {"dataset.calib_dir",
       {[](PipelineConfig& c, const std::string& v) { c.calib_dir = v; },
        [](const PipelineConfig& c) { return c.calib_dir; }}},
      {"dataset.label_dir",
       {[](PipelineConfig& c, const std::string& v) { c.label_dir = v; },
        [](const PipelineConfig& c) { return c.label_dir; }}},
      {"dataset.image_width",
       {[](PipelineConfig& c, const std::string& v) {
          c.image_width = static_cast<int>(parse_int("dataset.image_width", v));
        },
        [](const PipelineConfig& c) { return std::to_string(c.image_width); }}},
      {"dataset.image_height",
       {[](PipelineConfig& c, const std::string& v) {
          c.image_height = static_cast<int>(parse_int("dataset.image_height", v));
        },
        [](const PipelineConfig& c) { return std::to_string(c.image_height); }}},
  };
  return table;
}

const KeyHandler& find_key(const std::string& key) {
  for (const auto& [name, handler] : key_table()) {
    if (name == key) return handler;
  }
  throw_config("unknown config key: " + key);
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  PipelineConfig trial = *this;
  find_key(key).set(trial, value);
  trial.validate();
  *this = std::move(trial);
}

void PipelineConfig::set_raw(const std::string& key, const std::string& value) {
  find_key(key).set(*this, value);
}

std::string PipelineConfig::get(const std::string& key) const {
  return find_key(key).get(*this);
}

const std::vector<std::string>& PipelineConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [name, handler] : key_table()) out.push_back(name);
    return out;
  }();
  return keys;
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [name, handler] : key_table()) {
    out << name << " = " << handler.get(*this) << "\n";
  }
  return out.str();
}

void PipelineConfig::validate() const {
  const auto& d = pipeline.downsample;
  if (d.density_reference < 1) throw_config("downsample.density_reference must be >= 1");
  if (!(d.bin_width > 0.0)) throw_config("downsample.bin_width must be > 0");
  const auto& g = pipeline.ground;
  if (!(g.grid_step > 0.0)) throw_config("ground.grid_step must be > 0");
  if (g.seed_band < 0.0) throw_config("ground.seed_band must be >= 0");
  if (g.removal_band < 0.0) throw_config("ground.removal_band must be >= 0");
  const auto& db = pipeline.dbscan;
  if (!(db.eps > 0.0)) throw_config("dbscan.eps must be > 0");
  if (db.min_pts < 1) throw_config("dbscan.min_pts must be >= 1");
  const auto& v = pipeline.validation;
  if (v.dx_min < 0.0 || v.dy_min < 0.0 || v.dz_min < 0.0) {
    throw_config("validate.*_min bounds must be >= 0");
  }
  if (v.dx_min > v.dx_max || v.dy_min > v.dy_max || v.dz_min > v.dz_max) {
    throw_config("validate ranges require min <= max per axis");
  }
  if (!(pipeline.aspect_ratio > 0.0)) throw_config("aspect.ratio must be > 0");
  if (!(sliding.aspect_ratio > 0.0)) throw_config("sliding.aspect_ratio must be > 0");
  if (!(sliding.stride_x > 0.0) || sliding.stride_x > 1.0 ||
      !(sliding.stride_y > 0.0) || sliding.stride_y > 1.0) {
    throw_config("sliding strides must be in (0, 1]");
  }
  if (sliding.heights.empty()) throw_config("sliding.heights must not be empty");
  for (size_t i = 0; i < sliding.heights.size(); ++i) {
    if (!(sliding.heights[i] > 0.0)) throw_config("sliding.heights must be positive");
    if (i > 0 && sliding.heights[i - 1] >= sliding.heights[i]) {
      throw_config("sliding.heights must be strictly ascending");
    }
  }
  if (!(eval_iou_threshold > 0.0) || eval_iou_threshold >= 1.0) {
    throw_config("eval.iou_threshold must lie in (0, 1)");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw_config("dataset image size must be positive");
  }
}

PipelineConfig parse_config_text(const std::string& text, const std::string& origin) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw_config(origin + ":" + std::to_string(line_no) +
                   ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      config.set_raw(key, value);
    } catch (const Error& e) {
      throw Error(e.kind(),
                  origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void write_config(const PipelineConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  out << config.serialize();
  if (!out) throw_io("write failed on " + path.string());
}

}  // namespace lrp
