#include "synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cloud_io.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace lrp {

void SceneSpec::validate() const {
  if (ground_points < 0) throw_data("scene: ground.points must be >= 0");
  if (!(ground_x_min < ground_x_max) || !(ground_y_min < ground_y_max)) {
    throw_data("scene: ground ranges must satisfy min < max");
  }
  for (size_t i = 0; i < pedestrians.size(); ++i) {
    const PedestrianSpec& p = pedestrians[i];
    if (!(p.dx > 0.0) || !(p.dy > 0.0) || !(p.dz > 0.0)) {
      throw_data("scene: pedestrian " + std::to_string(i) +
                 " extent must be strictly positive on all axes");
    }
    if (p.points <= 0) {
      throw_data("scene: pedestrian " + std::to_string(i) +
                 " requests zero points");
    }
  }
  if (random_pedestrians) {
    const RandomPedestrians& r = *random_pedestrians;
    if (r.count_min < 0 || r.count_max < r.count_min) {
      throw_data("scene: peds.count range invalid");
    }
    if (!(r.dx_min > 0.0) || r.dx_max < r.dx_min || !(r.dy_min > 0.0) ||
        r.dy_max < r.dy_min || !(r.dz_min > 0.0) || r.dz_max < r.dz_min) {
      throw_data("scene: peds extent ranges must be positive with min <= max");
    }
    if (r.points_min <= 0 || r.points_max < r.points_min) {
      throw_data("scene: peds.points range invalid");
    }
    if (!(r.region_x_min < r.region_x_max)) {
      throw_data("scene: peds.region_x must satisfy min < max");
    }
    if (!(r.fov > 0.0) || r.min_separation < 0.0) {
      throw_data("scene: peds.fov must be > 0 and peds.min_separation >= 0");
    }
  }
  if (clutter_points < 0) throw_data("scene: clutter.points must be >= 0");
  if (clutter_points > 0) {
    if (!(clutter_region[0] < clutter_region[1]) ||
        !(clutter_region[2] < clutter_region[3]) ||
        !(clutter_region[4] < clutter_region[5])) {
      throw_data("scene: clutter.region must satisfy min < max per axis");
    }
  }
}

double SceneSpec::ground_z(double x, double y) const {
  return ground_coeffs[0] + ground_coeffs[1] * x + ground_coeffs[2] * y +
         ground_coeffs[3] * x * x + ground_coeffs[4] * x * y +
         ground_coeffs[5] * y * y;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> numbers(const std::string& key, const std::string& value,
                            size_t expected, const std::string& origin) {
  std::istringstream iss(value);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  if (out.size() != expected) {
    throw_format(origin + ": key " + key + " needs " + std::to_string(expected) +
                 " numeric values, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

SceneSpec parse_scene_spec_text(const std::string& text, const std::string& origin) {
  SceneSpec spec;
  RandomPedestrians random;
  bool has_random = false;

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
      throw_format(origin + ":" + std::to_string(line_no) + ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string at = origin + ":" + std::to_string(line_no);

    if (key == "seed") {
      spec.seed = static_cast<uint64_t>(numbers(key, value, 1, at)[0]);
    } else if (key == "ground.coeffs") {
      const auto v = numbers(key, value, 6, at);
      std::copy(v.begin(), v.end(), spec.ground_coeffs.begin());
    } else if (key == "ground.points") {
      spec.ground_points = static_cast<int>(numbers(key, value, 1, at)[0]);
    } else if (key == "ground.x_range") {
      const auto v = numbers(key, value, 2, at);
      spec.ground_x_min = v[0];
      spec.ground_x_max = v[1];
    } else if (key == "ground.y_range") {
      const auto v = numbers(key, value, 2, at);
      spec.ground_y_min = v[0];
      spec.ground_y_max = v[1];
    } else if (key == "pedestrian") {
      const auto v = numbers(key, value, 6, at);
      spec.pedestrians.push_back(PedestrianSpec{v[0], v[1], v[2], v[3], v[4],
                                                static_cast<int>(v[5])});
    } else if (key == "peds.count") {
      const auto v = numbers(key, value, 2, at);
      random.count_min = static_cast<int>(v[0]);
      random.count_max = static_cast<int>(v[1]);
      has_random = true;
    } else if (key == "peds.extent_dx") {
      const auto v = numbers(key, value, 2, at);
      random.dx_min = v[0];
      random.dx_max = v[1];
      has_random = true;
    } else if (key == "peds.extent_dy") {
      const auto v = numbers(key, value, 2, at);
      random.dy_min = v[0];
      random.dy_max = v[1];
      has_random = true;
    } else if (key == "peds.extent_dz") {
      const auto v = numbers(key, value, 2, at);
      random.dz_min = v[0];
      random.dz_max = v[1];
      has_random = true;
    } else if (key == "peds.points") {
      const auto v = numbers(key, value, 2, at);
      random.points_min = static_cast<int>(v[0]);
      random.points_max = static_cast<int>(v[1]);
      has_random = true;
    } else if (key == "peds.region_x") {
      const auto v = numbers(key, value, 2, at);
      random.region_x_min = v[0];
      random.region_x_max = v[1];
      has_random = true;
    } else if (key == "peds.fov") {
      random.fov = numbers(key, value, 1, at)[0];
      has_random = true;
    } else if (key == "peds.min_separation") {
      random.min_separation = numbers(key, value, 1, at)[0];
      has_random = true;
    } else if (key == "clutter.points") {
      spec.clutter_points = static_cast<int>(numbers(key, value, 1, at)[0]);
    } else if (key == "clutter.region") {
      const auto v = numbers(key, value, 6, at);
      std::copy(v.begin(), v.end(), spec.clutter_region.begin());
    } else {
      throw_format(at + ": unknown scene key: " + key);
    }
  }
  if (has_random) spec.random_pedestrians = random;
  spec.validate();
  return spec;
}

SceneSpec parse_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open scene spec: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene_spec_text(buf.str(), path.string());
}

namespace {

std::vector<PedestrianSpec> instantiate_pedestrians(const SceneSpec& spec, Rng& rng) {
  std::vector<PedestrianSpec> out = spec.pedestrians;
  if (!spec.random_pedestrians) return out;
  const RandomPedestrians& r = *spec.random_pedestrians;
  const int count =
      r.count_min +
      static_cast<int>(rng.bounded(static_cast<uint64_t>(r.count_max - r.count_min + 1)));
  for (int i = 0; i < count; ++i) {
    PedestrianSpec p;
    p.dx = rng.uniform(r.dx_min, r.dx_max);
    p.dy = rng.uniform(r.dy_min, r.dy_max);
    p.dz = rng.uniform(r.dz_min, r.dz_max);
    p.points = r.points_min +
               static_cast<int>(rng.bounded(
                   static_cast<uint64_t>(r.points_max - r.points_min + 1)));
    // Rejection placement; give up on separation after a bounded number of
    // draws so pathological specs still terminate.
    bool placed = false;
    for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
      p.cx = rng.uniform(r.region_x_min, r.region_x_max);
      p.cy = rng.uniform(-r.fov * p.cx, r.fov * p.cx);
      placed = true;
      for (const PedestrianSpec& q : out) {
        const double d = std::hypot(p.cx - q.cx, p.cy - q.cy);
        if (d < r.min_separation) {
          placed = false;
          break;
        }
      }
    }
    if (placed) out.push_back(p);
  }
  return out;
}

}  // namespace

SynthResult synth_scene(const SceneSpec& spec, std::optional<uint64_t> stream_seed) {
  spec.validate();
  Rng rng(mix_seed(stream_seed.value_or(spec.seed), 0x5ce8e5u));

  SynthResult result;
  const auto pedestrians = instantiate_pedestrians(spec, rng);

  result.cloud.points.reserve(
      static_cast<size_t>(spec.ground_points + spec.clutter_points) +
      pedestrians.size() * 512);

  for (int i = 0; i < spec.ground_points; ++i) {
    Point3 p;
    p.x = static_cast<float>(rng.uniform(spec.ground_x_min, spec.ground_x_max));
    p.y = static_cast<float>(rng.uniform(spec.ground_y_min, spec.ground_y_max));
    p.z = static_cast<float>(spec.ground_z(p.x, p.y) +
                             rng.uniform(-kSynthGroundJitter, kSynthGroundJitter));
    p.intensity = static_cast<float>(rng.uniform());
    result.cloud.points.push_back(p);
  }

  for (const PedestrianSpec& ped : pedestrians) {
    SceneObject truth;
    truth.cx = ped.cx;
    truth.cy = ped.cy;
    truth.base_z = spec.ground_z(ped.cx, ped.cy);
    truth.box.min_x = ped.cx - 0.5 * ped.dx;
    truth.box.max_x = ped.cx + 0.5 * ped.dx;
    truth.box.min_y = ped.cy - 0.5 * ped.dy;
    truth.box.max_y = ped.cy + 0.5 * ped.dy;
    truth.box.min_z = truth.base_z;
    truth.box.max_z = truth.base_z + ped.dz;
    for (int i = 0; i < ped.points; ++i) {
      Point3 p;
      p.x = static_cast<float>(rng.uniform(truth.box.min_x, truth.box.max_x));
      p.y = static_cast<float>(rng.uniform(truth.box.min_y, truth.box.max_y));
      p.z = static_cast<float>(rng.uniform(truth.box.min_z, truth.box.max_z));
      p.intensity = static_cast<float>(rng.uniform());
      result.cloud.points.push_back(p);
    }
    result.truths.push_back(truth);
  }

  for (int i = 0; i < spec.clutter_points; ++i) {
    Point3 p;
    p.x = static_cast<float>(rng.uniform(spec.clutter_region[0], spec.clutter_region[1]));
    p.y = static_cast<float>(rng.uniform(spec.clutter_region[2], spec.clutter_region[3]));
    p.z = static_cast<float>(rng.uniform(spec.clutter_region[4], spec.clutter_region[5]));
    p.intensity = static_cast<float>(rng.uniform());
    result.cloud.points.push_back(p);
  }
  return result;
}

CalibrationSet synth_calib(int image_width, int image_height) {
  // KITTI-like camera-2 chain: velodyne (x fwd, y left, z up) to rectified
  // camera (z fwd, x right, y down) with small off-axis terms, so synthetic
  // data exercises the same math as the real dataset.
  Eigen::Matrix<double, 3, 4> p;
  p << 7.215377e+02, 0.0, 6.095593e+02, 4.485728e+01,
       0.0, 7.215377e+02, 1.728540e+02, 2.163791e-01,
       0.0, 0.0, 1.0, 2.745884e-03;
  Eigen::Matrix3d r;
  r << 9.999239e-01, 9.837760e-03, -7.445048e-03,
       -9.869795e-03, 9.999421e-01, -4.278459e-03,
       7.402527e-03, 4.351614e-03, 9.999631e-01;
  Eigen::Matrix<double, 3, 4> t;
  t << 7.533745e-03, -9.999714e-01, -6.166020e-04, -4.069766e-03,
       1.480249e-02, 7.280733e-04, -9.998902e-01, -7.631618e-02,
       9.998621e-01, 7.523790e-03, 1.480755e-02, -2.717806e-01;
  return CalibrationSet(p, r, t, image_width, image_height);
}

std::string frame_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

namespace {

// Project the 8 corners of an axis-aligned sensor-frame box; returns the
// raw pixel bounds, or nothing when no corner lies in front of the camera.
std::optional<BBox2D> project_box(const Extent3& box, const CalibrationSet& calib) {
  BBox2D out;
  out.left = out.top = std::numeric_limits<double>::infinity();
  out.right = out.bottom = -std::numeric_limits<double>::infinity();
  int in_front = 0;
  for (int corner = 0; corner < 8; ++corner) {
    const Point3 p{
        static_cast<float>(corner & 1 ? box.max_x : box.min_x),
        static_cast<float>(corner & 2 ? box.max_y : box.min_y),
        static_cast<float>(corner & 4 ? box.max_z : box.min_z), 0.0f};
    const auto px = calib.project(p);
    if (!px) continue;
    ++in_front;
    out.left = std::min(out.left, px->u);
    out.right = std::max(out.right, px->u);
    out.top = std::min(out.top, px->v);
    out.bottom = std::max(out.bottom, px->v);
  }
  if (in_front < 8) return std::nullopt;  // partially behind: skip the label
  return out;
}

void write_label_file(const std::vector<SceneObject>& truths,
                      const CalibrationSet& calib,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw_io("cannot open output file: " + path.string());
  char line[256];
  for (const SceneObject& truth : truths) {
    const auto raw = project_box(truth.box, calib);
    if (!raw) continue;
    BBox2D clipped = *raw;
    clipped.left = std::max(clipped.left, 0.0);
    clipped.top = std::max(clipped.top, 0.0);
    clipped.right = std::min(clipped.right, static_cast<double>(calib.image_width()));
    clipped.bottom = std::min(clipped.bottom, static_cast<double>(calib.image_height()));
    if (!clipped.valid()) continue;
    const double truncation = 1.0 - clipped.area() / raw->area();

    // KITTI camera-frame 3D fields: location is the bottom center of the box.
    const Eigen::Vector3d loc = calib.to_camera(
        Point3{static_cast<float>(truth.cx), static_cast<float>(truth.cy),
               static_cast<float>(truth.box.min_z), 0.0f});
    std::snprintf(line, sizeof(line),
                  "Pedestrian %.2f 0 0.00 %.2f %.2f %.2f %.2f "
                  "%.2f %.2f %.2f %.2f %.2f %.2f 0.00\n",
                  truncation, clipped.left, clipped.top, clipped.right,
                  clipped.bottom, truth.box.dz(), truth.box.dy(), truth.box.dx(),
                  loc.x(), loc.y(), loc.z());
    out << line;
  }
  if (!out) throw_io("write failed on " + path.string());
}

}  // namespace

void synth_dataset(const SceneSpec& spec, const std::filesystem::path& out_dir,
                   int frames, int image_width, int image_height) {
  if (frames < 0) throw_argument("synth_dataset: frame count must be >= 0");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "velodyne", ec);
  fs::create_directories(out_dir / "calib", ec);
  fs::create_directories(out_dir / "label_2", ec);
  if (ec) throw_io("cannot create dataset directories under " + out_dir.string());

  const CalibrationSet calib = synth_calib(image_width, image_height);
  for (int f = 0; f < frames; ++f) {
    const std::string name = frame_name(f);
    SynthResult scene = synth_scene(spec, mix_seed(spec.seed, static_cast<uint64_t>(f)));
    scene.cloud.frame_id = name;
    write_kitti_bin(scene.cloud, out_dir / "velodyne" / (name + ".bin"));
    write_calib(calib, out_dir / "calib" / (name + ".txt"));
    write_label_file(scene.truths, calib, out_dir / "label_2" / (name + ".txt"));
  }
}

}  // namespace lrp
