#include "preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "error.hpp"
#include "rng.hpp"

namespace lrp {

namespace {

// Select k of the n positions uniformly without replacement, output in
// ascending order (partial Fisher-Yates, then sort).
std::vector<uint32_t> sample_positions(std::vector<uint32_t> positions, size_t k,
                                       Rng& rng) {
  const size_t n = positions.size();
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.bounded(n - i));
    std::swap(positions[i], positions[j]);
  }
  positions.resize(k);
  std::sort(positions.begin(), positions.end());
  return positions;
}

}  // namespace

PointCloud downsample(const PointCloud& cloud, const DownsampleParams& params) {
  if (params.density_reference < 1) {
    throw_argument("downsample: density_reference must be >= 1");
  }
  if (!(params.bin_width > 0.0)) {
    throw_argument("downsample: bin_width must be > 0");
  }

  std::unordered_map<size_t, std::vector<uint32_t>> bins;
  for (uint32_t i = 0; i < cloud.points.size(); ++i) {
    const size_t bin = static_cast<size_t>(cloud.points[i].range() / params.bin_width);
    bins[bin].push_back(i);
  }

  std::vector<char> keep(cloud.points.size(), 1);
  const uint64_t frame_hash = fnv1a(cloud.frame_id);
  for (auto& [bin, members] : bins) {
    const double growth = static_cast<double>(1 + bin) * static_cast<double>(1 + bin);
    const double cap_d = static_cast<double>(params.density_reference) * growth;
    const size_t cap = cap_d >= static_cast<double>(members.size())
                           ? members.size()
                           : static_cast<size_t>(cap_d);
    if (members.size() <= cap) continue;
    Rng rng(mix_seed(mix_seed(params.seed, frame_hash), bin));
    for (uint32_t idx : members) keep[idx] = 0;
    for (uint32_t idx : sample_positions(members, cap, rng)) keep[idx] = 1;
  }

  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.points.reserve(cloud.points.size());
  for (uint32_t i = 0; i < cloud.points.size(); ++i) {
    if (keep[i]) out.points.push_back(cloud.points[i]);
  }
  return out;
}

namespace {

constexpr int kTermsForDegree[3] = {1, 3, 6};

void surface_terms(double x, double y, double terms[6]) {
  terms[0] = 1.0;
  terms[1] = x;
  terms[2] = y;
  terms[3] = x * x;
  terms[4] = x * y;
  terms[5] = y * y;
}

int64_t cell_key(double x, double y, double step) {
  const auto ix = static_cast<int64_t>(std::floor(x / step));
  const auto iy = static_cast<int64_t>(std::floor(y / step));
  return (ix << 32) ^ (iy & 0xffffffffLL);
}

}  // namespace

bool fit_polynomial_surface(const std::vector<Point3>& points,
                            const std::vector<uint32_t>& indices, int degree,
                            std::array<double, 6>& coeffs) {
  coeffs.fill(0.0);
  if (degree < 0 || degree > 2) throw_argument("surface degree must be 0, 1 or 2");
  const int m = kTermsForDegree[degree];
  if (indices.size() < static_cast<size_t>(m)) return false;

  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
  double terms[6];
  for (uint32_t idx : indices) {
    const Point3& p = points[idx];
    surface_terms(p.x, p.y, terms);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) ata(i, j) += terms[i] * terms[j];
      atb(i) += terms[i] * static_cast<double>(p.z);
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) ata(i, j) = ata(j, i);
  }

  // Column equilibration before the solve; the quadratic terms grow like
  // range^2 and make the raw normal matrix needlessly ill-conditioned.
  // Exact algebra: coefficients are mapped back to the raw basis afterwards.
  Eigen::Matrix<double, 6, 1> scale = Eigen::Matrix<double, 6, 1>::Ones();
  for (int i = 0; i < m; ++i) {
    const double d = std::sqrt(ata(i, i));
    if (d > 0.0) scale(i) = 1.0 / d;
  }
  Eigen::MatrixXd a = (scale.head(m).asDiagonal() * ata.topLeftCorner(m, m) *
                       scale.head(m).asDiagonal());
  Eigen::VectorXd b = scale.head(m).asDiagonal() * atb.head(m);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  if (lu.rank() < m) return false;

  const Eigen::VectorXd sol = lu.solve(b);
  for (int i = 0; i < m; ++i) coeffs[static_cast<size_t>(i)] = sol(i) * scale(i);
  return true;
}

GroundExtraction extract_ground(const PointCloud& cloud, const GroundParams& params) {
  if (!(params.grid_step > 0.0) || !(params.seed_band >= 0.0) ||
      !(params.removal_band >= 0.0)) {
    throw_argument("extract_ground: invalid parameters");
  }

  GroundExtraction result;
  result.model.grid_step = params.grid_step;
  result.model.seed_band = params.seed_band;
  result.model.removal_band = params.removal_band;

  if (cloud.empty()) {
    result.model.degenerate_fallback = true;
    return result;
  }

  // Per occupied x-y cell keep the lowest point as the floor seed.
  struct Seed {
    float z;
    int64_t ix;
    int64_t iy;
  };
  std::unordered_map<int64_t, Seed> seeds;
  seeds.reserve(cloud.size() / 4);
  for (const Point3& p : cloud.points) {
    const int64_t key = cell_key(p.x, p.y, params.grid_step);
    auto [it, inserted] = seeds.try_emplace(
        key, Seed{p.z, static_cast<int64_t>(std::floor(p.x / params.grid_step)),
                  static_cast<int64_t>(std::floor(p.y / params.grid_step))});
    if (!inserted && p.z < it->second.z) it->second.z = p.z;
  }

  // Points close above their cell's seed are counted as floor points.
  std::vector<uint32_t> floor_set;
  floor_set.reserve(cloud.size() / 2);
  for (uint32_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    const Seed& s = seeds.at(cell_key(p.x, p.y, params.grid_step));
    if (std::abs(static_cast<double>(p.z) - static_cast<double>(s.z)) <=
        params.seed_band) {
      floor_set.push_back(i);
    }
  }
  result.floor_set_size = floor_set.size();

  // Degenerate geometry check: the fit needs spread in both axes.
  std::vector<int64_t> xs, ys;
  xs.reserve(seeds.size());
  ys.reserve(seeds.size());
  for (const auto& [key, s] : seeds) {
    xs.push_back(s.ix);
    ys.push_back(s.iy);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const bool spread_ok =
      std::unique(xs.begin(), xs.end()) - xs.begin() >= 2 &&
      std::unique(ys.begin(), ys.end()) - ys.begin() >= 2 &&
      floor_set.size() >= 6;

  bool fitted = false;
  if (spread_ok) {
    fitted = fit_polynomial_surface(cloud.points, floor_set, 2, result.model.coeffs);
  }
  if (!fitted) {
    // Horizontal plane at the median seed height.
    std::vector<float> seed_z;
    seed_z.reserve(seeds.size());
    for (const auto& [key, s] : seeds) seed_z.push_back(s.z);
    std::sort(seed_z.begin(), seed_z.end());
    result.model.coeffs.fill(0.0);
    result.model.coeffs[0] = seed_z[(seed_z.size() - 1) / 2];
    result.model.degenerate_fallback = true;
  }

  for (uint32_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    const double surface = result.model.eval(p.x, p.y);
    if (std::abs(static_cast<double>(p.z) - surface) <= params.removal_band) {
      result.ground_indices.push_back(i);
    }
  }
  return result;
}

RemovalResult remove_ground(const PointCloud& cloud,
                            const std::vector<uint32_t>& ground_indices) {
  std::vector<char> is_ground(cloud.size(), 0);
  for (uint32_t idx : ground_indices) {
    if (idx >= cloud.size()) {
      throw_argument("remove_ground: index " + std::to_string(idx) +
                     " out of range for cloud of size " + std::to_string(cloud.size()));
    }
    is_ground[idx] = 1;
  }

  RemovalResult out;
  out.cloud.frame_id = cloud.frame_id;
  out.old_to_new.assign(cloud.size(), -1);
  out.cloud.points.reserve(cloud.size());
  for (uint32_t i = 0; i < cloud.size(); ++i) {
    if (is_ground[i]) continue;
    out.old_to_new[i] = static_cast<int32_t>(out.cloud.points.size());
    out.cloud.points.push_back(cloud.points[i]);
  }
  return out;
}

}  // namespace lrp
