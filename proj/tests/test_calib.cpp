#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "calib.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using namespace lrp;

namespace {

fs::path write_calib_text(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("lrp_calib_" + name);
  std::ofstream out(p, std::ios::trunc);
  out << text;
  return p;
}

const char* kIdentityCalib =
    "P2: 1 0 0 0 0 1 0 0 0 0 1 0\n"
    "R0_rect: 1 0 0 0 1 0 0 0 1\n"
    "Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n";

CalibrationSet pinhole_f100() {
  Eigen::Matrix<double, 3, 4> p;
  p << 100, 0, 50, 0, 0, 100, 50, 0, 0, 0, 1, 0;
  return CalibrationSet(p, Eigen::Matrix3d::Identity(),
                        Eigen::Matrix<double, 3, 4>::Identity(), 1242, 375);
}

}  // namespace

TEST_CASE("parse_calib reads identity matrices") {
  const auto path = write_calib_text("identity.txt", kIdentityCalib);
  const CalibrationSet calib = parse_calib(path);
  CHECK(calib.p() == (Eigen::Matrix<double, 3, 4>() << 1, 0, 0, 0, 0, 1, 0, 0, 0,
                      0, 1, 0)
                         .finished());
  CHECK(calib.r_rect().isIdentity(0.0));
  CHECK(calib.image_width() == 1242);
  CHECK(calib.image_height() == 375);
  fs::remove(path);
}

TEST_CASE("parse_calib errors name the missing key and bad counts") {
  const auto missing = write_calib_text(
      "missing.txt", "P2: 1 0 0 0 0 1 0 0 0 0 1 0\nR0_rect: 1 0 0 0 1 0 0 0 1\n");
  CHECK_THROWS_WITH_AS(parse_calib(missing), doctest::Contains("Tr_velo_to_cam"),
                       Error);
  fs::remove(missing);

  const auto short_row = write_calib_text(
      "short.txt",
      "P2: 1 0 0 0 0 1 0 0 0 0 1\n"  // 11 values
      "R0_rect: 1 0 0 0 1 0 0 0 1\n"
      "Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  CHECK_THROWS_WITH_AS(parse_calib(short_row), doctest::Contains("P2"), Error);
  fs::remove(short_row);
}

TEST_CASE("parse_calib cross-checked against an independent text split") {
  // Real KITTI-style lines; the oracle below re-parses with bare string
  // streams and compares every matrix element.
  const std::string text =
      "P2: 7.215377e+02 0.000000e+00 6.095593e+02 4.485728e+01 0.000000e+00 "
      "7.215377e+02 1.728540e+02 2.163791e-01 0.000000e+00 0.000000e+00 "
      "1.000000e+00 2.745884e-03\n"
      "R0_rect: 9.999239e-01 9.837760e-03 -7.445048e-03 -9.869795e-03 "
      "9.999421e-01 -4.278459e-03 7.402527e-03 4.351614e-03 9.999631e-01\n"
      "Tr_velo_to_cam: 7.533745e-03 -9.999714e-01 -6.166020e-04 -4.069766e-03 "
      "1.480249e-02 7.280733e-04 -9.998902e-01 -7.631618e-02 9.998621e-01 "
      "7.523790e-03 1.480755e-02 -2.717806e-01\n";
  const auto path = write_calib_text("kitti.txt", text);
  const CalibrationSet calib = parse_calib(path);

  std::istringstream iss(text);
  std::string line;
  while (std::getline(iss, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (key == "P2:") {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) CHECK(calib.p()(i, j) == vals[i * 4 + j]);
    } else if (key == "R0_rect:") {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(calib.r_rect()(i, j) == vals[i * 3 + j]);
    } else if (key == "Tr_velo_to_cam:") {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j)
          CHECK(calib.t_velo_to_cam()(i, j) == vals[i * 4 + j]);
    }
  }
  fs::remove(path);
}

TEST_CASE("calib write/parse round trip preserves matrix values") {
  const CalibrationSet calib = synth_calib(1242, 375);
  const fs::path path = fs::temp_directory_path() / "lrp_calib_roundtrip.txt";
  write_calib(calib, path);
  const CalibrationSet re = parse_calib(path);
  CHECK((re.p() - calib.p()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((re.r_rect() - calib.r_rect()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((re.t_velo_to_cam() - calib.t_velo_to_cam()).cwiseAbs().maxCoeff() < 1e-12);
  fs::remove(path);
}

TEST_CASE("project: optical axis point and behind-camera rejection") {
  const CalibrationSet calib = pinhole_f100();
  const auto px = calib.project(Point3{0, 0, 10, 0});  // identity: z is depth
  REQUIRE(px.has_value());
  CHECK(px->u == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(px->v == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(px->depth == doctest::Approx(10.0));

  CHECK_FALSE(calib.project(Point3{0, 0, -1, 0}).has_value());
  CHECK_FALSE(calib.project(Point3{0.5, 0.5, 0, 0}).has_value());  // depth 0
}

TEST_CASE("project equals the hand-rolled matrix-chain oracle") {
  // Random valid calibrations: random intrinsics, a small random
  // rectification rotation, and a random-rotation extrinsic with offset.
  // Eigen only CONSTRUCTS the inputs; the oracle math is hand-rolled.
  Rng rng(424242);
  int in_front = 0;
  for (int calib_trial = 0; calib_trial < 20; ++calib_trial) {
    const double f = rng.uniform(300.0, 900.0);
    Eigen::Matrix<double, 3, 4> pm;
    pm << f, 0, rng.uniform(400.0, 800.0), rng.uniform(-50.0, 50.0),
          0, f, rng.uniform(100.0, 250.0), rng.uniform(-1.0, 1.0),
          0, 0, 1, rng.uniform(-0.01, 0.01);
    const Eigen::Vector3d axis =
        Eigen::Vector3d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                        rng.uniform(-1.0, 1.0))
            .normalized();
    const Eigen::Matrix3d rect =
        Eigen::AngleAxisd(rng.uniform(-0.02, 0.02), axis).toRotationMatrix();
    Eigen::Matrix3d axes;  // sensor x fwd / z up -> camera z fwd / y down
    axes << 0, -1, 0, 0, 0, -1, 1, 0, 0;
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(rng.uniform(-0.05, 0.05), axis).toRotationMatrix() * axes;
    Eigen::Matrix<double, 3, 4> tr;
    tr.leftCols<3>() = rot;
    tr.col(3) = Eigen::Vector3d(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                rng.uniform(-0.3, 0.3));
    const CalibrationSet calib(pm, rect, tr, 1242, 375);

    double p[12], r[9], t[12];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) p[i * 4 + j] = calib.p()(i, j);
      for (int j = 0; j < 3; ++j) r[i * 3 + j] = calib.r_rect()(i, j);
      for (int j = 0; j < 4; ++j) t[i * 4 + j] = calib.t_velo_to_cam()(i, j);
    }
    for (int trial = 0; trial < 50; ++trial) {
      const Point3 pt{static_cast<float>(rng.uniform(-40.0, 40.0)),
                      static_cast<float>(rng.uniform(-40.0, 40.0)),
                      static_cast<float>(rng.uniform(-5.0, 5.0)), 0.0f};
      const auto expected = oracle::project_chain(p, r, t, pt.x, pt.y, pt.z);
      const auto actual = calib.project(pt);
      REQUIRE(actual.has_value() == expected.in_front);
      if (!actual) continue;
      ++in_front;
      CHECK(actual->u == doctest::Approx(expected.u).epsilon(1e-9));
      CHECK(actual->v == doctest::Approx(expected.v).epsilon(1e-9));
      CHECK(actual->depth == doctest::Approx(expected.depth).epsilon(1e-9));
    }
  }
  CHECK(in_front > 200);  // the sample actually exercised the forward case
}

TEST_CASE("projection is scale-consistent along camera rays") {
  const CalibrationSet calib = pinhole_f100();
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(-5.0, 5.0);
    const double y = rng.uniform(-5.0, 5.0);
    const double z = rng.uniform(1.0, 30.0);
    const double lambda = rng.uniform(0.1, 8.0);
    const auto a = calib.project(Point3{static_cast<float>(x), static_cast<float>(y),
                                        static_cast<float>(z), 0});
    // Scale with doubles to avoid float rounding moving the point off-ray.
    const auto b = calib.project(Point3{static_cast<float>(x * lambda),
                                        static_cast<float>(y * lambda),
                                        static_cast<float>(z * lambda), 0});
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->u == doctest::Approx(b->u).epsilon(1e-4));
    CHECK(a->v == doctest::Approx(b->v).epsilon(1e-4));
  }
}

TEST_CASE("project_cluster_bbox: trivial and oracle cases") {
  const CalibrationSet calib = pinhole_f100();

  CHECK_THROWS_AS(project_cluster_bbox({}, calib), Error);

  // All points behind the camera.
  CHECK_FALSE(project_cluster_bbox({Point3{0, 0, -5, 0}, Point3{1, 1, -2, 0}}, calib)
                  .has_value());

  // Two points with known projections: (u,v) = (100*x/z + 50, 100*y/z + 50).
  {
    const std::vector<Point3> pts = {Point3{-4, -4, 10, 0}, Point3{-3, -1, 10, 0}};
    const auto box = project_cluster_bbox(pts, calib);
    REQUIRE(box.has_value());
    CHECK(box->left == doctest::Approx(10.0));
    CHECK(box->top == doctest::Approx(10.0));
    CHECK(box->right == doctest::Approx(20.0));
    CHECK(box->bottom == doctest::Approx(40.0));
  }

  // 100 random in-front points: box equals a naive per-point fold, and
  // contains the projection of every in-front point.
  Rng rng(5150);
  std::vector<Point3> pts;
  for (int i = 0; i < 100; ++i) {
    pts.push_back(Point3{static_cast<float>(rng.uniform(-3.0, 3.0)),
                         static_cast<float>(rng.uniform(-3.0, 3.0)),
                         static_cast<float>(rng.uniform(2.0, 30.0)), 0});
  }
  const auto box = project_cluster_bbox(pts, calib);
  REQUIRE(box.has_value());
  double l = 1e300, t = 1e300, r = -1e300, b = -1e300;
  for (const Point3& pt : pts) {
    const double u = 100.0 * pt.x / pt.z + 50.0;
    const double v = 100.0 * pt.y / pt.z + 50.0;
    l = std::min(l, u);
    r = std::max(r, u);
    t = std::min(t, v);
    b = std::max(b, v);
    CHECK(u >= box->left - 1e-9);
    CHECK(u <= box->right + 1e-9);
    CHECK(v >= box->top - 1e-9);
    CHECK(v <= box->bottom + 1e-9);
  }
  CHECK(box->left == doctest::Approx(l).epsilon(1e-9));
  CHECK(box->right == doctest::Approx(r).epsilon(1e-9));
  CHECK(box->top == doctest::Approx(t).epsilon(1e-9));
  CHECK(box->bottom == doctest::Approx(b).epsilon(1e-9));
}
