#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "config.hpp"
#include "error.hpp"

namespace fs = std::filesystem;
using namespace lrp;

TEST_CASE("config defaults validate and serialize round trip") {
  PipelineConfig config;
  config.validate();

  const std::string text = config.serialize();
  const PipelineConfig reparsed = parse_config_text(text, "inline");
  CHECK(reparsed.serialize() == text);
  CHECK(reparsed.pipeline.dbscan.eps == config.pipeline.dbscan.eps);
  CHECK(reparsed.sliding.heights == config.sliding.heights);
  CHECK(reparsed.eval_class_filter == config.eval_class_filter);
}

TEST_CASE("config parsing: comments, overrides, and errors") {
  const std::string text =
      "# pipeline tuning\n"
      "seed = 9\n"
      "dbscan.eps = 0.8   # wider neighborhoods\n"
      "sliding.heights = 40 60 90\n"
      "\n";
  const PipelineConfig config = parse_config_text(text, "inline");
  CHECK(config.seed == 9);
  CHECK(config.pipeline.downsample.seed == 9);
  CHECK(config.pipeline.dbscan.eps == doctest::Approx(0.8));
  CHECK(config.sliding.heights == std::vector<double>{40, 60, 90});

  CHECK_THROWS_WITH_AS(parse_config_text("bogus.key = 1\n", "inline"),
                       doctest::Contains("unknown config key"), Error);
  CHECK_THROWS_WITH_AS(parse_config_text("dbscan.eps 0.5\n", "inline"),
                       doctest::Contains("expected `key = value`"), Error);
  CHECK_THROWS_WITH_AS(parse_config_text("dbscan.eps = fast\n", "inline"),
                       doctest::Contains("not a number"), Error);
}

TEST_CASE("config rejects values violating module invariants") {
  CHECK_THROWS_AS(parse_config_text("dbscan.eps = 0\n", "inline"), Error);
  CHECK_THROWS_AS(parse_config_text("dbscan.min_pts = 0\n", "inline"), Error);
  CHECK_THROWS_AS(parse_config_text("downsample.density_reference = 0\n", "inline"),
                  Error);
  CHECK_THROWS_AS(parse_config_text("sliding.stride_x = 1.5\n", "inline"), Error);
  CHECK_THROWS_AS(parse_config_text("sliding.heights = 60 40\n", "inline"), Error);
  CHECK_THROWS_AS(parse_config_text("eval.iou_threshold = 1.0\n", "inline"), Error);
  CHECK_THROWS_AS(
      parse_config_text("validate.dx_min = 0.9\nvalidate.dx_max = 0.2\n", "inline"),
      Error);
}

TEST_CASE("config file I/O") {
  const fs::path path = fs::temp_directory_path() / "lrp_config.cfg";
  PipelineConfig config;
  config.set("aspect.ratio", "0.47");
  config.set("dataset.image_width", "640");
  write_config(config, path);

  const PipelineConfig loaded = parse_config(path);
  CHECK(loaded.pipeline.aspect_ratio == doctest::Approx(0.47));
  CHECK(loaded.image_width == 640);
  CHECK(loaded.serialize() == config.serialize());
  fs::remove(path);

  CHECK_THROWS_AS(parse_config(fs::temp_directory_path() / "lrp_nope.cfg"), Error);
}

TEST_CASE("config get/set by key") {
  PipelineConfig config;
  config.set("ground.seed_band", "0.25");
  CHECK(config.get("ground.seed_band") == "0.25");
  CHECK_THROWS_AS(config.get("nope"), Error);
  CHECK(PipelineConfig::known_keys().size() >= 20);
}
