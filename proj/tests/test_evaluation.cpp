#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "error.hpp"
#include "evaluation.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;
using namespace lrp;

namespace {

Proposal make_proposal(double l, double t, double r, double b,
                       std::optional<double> score = std::nullopt) {
  Proposal p;
  p.bbox = BBox2D{l, t, r, b};
  p.score = score;
  return p;
}

GroundTruthLabel make_label(double l, double t, double r, double b,
                            double trunc = 0.0, int occ = 0) {
  GroundTruthLabel gt;
  gt.klass = "Pedestrian";
  gt.bbox = BBox2D{l, t, r, b};
  gt.truncation = trunc;
  gt.occlusion = occ;
  return gt;
}

}  // namespace

TEST_CASE("iou basics and rasterization oracle") {
  const BBox2D a{0, 0, 10, 10};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, BBox2D{20, 20, 30, 30}) == 0.0);
  CHECK(iou(a, BBox2D{5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0));
  CHECK(iou(a, BBox2D{5, 0, 15, 10}) ==
        doctest::Approx(oracle::raster_iou(0, 0, 10, 10, 5, 0, 15, 10)));

  Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const int al = static_cast<int>(rng.bounded(60)), at = static_cast<int>(rng.bounded(60));
    const int ar = al + 1 + static_cast<int>(rng.bounded(40));
    const int ab = at + 1 + static_cast<int>(rng.bounded(40));
    const int bl = static_cast<int>(rng.bounded(60)), bt = static_cast<int>(rng.bounded(60));
    const int br = bl + 1 + static_cast<int>(rng.bounded(40));
    const int bb = bt + 1 + static_cast<int>(rng.bounded(40));
    const BBox2D box_a{double(al), double(at), double(ar), double(ab)};
    const BBox2D box_b{double(bl), double(bt), double(br), double(bb)};
    CHECK(iou(box_a, box_b) ==
          doctest::Approx(oracle::raster_iou(al, at, ar, ab, bl, bt, br, bb))
              .epsilon(1e-9));
    CHECK(iou(box_a, box_b) == iou(box_b, box_a));
    CHECK(iou(box_a, box_b) >= 0.0);
    CHECK(iou(box_a, box_b) <= 1.0);
  }
}

TEST_CASE("parse_labels field positions and filters") {
  const fs::path path = fs::temp_directory_path() / "lrp_labels.txt";
  std::ofstream(path)
      << "Pedestrian 0.0 0 0.0 100 50 150 200 1.7 0.6 0.5 1 1 10 0.1\n"
      << "Car 0.0 0 0.0 300 120 420 250 1.5 1.7 4.1 2 1 20 0.0\n"
      << "DontCare -1 -1 -10 500 150 560 200 -1 -1 -1 -1000 -1000 -1000 -10\n";

  const LabelSet set = parse_labels(path);
  REQUIRE(set.labels.size() == 1);
  CHECK(set.labels[0].bbox.left == 100.0);
  CHECK(set.labels[0].bbox.top == 50.0);
  CHECK(set.labels[0].bbox.right == 150.0);
  CHECK(set.labels[0].bbox.bottom == 200.0);
  CHECK(set.labels[0].truncation == 0.0);
  CHECK(set.labels[0].occlusion == 0);
  CHECK(set.labels[0].height_px() == doctest::Approx(150.0));
  REQUIRE(set.dont_care.size() == 1);
  CHECK(set.dont_care[0].left == 500.0);

  const LabelSet cars = parse_labels(path, "Car");
  CHECK(cars.labels.size() == 1);
  fs::remove(path);
}

TEST_CASE("parse_labels: empty file, car-only file, short line") {
  const fs::path path = fs::temp_directory_path() / "lrp_labels2.txt";
  std::ofstream(path) << "";
  CHECK(parse_labels(path).labels.empty());

  std::ofstream(path) << "Car 0.0 0 0.0 1 2 3 4 1 1 1 0 0 0 0\n";
  CHECK(parse_labels(path).labels.empty());

  std::ofstream(path) << "Pedestrian 0.0 0\n";
  CHECK_THROWS_WITH_AS(parse_labels(path), doctest::Contains(":1"), Error);
  fs::remove(path);
}

TEST_CASE("difficulty tiers nest") {
  Rng rng(61);
  for (int i = 0; i < 500; ++i) {
    GroundTruthLabel gt = make_label(0, 0, 20, rng.uniform(5.0, 300.0),
                                     rng.uniform(0.0, 1.0),
                                     static_cast<int>(rng.bounded(4)));
    if (tier_easy().admits(gt)) CHECK(tier_moderate().admits(gt));
    if (tier_moderate().admits(gt)) CHECK(tier_hard().admits(gt));
  }
}

TEST_CASE("match: exact pair and duplicate-detection FP rule") {
  LabelSet labels;
  labels.labels.push_back(make_label(100, 100, 150, 220));

  SUBCASE("one exact proposal") {
    const std::vector<Proposal> proposals = {make_proposal(100, 100, 150, 220)};
    const MatchResult m = match(proposals, labels, 0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
    CHECK(m.label_match[0] == 0);
  }

  SUBCASE("two identical proposals on one label: second is FP") {
    const std::vector<Proposal> proposals = {make_proposal(100, 100, 150, 220),
                                             make_proposal(100, 100, 150, 220)};
    const MatchResult m = match(proposals, labels, 0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    CHECK(m.fn == 0);
  }

  SUBCASE("threshold is strict") {
    // IoU exactly 0.5 against the label must NOT match.
    labels.labels[0].bbox = BBox2D{0, 0, 10, 10};
    const std::vector<Proposal> proposals = {make_proposal(0, 0, 10, 5)};
    CHECK(iou(proposals[0].bbox, labels.labels[0].bbox) == doctest::Approx(0.5));
    const MatchResult m = match(proposals, labels, 0.5);
    CHECK(m.tp == 0);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
  }
}

TEST_CASE("match: DontCare overlap is ignored, not penalized") {
  LabelSet labels;
  labels.labels.push_back(make_label(100, 100, 150, 220));
  labels.dont_care.push_back(BBox2D{400, 100, 460, 220});

  const std::vector<Proposal> proposals = {
      make_proposal(100, 100, 150, 220),  // TP
      make_proposal(402, 102, 458, 218),  // inside DontCare: ignored
      make_proposal(700, 100, 760, 220),  // plain FP
  };
  const MatchResult m = match(proposals, labels, 0.5);
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);
  CHECK(m.fn == 0);
  CHECK(m.proposal_outcome[1] == ProposalOutcome::kIgnored);
}

TEST_CASE("match equals the independent greedy reference on small instances") {
  Rng rng(4242);
  for (int instance = 0; instance < 400; ++instance) {
    const size_t n_props = rng.bounded(4);
    const size_t n_labels = rng.bounded(3) + (n_props == 0 ? 1 : 0);
    std::vector<Proposal> proposals;
    std::vector<BBox2D> prop_boxes;
    LabelSet labels;
    std::vector<BBox2D> label_boxes;
    auto random_box = [&] {
      const double l = rng.uniform(0.0, 40.0);
      const double t = rng.uniform(0.0, 40.0);
      return BBox2D{l, t, l + rng.uniform(4.0, 30.0), t + rng.uniform(4.0, 30.0)};
    };
    for (size_t i = 0; i < n_props; ++i) {
      Proposal p;
      p.bbox = random_box();
      proposals.push_back(p);
      prop_boxes.push_back(p.bbox);
    }
    for (size_t i = 0; i < n_labels; ++i) {
      GroundTruthLabel gt = make_label(0, 0, 1, 1);
      gt.bbox = random_box();
      labels.labels.push_back(gt);
      label_boxes.push_back(gt.bbox);
    }
    const double threshold = rng.uniform(0.2, 0.7);
    const MatchResult m = match(proposals, labels, threshold);

    // The reference processes proposals in the same declared order:
    // descending best-IoU, ties by index.
    std::vector<size_t> order(proposals.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> key(proposals.size(), 0.0);
    for (size_t i = 0; i < proposals.size(); ++i) {
      for (const auto& lb : label_boxes) {
        key[i] = std::max(key[i], oracle::box_iou(prop_boxes[i], lb));
      }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return key[a] > key[b]; });
    const auto expected =
        oracle::greedy_match_reference(prop_boxes, order, label_boxes, threshold);
    CHECK(m.tp == expected.tp);
    CHECK(m.fp == expected.fp);
    CHECK(m.fn == expected.fn);

    // Structural invariants.
    CHECK(m.tp + m.fn == static_cast<int>(labels.labels.size()));
    CHECK(m.tp + m.fp == static_cast<int>(proposals.size()));
    CHECK(m.tp <= oracle::max_matching_tp(prop_boxes, label_boxes, threshold));
  }
}

TEST_CASE("max_recall coverage semantics") {
  FrameLabels labels;
  labels["000000"].labels.push_back(make_label(10, 10, 40, 80));
  labels["000000"].labels.push_back(make_label(100, 10, 130, 80));
  labels["000001"].labels.push_back(make_label(50, 50, 90, 140));

  SUBCASE("exact proposals cover everything") {
    FrameProposals proposals;
    for (const auto& [frame, set] : labels) {
      for (const auto& gt : set.labels) {
        Proposal p;
        p.bbox = gt.bbox;
        proposals[frame].push_back(p);
      }
    }
    const auto [missed, recall] = max_recall(proposals, labels, 0.5);
    CHECK(missed == 0);
    CHECK(recall == doctest::Approx(1.0));
  }

  SUBCASE("no proposals: recall 0, missed = label count") {
    const auto [missed, recall] = max_recall({}, labels, 0.5);
    CHECK(missed == 3);
    CHECK(recall == 0.0);
  }

  SUBCASE("coverage has no one-to-one constraint") {
    // One proposal overlapping both labels of frame 0 above threshold.
    FrameLabels close;
    close["f"].labels.push_back(make_label(0, 0, 100, 100));
    close["f"].labels.push_back(make_label(10, 0, 110, 100));
    FrameProposals proposals;
    proposals["f"].push_back(make_proposal(5, 0, 105, 100));
    const auto [missed, recall] = max_recall(proposals, close, 0.5);
    CHECK(missed == 0);
    CHECK(recall == doctest::Approx(1.0));
  }

  SUBCASE("matches a nested-loop oracle on random multi-frame input") {
    Rng rng(5000);
    FrameProposals proposals;
    FrameLabels rnd_labels;
    for (int f = 0; f < 10; ++f) {
      const std::string frame = "frame" + std::to_string(f);
      const size_t nl = 1 + rng.bounded(4);
      const size_t np = rng.bounded(6);
      for (size_t i = 0; i < nl; ++i) {
        const double l = rng.uniform(0.0, 200.0), t = rng.uniform(0.0, 100.0);
        rnd_labels[frame].labels.push_back(
            make_label(l, t, l + rng.uniform(10.0, 60.0), t + rng.uniform(10.0, 60.0)));
      }
      for (size_t i = 0; i < np; ++i) {
        const double l = rng.uniform(0.0, 200.0), t = rng.uniform(0.0, 100.0);
        proposals[frame].push_back(
            make_proposal(l, t, l + rng.uniform(10.0, 60.0), t + rng.uniform(10.0, 60.0)));
      }
    }
    const double threshold = 0.35;
    int expected_missed = 0, expected_total = 0;
    for (const auto& [frame, set] : rnd_labels) {
      for (const auto& gt : set.labels) {
        ++expected_total;
        bool covered = false;
        auto it = proposals.find(frame);
        if (it != proposals.end()) {
          for (const auto& p : it->second) {
            if (oracle::box_iou(p.bbox, gt.bbox) > threshold) covered = true;
          }
        }
        if (!covered) ++expected_missed;
      }
    }
    const auto [missed, recall] = max_recall(proposals, rnd_labels, threshold);
    CHECK(missed == expected_missed);
    CHECK(recall == doctest::Approx(1.0 - double(expected_missed) / expected_total));
  }
}

TEST_CASE("recall_curve shape and pointwise consistency") {
  FrameLabels labels;
  labels["a"].labels.push_back(make_label(0, 0, 100, 100));
  FrameProposals proposals;
  proposals["a"].push_back(make_proposal(0, 0, 100, 60));  // IoU 0.6

  const std::vector<double> thresholds = {0.3, 0.4, 0.5, 0.59, 0.6, 0.7};
  const auto curve = recall_curve(proposals, labels, thresholds);
  REQUIRE(curve.size() == thresholds.size());
  for (size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].second ==
          doctest::Approx(max_recall(proposals, labels, thresholds[i]).second));
    if (i > 0) CHECK(curve[i].second <= curve[i - 1].second + 1e-12);
  }
  CHECK(curve[0].second == doctest::Approx(1.0));   // 0.3 < 0.6
  CHECK(curve[3].second == doctest::Approx(1.0));   // 0.59 < 0.6
  CHECK(curve[4].second == doctest::Approx(0.0));   // strict at 0.6
  CHECK_THROWS_AS(recall_curve(proposals, labels, {0.5, 0.4}), Error);
}

TEST_CASE("average_precision reference cases") {
  SUBCASE("perfect detector gives AP 1") {
    FrameLabels labels;
    FrameProposals proposals;
    for (int f = 0; f < 3; ++f) {
      const std::string frame = "f" + std::to_string(f);
      for (int i = 0; i < 2; ++i) {
        const double l = 10 + 80.0 * i;
        GroundTruthLabel gt = make_label(l, 10, l + 30, 110);
        labels[frame].labels.push_back(gt);
        proposals[frame].push_back(make_proposal(l, 10, l + 30, 110, 1.0));
      }
    }
    CHECK(average_precision(proposals, labels, tier_hard(), 0.5) ==
          doctest::Approx(1.0));
  }

  SUBCASE("zero true positives give AP 0") {
    FrameLabels labels;
    labels["f"].labels.push_back(make_label(0, 0, 50, 100));
    FrameProposals proposals;
    proposals["f"].push_back(make_proposal(500, 0, 550, 100, 0.9));
    CHECK(average_precision(proposals, labels, tier_hard(), 0.5) == 0.0);
  }

  SUBCASE("hand-computed 11-point case: T F T F T over 3 labels") {
    // Labels far apart; proposals alternate exact hits and misses with
    // descending scores. Expected AP = 8.4/11 (independent derivation in
    // scripts and by hand: precisions 1, 1/2, 2/3, 1/2, 3/5 at recalls
    // 1/3, 1/3, 2/3, 2/3, 1).
    FrameLabels labels;
    FrameProposals proposals;
    for (int i = 0; i < 3; ++i) {
      const double l = 200.0 * i;
      labels["f"].labels.push_back(make_label(l, 10, l + 40, 130));
      proposals["f"].push_back(make_proposal(l, 10, l + 40, 130, 0.9 - 0.2 * i));
    }
    proposals["f"].push_back(make_proposal(900, 10, 940, 130, 0.8));
    proposals["f"].push_back(make_proposal(1100, 10, 1140, 130, 0.6));
    const double ap = average_precision(proposals, labels, tier_hard(), 0.5);
    CHECK(ap == doctest::Approx(8.4 / 11.0).epsilon(1e-12));
  }

  SUBCASE("AP is invariant under monotone score rescaling") {
    Rng rng(8080);
    FrameLabels labels;
    FrameProposals proposals;
    for (int f = 0; f < 4; ++f) {
      const std::string frame = "f" + std::to_string(f);
      for (int i = 0; i < 3; ++i) {
        const double l = rng.uniform(0.0, 800.0);
        labels[frame].labels.push_back(make_label(l, 10, l + 35, 120));
        if (rng.uniform() < 0.8) {
          proposals[frame].push_back(
              make_proposal(l + rng.uniform(-5.0, 5.0), 10, l + 35, 120,
                            rng.uniform(0.1, 0.9)));
        }
      }
      proposals[frame].push_back(
          make_proposal(rng.uniform(0.0, 900.0), 10, rng.uniform(900.0, 950.0), 120,
                        rng.uniform(0.1, 0.9)));
    }
    const double base = average_precision(proposals, labels, tier_hard(), 0.5);
    FrameProposals rescaled = proposals;
    for (auto& [frame, props] : rescaled) {
      for (auto& p : props) p.score = 0.1 + 3.0 * *p.score * *p.score;  // monotone on (0,1)
    }
    CHECK(average_precision(rescaled, labels, tier_hard(), 0.5) ==
          doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("missing scores are an argument error") {
    FrameLabels labels;
    labels["f"].labels.push_back(make_label(0, 0, 50, 100));
    FrameProposals proposals;
    proposals["f"].push_back(make_proposal(0, 0, 50, 100));
    CHECK_THROWS_WITH_AS(average_precision(proposals, labels, tier_hard(), 0.5),
                         doctest::Contains("score file"), Error);
  }
}

TEST_CASE("evaluate + report serialization") {
  FrameLabels labels;
  labels["000000"].labels.push_back(make_label(10, 10, 50, 120));
  FrameProposals proposals;
  proposals["000000"].push_back(make_proposal(10, 10, 50, 120, 0.9));

  const EvalReport report = evaluate(proposals, labels, 0.5, true);
  CHECK(report.frames == 1);
  CHECK(report.max_recall == doctest::Approx(1.0));
  CHECK(report.missed_labels == 0);
  CHECK(report.region_count_mean == doctest::Approx(1.0));
  REQUIRE(report.recall_curve.size() == 13);
  CHECK(report.recall_curve.front().first == doctest::Approx(0.30));
  CHECK(report.recall_curve.back().first == doctest::Approx(0.90));
  REQUIRE(report.ap_easy.has_value());
  CHECK(*report.ap_easy == doctest::Approx(1.0));

  const std::string json = report.to_json();
  CHECK(json.find("\"max_recall\"") != std::string::npos);
  CHECK(json.find("\"ap\"") != std::string::npos);
  const std::string csv = report.to_csv();
  CHECK(csv.find("max_recall,1.000000") != std::string::npos);
  CHECK(csv.find("recall_at_0.50,") != std::string::npos);
  const std::string curve = report.curve_csv();
  CHECK(curve.rfind("threshold,recall", 0) == 0);
}

TEST_CASE("apply_score_file attaches and validates scores") {
  FrameProposals proposals;
  proposals["000000"].push_back(make_proposal(0, 0, 10, 10));
  proposals["000000"].push_back(make_proposal(5, 5, 15, 15));

  const fs::path path = fs::temp_directory_path() / "lrp_scores.txt";

  SUBCASE("full coverage applies cleanly") {
    std::ofstream(path) << "000000 0 0.75\n000000 1 0.25\n";
    apply_score_file(path, proposals);
    CHECK(proposals["000000"][0].score.value() == doctest::Approx(0.75));
    CHECK(proposals["000000"][1].score.value() == doctest::Approx(0.25));
  }

  SUBCASE("unknown frame is a data error") {
    std::ofstream(path) << "000099 0 0.5\n";
    CHECK_THROWS_WITH_AS(apply_score_file(path, proposals),
                         doctest::Contains("unknown frame"), Error);
  }

  SUBCASE("short coverage is an argument error") {
    std::ofstream(path) << "000000 0 0.5\n";
    CHECK_THROWS_WITH_AS(apply_score_file(path, proposals),
                         doctest::Contains("unscored"), Error);
  }

  SUBCASE("bad index is a data error") {
    std::ofstream(path) << "000000 7 0.5\n";
    CHECK_THROWS_WITH_AS(apply_score_file(path, proposals),
                         doctest::Contains("out of range"), Error);
  }
  fs::remove(path);
}
