#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lsgd/detection_log.hpp"
#include "lsgd/error.hpp"
#include "lsgd/fixture.hpp"
#include "lsgd/pipeline.hpp"
#include "test_support.hpp"

using namespace lsgd;

namespace {

SegmentationConfig seg_cfg(int sp) {
  SegmentationConfig c;
  c.sp = sp;
  return c;
}

PipelineConfig pipe_cfg(RetrievalMode mode, int gap, int top_n = 10) {
  PipelineConfig c;
  c.mode = mode;
  c.temporal_gap = gap;
  c.top_n = top_n;
  return c;
}

std::vector<GrayImage> distinct_frames(std::uint64_t seed, int count) {
  Lcg64 rng(seed);
  std::vector<GrayImage> frames;
  for (int i = 0; i < count; ++i) frames.push_back(smooth_random_field(rng, 48, 48, 6));
  return frames;
}

}  // namespace

TEST_CASE("first frame has no candidates and founds node 1") {
  LoopDetector det(seg_cfg(16), pipe_cfg(RetrievalMode::DynamicNodes, 0));
  const auto r = det.process_frame(GrayImage(48, 48, 5), FrameId{0});
  CHECK_FALSE(r.match.has_value());
  CHECK(r.ranked.empty());
  CHECK(r.score.value == 0.0);
  CHECK(r.node_id == 1u);
  CHECK(r.created_new);
  CHECK(det.database().nodes().size() == 1);
}

TEST_CASE("identical frames with gap 0 match with score 1") {
  LoopDetector det(seg_cfg(16), pipe_cfg(RetrievalMode::Exhaustive, 0));
  const auto img = distinct_frames(3, 1).front();
  for (std::uint32_t i = 0; i < 6; ++i) {
    const auto r = det.process_frame(img, FrameId{i});
    if (i == 0) {
      CHECK_FALSE(r.match.has_value());
      continue;
    }
    REQUIRE(r.match.has_value());
    CHECK(r.match->index < i);
    CHECK(r.score.value == 1.0);
    // Ties go to the oldest frame.
    CHECK(r.match->index == 0);
    CHECK(r.ranked.size() == i);
  }
}

TEST_CASE("a repeat of frame 3 after 20 distinct frames matches frame 3") {
  auto frames = distinct_frames(4, 20);
  frames.push_back(frames[3]);
  LoopDetector det(seg_cfg(16), pipe_cfg(RetrievalMode::Exhaustive, 5));
  std::vector<DetectionResult> results;
  for (std::uint32_t i = 0; i < frames.size(); ++i) results.push_back(det.process_frame(frames[i], FrameId{i}));
  const auto& last = results.back();
  REQUIRE(last.match.has_value());
  CHECK(last.match->index == 3);
  CHECK(last.score.value == 1.0);
  CHECK(last.ranked.front().frame == FrameId{3});
  // Brute-force: frame 3 is the unique maximum among eligible frames.
  const auto q = extract_lsgd(frames[3], segment(frames[3], seg_cfg(16)));
  for (std::uint32_t j = 0; j + 5 < 20; ++j) {
    if (j == 3) continue;
    const auto d = extract_lsgd(frames[j], segment(frames[j], seg_cfg(16)));
    CHECK(sim_score(q, d).value < 1.0);
  }
}

TEST_CASE("exhaustive_query examples") {
  std::mt19937 rng(61);
  const auto q = test::random_lsgd(rng, 2, 2, 300);
  CHECK(exhaustive_query({}, q, 10).empty());
  const std::vector<FrameDescriptor> one{{FrameId{7}, std::make_shared<const Lsgd>(q)}};
  const auto r = exhaustive_query(one, q, 10);
  REQUIRE(r.size() == 1);
  CHECK(r[0].frame == FrameId{7});
  CHECK(r[0].score.value == 1.0);
}

TEST_CASE("exhaustive_query equals a brute-force double loop") {
  std::mt19937 rng(62);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<FrameDescriptor> history;
    const int n = 10 + rep;
    for (int i = 0; i < n; ++i) {
      // Duplicates create score ties that exercise the tie rule.
      auto d = (i % 4 == 3) ? *history[static_cast<std::size_t>(i - 2)].descriptor
                            : test::random_lsgd(rng, 2, 2, 60);
      history.push_back({FrameId{static_cast<std::uint32_t>(i * 3)}, std::make_shared<const Lsgd>(std::move(d))});
    }
    const auto q = test::random_lsgd(rng, 2, 2, 60);
    for (const int top_n : {1, 3, 10, 100}) {
      const auto got = exhaustive_query(history, q, top_n);
      const auto want = test::brute_force_ranking(history, q, top_n);
      CHECK(test::frame_ids(got) == test::frame_ids(want));
      CHECK(got == want);
    }
  }
}

TEST_CASE("rank_candidates orders by score then older frame") {
  std::vector<ScoredFrame> c{{FrameId{5}, SimScore{0.5}}, {FrameId{2}, SimScore{0.9}},
                             {FrameId{1}, SimScore{0.5}}, {FrameId{9}, SimScore{0.9}}};
  rank_candidates(c, 3);
  REQUIRE(c.size() == 3);
  CHECK(c[0].frame == FrameId{2});
  CHECK(c[1].frame == FrameId{9});
  CHECK(c[2].frame == FrameId{1});
}

TEST_CASE("temporal gating, self-exclusion and timing hold in both modes") {
  FixtureParams p;
  p.frames = 60;
  p.revisits = 10;
  p.noise = 6;
  p.cluster_size = 5;
  p.width = 48;
  p.height = 48;
  p.seed = 9;
  const auto fx = generate_fixture(p);
  for (const auto mode : {RetrievalMode::Exhaustive, RetrievalMode::DynamicNodes}) {
    for (const int gap : {0, 7, 30}) {
      auto cfg = pipe_cfg(mode, gap, 5);
      cfg.alpha = 0.5;
      cfg.beta = 0.5;
      LoopDetector det(seg_cfg(12), cfg);
      for (std::uint32_t i = 0; i < fx.images.size(); ++i) {
        const auto r = det.process_frame(fx.images[i], FrameId{i});
        CHECK(r.ranked.size() <= 5);
        for (const auto& c : r.ranked) {
          CHECK(static_cast<std::int64_t>(c.frame.index) + gap < static_cast<std::int64_t>(i));
          CHECK(c.frame != r.query);
        }
        for (std::size_t k = 1; k < r.ranked.size(); ++k) {
          const auto& a = r.ranked[k - 1];
          const auto& b = r.ranked[k];
          CHECK((a.score.value > b.score.value || (a.score.value == b.score.value && a.frame < b.frame)));
        }
        CHECK(r.match.has_value() == !r.ranked.empty());
        CHECK(r.elapsed_ms > 0.0);
        CHECK(std::isfinite(r.elapsed_ms));
        CHECK(r.retrieval_ms <= r.elapsed_ms);
        CHECK(r.node_id.has_value() == (mode == RetrievalMode::DynamicNodes));
      }
      if (mode == RetrievalMode::DynamicNodes) CHECK(det.database().frame_count() == fx.images.size());
    }
  }
}

TEST_CASE("exhaustive rankings equal the brute-force top-n of the eligible history") {
  const auto frames = distinct_frames(5, 40);
  LoopDetector det(seg_cfg(12), pipe_cfg(RetrievalMode::Exhaustive, 4, 6));
  std::vector<FrameDescriptor> all;
  for (std::uint32_t i = 0; i < frames.size(); ++i) {
    const auto r = det.process_frame(frames[i], FrameId{i});
    std::vector<FrameDescriptor> eligible;
    for (const auto& h : all) {
      if (h.frame.index + 4 < i) eligible.push_back(h);
    }
    const auto d = extract_lsgd(frames[i], segment(frames[i], seg_cfg(12)));
    CHECK(test::frame_ids(r.ranked) == test::frame_ids(test::brute_force_ranking(eligible, d, 6)));
    all.push_back({FrameId{i}, std::make_shared<const Lsgd>(d)});
  }
}

TEST_CASE("accept_threshold withholds weak matches") {
  auto frames = distinct_frames(6, 8);
  auto cfg = pipe_cfg(RetrievalMode::Exhaustive, 0);
  cfg.accept_threshold = 0.999;
  LoopDetector det(seg_cfg(16), cfg);
  for (std::uint32_t i = 0; i < frames.size(); ++i) {
    const auto r = det.process_frame(frames[i], FrameId{i});
    if (i > 0) {
      CHECK_FALSE(r.match.has_value());
      CHECK(r.score.value > 0.0);
    }
  }
  const auto r = det.process_frame(frames[2], FrameId{8});
  CHECK(r.match == FrameId{2});
}

TEST_CASE("nodes mode keeps in-gap frames as members but not candidates") {
  const auto img = distinct_frames(7, 1).front();
  auto cfg = pipe_cfg(RetrievalMode::DynamicNodes, 3);
  cfg.alpha = 0.5;
  cfg.beta = 0.5;
  LoopDetector det(seg_cfg(16), cfg);
  for (std::uint32_t i = 0; i < 6; ++i) {
    const auto r = det.process_frame(img, FrameId{i});
    CHECK(r.node_id == 1u);
    CHECK(r.ranked.size() == (i >= 4 ? i - 3 : 0));
  }
  CHECK(det.database().nodes().size() == 1);
  CHECK(det.database().nodes()[0].members.size() == 6);
}

TEST_CASE("frame size mismatch and id order are enforced") {
  LoopDetector det(seg_cfg(16), pipe_cfg(RetrievalMode::Exhaustive, 0));
  det.process_frame(GrayImage(48, 48, 1), FrameId{0});
  CHECK_THROWS_AS(det.process_frame(GrayImage(64, 48, 1), FrameId{1}), RunError);
  CHECK_THROWS_AS(det.process_frame(GrayImage(48, 48, 1), FrameId{0}), InputError);
  CHECK(det.history().size() == 1);
}

TEST_CASE("run_sequence equals a sequential process_frame loop") {
  FixtureParams p;
  p.frames = 70;
  p.revisits = 5;
  p.noise = 4;
  p.cluster_size = 7;
  p.width = 40;
  p.height = 40;
  const auto fx = generate_fixture(p);
  for (const auto mode : {RetrievalMode::Exhaustive, RetrievalMode::DynamicNodes}) {
    auto cfg = pipe_cfg(mode, 5);
    cfg.alpha = 0.5;
    cfg.beta = 0.5;
    LoopDetector a(seg_cfg(10), cfg);
    LoopDetector b(seg_cfg(10), cfg);
    std::size_t callbacks = 0;
    const auto batched = run_sequence(
        a, fx.images.size(), [&](std::size_t i) { return fx.images[i]; },
        [&](const DetectionResult&) { ++callbacks; });
    CHECK(callbacks == fx.images.size());
    for (std::uint32_t i = 0; i < fx.images.size(); ++i) {
      const auto r = b.process_frame(fx.images[i], FrameId{i});
      CHECK(format_row_untimed(to_row(r)) == format_row_untimed(to_row(batched[i])));
    }
    CHECK(a.database() == b.database());
  }
}

TEST_CASE("run_sequence propagates load failures") {
  LoopDetector det(seg_cfg(16), pipe_cfg(RetrievalMode::Exhaustive, 0));
  CHECK_THROWS_AS(run_sequence(det, 3,
                               [](std::size_t i) -> GrayImage {
                                 if (i == 1) throw LoadError("boom");
                                 return GrayImage(32, 32, 1);
                               }),
                  LoadError);
}

TEST_CASE("detection log round-trips") {
  std::vector<DetectionRow> rows(3);
  rows[0].query_id = 0;
  rows[1].query_id = 1;
  rows[1].match_id = 0;
  rows[1].score = 0.123456789;
  rows[1].elapsed_ms = 3.5;
  rows[1].node_id = 2;
  rows[1].created_new = false;
  rows[1].retrieval_ms = 0.25;
  rows[1].ranked = {{FrameId{0}, SimScore{0.123456789}}};
  rows[2].query_id = 5;
  rows[2].node_id = 3;
  rows[2].created_new = true;
  std::stringstream ss;
  write_detection_log(ss, rows);
  CHECK(ss.str().rfind(std::string(kDetectionLogHeader) + "\n", 0) == 0);
  const auto back = read_detection_log(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(format_row(back[i]) == format_row(rows[i]));
  CHECK(back[1].ranked == rows[1].ranked);
  CHECK(back[1].score == rows[1].score);
  CHECK_FALSE(back[0].match_id.has_value());
  CHECK(back[2].created_new == true);
}

TEST_CASE("detection log reader reports the failing line") {
  const std::string header = std::string(kDetectionLogHeader) + "\n";
  const auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return read_detection_log(ss, "log.csv");
  };
  CHECK_THROWS_WITH_AS(parse(header + "0,,0,1,,,0,\nx,,0,1,,,0,\n"), doctest::Contains("log.csv:3"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse(header + "0,,0,1,,,0\n"), doctest::Contains("log.csv:2"), ParseError);
  CHECK_THROWS_AS(parse(header + "1,,0,1,,,0,\n1,,0,1,,,0,\n"), ParseError);
  CHECK_THROWS_AS(parse(header + "1,,0,1,,,0,3:abc\n"), ParseError);
  CHECK_THROWS_AS(parse("wrong,header\n"), ParseError);
  CHECK(parse(header).empty());
}
