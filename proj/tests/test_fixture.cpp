#include <doctest.h>

#include "lsgd/dataset.hpp"
#include "lsgd/error.hpp"
#include "lsgd/fixture.hpp"
#include "test_support.hpp"

using namespace lsgd;

TEST_CASE("Lcg64 reproduces the documented stream") {
  // Reference values computed with arbitrary-precision integer arithmetic.
  Lcg64 rng(1);
  CHECK(rng.next_u32() == 1817669548u);
  CHECK(rng.next_u32() == 2187888307u);
  CHECK(rng.next_u32() == 2784682393u);
  CHECK(rng.next_u32() == 1644385741u);
  Lcg64 bounded(42);
  CHECK(bounded.uniform(1000) == 568u);
  CHECK(bounded.uniform(1000) == 225u);
  CHECK(bounded.uniform(1000) == 412u);
  CHECK(bounded.uniform(1000) == 630u);
}

TEST_CASE("uniform_int stays within bounds") {
  Lcg64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const int v = rng.uniform_int(-8, 8);
    CHECK(v >= -8);
    CHECK(v <= 8);
  }
}

TEST_CASE("fixture without revisits has empty ground truth") {
  FixtureParams p;
  p.frames = 10;
  const auto fx = generate_fixture(p);
  CHECK(fx.images.size() == 10);
  CHECK(fx.ground_truth.positives.empty());
  CHECK(fx.revisits.empty());
}

TEST_CASE("exact revisits copy their sources") {
  FixtureParams p;
  p.frames = 20;
  p.revisits = 5;
  const auto fx = generate_fixture(p);
  CHECK(fx.images.size() == 25);
  CHECK(fx.ground_truth.positives.size() == 5);
  for (const auto& [q, s] : fx.revisits) {
    CHECK(q >= 20);
    CHECK(s < 20);
    CHECK(fx.images[q] == fx.images[s]);
    CHECK(fx.ground_truth.positives.count({s, q}) == 1);
  }
}

TEST_CASE("noisy revisits differ from sources by at most the noise amplitude") {
  FixtureParams p;
  p.frames = 20;
  p.revisits = 5;
  p.noise = 8;
  const auto fx = generate_fixture(p);
  int max_diff = 0;
  for (const auto& [q, s] : fx.revisits) {
    const auto a = fx.images[q].pixels();
    const auto b = fx.images[s].pixels();
    CHECK(a.size() == b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int d = std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i]));
      max_diff = std::max(max_diff, d);
      differs |= d != 0;
    }
    CHECK(differs);
  }
  CHECK(max_diff <= 8);
  CHECK(max_diff > 0);
}

TEST_CASE("min_gap keeps revisit sources old enough") {
  FixtureParams p;
  p.frames = 100;
  p.revisits = 30;
  p.min_gap = 50;
  const auto fx = generate_fixture(p);
  for (const auto& [q, s] : fx.revisits) CHECK(s + 50 < q);
  p.frames = 10;
  p.revisits = 1;
  p.min_gap = 10;
  CHECK_THROWS_AS(generate_fixture(p), ConfigError);
}

TEST_CASE("clustered scenes share a base field") {
  FixtureParams p;
  p.frames = 30;
  p.cluster_size = 10;
  p.cluster_noise = 3;
  const auto fx = generate_fixture(p);
  for (int c = 0; c < 3; ++c) {
    const auto a = fx.images[static_cast<std::size_t>(c * 10)].pixels();
    const auto b = fx.images[static_cast<std::size_t>(c * 10 + 9)].pixels();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(int(a[i]) - int(b[i])) <= 6);
  }
}

TEST_CASE("fixtures are seed-deterministic") {
  FixtureParams p;
  p.frames = 15;
  p.revisits = 4;
  p.noise = 5;
  p.seed = 99;
  const auto a = generate_fixture(p);
  const auto b = generate_fixture(p);
  CHECK(a.images == b.images);
  CHECK(a.ground_truth == b.ground_truth);
  p.seed = 100;
  CHECK(generate_fixture(p).images != a.images);
}

TEST_CASE("smooth fields interpolate their control grid") {
  Lcg64 rng(5);
  const auto img = smooth_random_field(rng, 64, 64, 8);
  // Neighbouring pixels differ by a bounded step of the bilinear ramp.
  for (int y = 0; y < 64; ++y) {
    for (int x = 1; x < 64; ++x) CHECK(std::abs(int(img.at(x, y)) - int(img.at(x - 1, y))) <= 30);
  }
}

TEST_CASE("invalid fixture parameters") {
  FixtureParams p;
  p.frames = 0;
  CHECK_THROWS_AS(generate_fixture(p), ConfigError);
  p = {};
  p.noise = 300;
  CHECK_THROWS_AS(generate_fixture(p), ConfigError);
  p = {};
  p.cluster_size = 0;
  CHECK_THROWS_AS(generate_fixture(p), ConfigError);
  p = {};
  p.revisits = -1;
  CHECK_THROWS_AS(generate_fixture(p), ConfigError);
}

TEST_CASE("write_fixture lays out the dataset") {
  FixtureParams p;
  p.frames = 12;
  p.revisits = 3;
  p.noise = 2;
  const auto fx = generate_fixture(p);
  test::TempDir dir;
  write_fixture(fx, dir.path());
  const auto m = load_sequence(dir.path());
  REQUIRE(m.size() == 15);
  CHECK(m.frames[14].second.filename() == "000014.png");
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(load_frame(m, i) == fx.images[i]);
  CHECK(load_ground_truth(dir.path() / "ground_truth.csv") == fx.ground_truth);
}
