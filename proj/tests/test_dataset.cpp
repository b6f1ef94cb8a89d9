#include <doctest.h>

#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <random>
#include <sstream>

#include "lsgd/dataset.hpp"
#include "lsgd/error.hpp"
#include "lsgd/fixture.hpp"
#include "test_support.hpp"

using namespace lsgd;
namespace fs = std::filesystem;

namespace {

GroundTruth parse_csv(const std::string& text, std::optional<std::size_t> frames = std::nullopt) {
  std::stringstream ss(text);
  return parse_ground_truth_csv(ss, "gt.csv", frames);
}

GroundTruth parse_matrix(const std::string& text) {
  std::stringstream ss(text);
  return parse_ground_truth_matrix(ss, "gt.txt");
}

void touch(const fs::path& p, const std::string& text = "") {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("load_sequence orders frames by numeric stem") {
  test::TempDir dir;
  for (const int i : {2, 0, 1}) write_png(dir.path() / ("00000" + std::to_string(i) + ".png"), GrayImage(8, 6, static_cast<std::uint8_t>(i)));
  const auto m = load_sequence(dir.path());
  REQUIRE(m.size() == 3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    CHECK(m.frames[i].first == FrameId{i});
    CHECK(load_frame(m, i).at(0, 0) == i);
  }
  CHECK(m.width == 8);
  CHECK(m.height == 6);
}

TEST_CASE("numeric order differs from lexicographic order") {
  test::TempDir dir;
  for (const int i : {10, 9, 100}) write_png(dir.path() / (std::to_string(i) + ".png"), GrayImage(4, 4, static_cast<std::uint8_t>(i)));
  const auto m = load_sequence(dir.path());
  REQUIRE(m.size() == 3);
  CHECK(load_frame(m, 0).at(0, 0) == 9);
  CHECK(load_frame(m, 1).at(0, 0) == 10);
  CHECK(load_frame(m, 2).at(0, 0) == 100);
}

TEST_CASE("single image directory") {
  test::TempDir dir;
  write_png(dir.path() / "000000.png", GrayImage(5, 7, 3));
  touch(dir.path() / "notes.txt", "ignored");
  const auto m = load_sequence(dir.path());
  CHECK(m.size() == 1);
  CHECK(m.width == 5);
  CHECK(m.height == 7);
}

TEST_CASE("generated 50-frame fixture loads as 64x64") {
  test::TempDir dir;
  FixtureParams p;
  p.frames = 50;
  write_fixture(generate_fixture(p), dir.path());
  const auto m = load_sequence(dir.path());
  CHECK(m.size() == 50);
  CHECK(m.width == 64);
  CHECK(m.height == 64);
}

TEST_CASE("load_sequence errors") {
  test::TempDir dir;
  CHECK_THROWS_AS(load_sequence(dir.path()), LoadError);
  CHECK_THROWS_AS(load_sequence(dir.path() / "missing"), LoadError);

  write_png(dir.path() / "000000.png", GrayImage(8, 8));
  write_png(dir.path() / "frame.png", GrayImage(8, 8));
  CHECK_THROWS_WITH_AS(load_sequence(dir.path()), doctest::Contains("not numeric"), LoadError);
  fs::remove(dir.path() / "frame.png");

  write_png(dir.path() / "0.png", GrayImage(8, 8));
  CHECK_THROWS_WITH_AS(load_sequence(dir.path()), doctest::Contains("duplicate"), LoadError);
  fs::remove(dir.path() / "0.png");

  write_png(dir.path() / "000001.png", GrayImage(9, 8));
  CHECK_THROWS_WITH_AS(load_sequence(dir.path()), doctest::Contains("mixed image dimensions"), LoadError);
  fs::remove(dir.path() / "000001.png");

  touch(dir.path() / "000001.png", "not a png");
  CHECK_THROWS_WITH_AS(load_sequence(dir.path()), doctest::Contains("cannot decode"), LoadError);
}

TEST_CASE("load_frame enforces dimensions of unsampled frames") {
  test::TempDir dir;
  for (int i = 0; i < 5; ++i) {
    write_png(dir.path() / ("00000" + std::to_string(i) + ".png"), GrayImage(i == 1 ? 7 : 8, 8));
  }
  const auto m = load_sequence(dir.path());  // samples frames 0, 2, 4
  CHECK_NOTHROW(load_frame(m, 0));
  CHECK_THROWS_AS(load_frame(m, 1), LoadError);
  CHECK_THROWS_AS(load_frame(m, 5), LoadError);
}

TEST_CASE("color images convert with BT.601, 16-bit images are rejected") {
  test::TempDir dir;
  cv::Mat bgr(1, 2, CV_8UC3);
  bgr.at<cv::Vec3b>(0, 0) = {200, 150, 100};  // B, G, R
  bgr.at<cv::Vec3b>(0, 1) = {255, 255, 255};
  cv::imwrite((dir.path() / "c.png").string(), bgr);
  const auto g = read_image(dir.path() / "c.png");
  CHECK(g.at(0, 0) == luma_bt601({100, 150, 200}));
  CHECK(g.at(1, 0) == 255);

  cv::Mat bgra(1, 1, CV_8UC4, cv::Scalar(200, 150, 100, 7));
  cv::imwrite((dir.path() / "a.png").string(), bgra);
  CHECK(read_image(dir.path() / "a.png").at(0, 0) == 141);

  cv::Mat deep(2, 2, CV_16UC1, cv::Scalar(1000));
  cv::imwrite((dir.path() / "d.png").string(), deep);
  CHECK_THROWS_WITH_AS(read_image(dir.path() / "d.png"), doctest::Contains("bit depth"), LoadError);
}

TEST_CASE("png write and read round-trip") {
  std::mt19937 rng(71);
  const auto img = test::random_image(rng, 13, 9);
  test::TempDir dir;
  write_png(dir.path() / "x.png", img);
  CHECK(read_image(dir.path() / "x.png") == img);
}

TEST_CASE("ground-truth csv pairs are order-normalized") {
  const auto gt = parse_csv("10,2\n30,5");
  using P = std::pair<std::uint32_t, std::uint32_t>;
  CHECK(gt.positives == std::set<P>{{2, 10}, {5, 30}});
  CHECK(gt.tolerance == 10);
  CHECK(parse_csv("a,b\n1,4\n").positives.size() == 1);
  CHECK(parse_csv("").positives.empty());
}

TEST_CASE("ground-truth matrix is symmetrized with the diagonal ignored") {
  CHECK(parse_matrix("1 0 0\n0 1 0\n0 0 1\n").positives.empty());
  const auto gt = parse_matrix("0 0 0 1\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
  using P = std::pair<std::uint32_t, std::uint32_t>;
  CHECK(gt.positives == std::set<P>{{0, 3}});
  CHECK(parse_matrix("0 0 0 0\n0 0 0 0\n0 0 0 0\n1 0 0 0\n").positives == gt.positives);
}

TEST_CASE("ground-truth parse errors") {
  CHECK_THROWS_WITH_AS(parse_csv("1,2\n3,3\n"), doctest::Contains("gt.csv:2"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,-2\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("1,2\nx,y\n"), ParseError);
  CHECK_THROWS_WITH_AS(parse_csv("1,20\n", 10), doctest::Contains("out of range"), ParseError);
  CHECK_THROWS_WITH_AS(parse_matrix("0 1\n1 0 0\n"), doctest::Contains("gt.txt:2"), ParseError);
  CHECK_THROWS_AS(parse_matrix("0 1 0\n1 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_matrix("0 2\n2 0\n"), ParseError);
}

TEST_CASE("load_ground_truth dispatches on extension") {
  test::TempDir dir;
  touch(dir.path() / "gt.csv", "3,1\n");
  touch(dir.path() / "gt.txt", "0 1\n1 0\n");
  using P = std::pair<std::uint32_t, std::uint32_t>;
  CHECK(load_ground_truth(dir.path() / "gt.csv").positives == std::set<P>{{1, 3}});
  CHECK(load_ground_truth(dir.path() / "gt.txt").positives == std::set<P>{{0, 1}});
  CHECK_THROWS_AS(load_ground_truth(dir.path() / "gt.csv", 3), ParseError);
  CHECK_THROWS_AS(load_ground_truth(dir.path() / "none.csv"), LoadError);
}

TEST_CASE("ground truth round-trips through csv") {
  std::mt19937 rng(72);
  std::uniform_int_distribution<std::uint32_t> id(0, 5000);
  test::TempDir dir;
  for (int rep = 0; rep < 20; ++rep) {
    GroundTruth gt;
    for (int k = 0; k < 50; ++k) {
      const auto a = id(rng);
      const auto b = id(rng);
      if (a != b) gt.add(a, b);
    }
    const auto path = dir.path() / ("gt" + std::to_string(rep) + ".csv");
    write_ground_truth_csv(path, gt);
    CHECK(load_ground_truth(path) == gt);
  }
}

TEST_CASE("tolerance decides correctness") {
  GroundTruth gt;
  gt.add(10, 100);
  gt.tolerance = 3;
  CHECK(gt.is_correct(100, 13));
  CHECK_FALSE(gt.is_correct(100, 14));
  CHECK(gt.is_correct(10, 97));
  CHECK_FALSE(gt.is_correct(50, 50));
  CHECK_THROWS_AS(gt.add(4, 4), InputError);
}
