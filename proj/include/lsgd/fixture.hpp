#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "lsgd/dataset.hpp"
#include "lsgd/image.hpp"

namespace lsgd {

/// 64-bit linear congruential generator, state = state * a + c (mod 2^64),
/// with Knuth's MMIX constants. Outputs are the high 32 bits of the state, so
/// any implementation with wrapping 64-bit arithmetic reproduces the stream.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ull;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ull;

  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint32_t next_u32() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return static_cast<std::uint32_t>(state_ >> 32);
  }

  /// Integer in [0, bound) by multiply-shift; bound must be > 0.
  std::uint32_t uniform(std::uint32_t bound) noexcept {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * bound) >> 32);
  }

  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi) noexcept {
    return lo + static_cast<int>(uniform(static_cast<std::uint32_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

struct FixtureParams {
  int frames = 100;
  int revisits = 0;
  /// Revisits add uniform integer noise in [-noise, noise] per pixel.
  int noise = 0;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 1;
  /// Control points per axis of the random field.
  int field_grid = 8;
  /// Consecutive base frames sharing one scene; 1 makes every frame distinct.
  int cluster_size = 1;
  /// Per-frame noise applied inside clusters larger than one frame.
  int cluster_noise = 4;
  /// Revisit at index q copies a base frame with index < q - min_gap.
  int min_gap = 0;
};

struct Fixture {
  std::vector<GrayImage> images;
  GroundTruth ground_truth;
  /// (revisit frame, source frame)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> revisits;
};

/// Bilinear interpolation of random control values, in integer arithmetic.
GrayImage smooth_random_field(Lcg64& rng, int width, int height, int grid);

/// Adds uniform noise in [-amplitude, amplitude] and clamps to [0, 255].
GrayImage perturb(const GrayImage& image, Lcg64& rng, int amplitude);

/// Throws ConfigError on invalid parameters.
Fixture generate_fixture(const FixtureParams& params);

/// Writes `<root>/%06d.png` per frame and `<root>/ground_truth.csv`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& root);

}  // namespace lsgd
