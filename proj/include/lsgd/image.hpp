#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace lsgd {

/// Zero-based ordinal of a frame within a sequence.
struct FrameId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(FrameId, FrameId) = default;
};

/// Image similarity in [0, 1]; 1 means identical descriptors.
struct SimScore {
  double value = 0.0;

  friend constexpr auto operator<=>(SimScore, SimScore) = default;
};

struct ScoredFrame {
  FrameId frame;
  SimScore score;

  friend constexpr bool operator==(const ScoredFrame&, const ScoredFrame&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

/// Dense 8-bit intensity raster, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// BT.601 luma, round half up.
std::uint8_t luma_bt601(Rgb px) noexcept;

/// Converts interleaved RGB triples to a gray image. Throws InputError when
/// `rgb.size() != width * height`.
GrayImage to_grayscale(std::span<const Rgb> rgb, int width, int height);

}  // namespace lsgd
