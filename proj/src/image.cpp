#include "lsgd/image.hpp"

#include <string>

#include "lsgd/error.hpp"

namespace lsgd {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InputError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("pixel buffer holds " + std::to_string(pixels_.size()) +
                     " values, expected " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

std::uint8_t luma_bt601(Rgb px) noexcept {
  // Weights scaled by 1000 keep the rounding exact.
  const std::uint32_t acc = 299u * px.r + 587u * px.g + 114u * px.b + 500u;
  const std::uint32_t v = acc / 1000u;
  return static_cast<std::uint8_t>(v > 255u ? 255u : v);
}

GrayImage to_grayscale(std::span<const Rgb> rgb, int width, int height) {
  check_dims(width, height);
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (rgb.size() != expected) {
    throw InputError("rgb buffer holds " + std::to_string(rgb.size()) + " pixels, expected " +
                     std::to_string(expected));
  }
  std::vector<std::uint8_t> out(expected);
  for (std::size_t i = 0; i < expected; ++i) out[i] = luma_bt601(rgb[i]);
  return GrayImage(width, height, std::move(out));
}

}  // namespace lsgd
