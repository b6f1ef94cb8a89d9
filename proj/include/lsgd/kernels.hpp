#pragma once

// Data-parallel inner loops. Each kernel comes as an OpenMP version used by
// the library and a serial reference kept for tests and benchmarks. Both
// produce bitwise-identical output for the same input.

#include <cstdint>
#include <span>

#include "lsgd/config.hpp"
#include "lsgd/image.hpp"
#include "lsgd/segmentation.hpp"

namespace lsgd {
class Lsgd;
}

namespace lsgd::kernels {

/// Squared fuse distance with precomputed inverse squared normalizers.
struct FuseMetric {
  double inv_spatial_sq;
  double inv_intensity_sq;

  explicit FuseMetric(const SegmentationConfig& config) noexcept
      : inv_spatial_sq(1.0 / (config.spatial_norm_value() * config.spatial_norm_value())),
        inv_intensity_sq(1.0 / (config.intensity_norm * config.intensity_norm)) {}

  double operator()(const GridCenter& c, double x, double y, double intensity) const noexcept {
    const double dx = x - c.x;
    const double dy = y - c.y;
    const double di = intensity - c.intensity;
    return (dx * dx + dy * dy) * inv_spatial_sq + di * di * inv_intensity_sq;
  }
};

/// Assigns every pixel to its fuse-distance nearest candidate center (ties to
/// the lowest index) and falls back to the spatially nearest center when no
/// window covers the pixel. Writes `labels` and returns the summed squared
/// fuse distance, accumulated row by row.
double assign_serial(const GrayImage& image, std::span<const GridCenter> centers,
                     const SegmentationConfig& config, std::span<std::int32_t> labels);

/// Same contract as assign_serial; buckets centers by grid cell and splits
/// rows across threads.
double assign_parallel(const GrayImage& image, std::span<const GridCenter> centers,
                       const SegmentationConfig& config, std::span<std::int32_t> labels);

/// Similarity of `query` to each descriptor in `database`, written to `out`.
void score_serial(const Lsgd& query, std::span<const Lsgd* const> database,
                  std::span<double> out);
void score_parallel(const Lsgd& query, std::span<const Lsgd* const> database,
                    std::span<double> out);

}  // namespace lsgd::kernels
