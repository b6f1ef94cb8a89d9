#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lsgd/config.hpp"
#include "lsgd/image.hpp"

namespace lsgd {

/// Pixel coordinates are continuous: the pixel in column c, row r sits at
/// (c + 0.5, r + 0.5). A grid cell [x0, x1) therefore has its midpoint at
/// (x0 + x1) / 2 and the mean of its pixel positions coincides with it.
struct GridCenter {
  double x = 0.0;
  double y = 0.0;
  double intensity = 0.0;
  int cell_row = 0;
  int cell_col = 0;

  friend bool operator==(const GridCenter&, const GridCenter&) = default;
};

struct PixelSample {
  double x = 0.0;
  double y = 0.0;
  double intensity = 0.0;
};

struct Segmentation {
  int width = 0;
  int height = 0;
  int m_rows = 0;
  int n_cols = 0;
  /// Row-major cell id per pixel; id = cell_row * n_cols + cell_col.
  std::vector<std::int32_t> labels;
  std::vector<GridCenter> centers;
  /// Sum of squared fuse distances under the final assignment.
  double energy = 0.0;
  /// Assignment passes kept.
  int iterations = 0;
  /// True when a pass raised the energy; that pass was dropped.
  bool stopped_on_energy_rise = false;
  /// Post-assignment energy of every kept pass, in order.
  std::vector<double> energy_history;

  std::size_t cell_count() const noexcept { return centers.size(); }
  /// Number of pixels carrying each label.
  std::vector<std::size_t> cell_sizes() const;
};

/// Whether the k-means steps run the OpenMP kernel or the serial reference.
enum class Execution { Serial, Parallel };

int grid_rows(int height, int sp) noexcept;
int grid_cols(int width, int sp) noexcept;

/// sqrt((d_e / spatial_norm)^2 + (d_i / intensity_norm)^2).
double fuse_distance(const GridCenter& center, const PixelSample& px,
                     const SegmentationConfig& config);

/// One center per cell at the cell midpoint, row-major by cell.
std::vector<GridCenter> init_centers(const GrayImage& image, const SegmentationConfig& config);

/// Fuse-distance k-means seeded on the regular grid. A center competes for a
/// pixel only inside the open window of half-width `sp` around it. Iteration
/// ends when no center moves by `center_shift_eps`, after `max_iters` passes,
/// or when an assignment pass would raise the energy (that pass is dropped, so
/// `labels` and `centers` stay the last consistent pair).
Segmentation segment(const GrayImage& image, const SegmentationConfig& config,
                     Execution execution = Execution::Parallel);

/// Label map rendered as cell id modulo 256.
GrayImage label_map_image(const Segmentation& seg);

void write_centers_csv(const std::filesystem::path& path, const Segmentation& seg);

}  // namespace lsgd
