#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lsgd/image.hpp"
#include "lsgd/segmentation.hpp"

namespace lsgd {

inline constexpr int kBins = 256;

/// Bin b counts the member pixels of one cell with intensity b.
using CellHistogram = std::array<std::uint32_t, kBins>;

/// Local superpixel grid descriptor: an M x N grid of intensity histograms.
class Lsgd {
 public:
  /// Throws InputError when `cells.size() != m_rows * n_cols` or the histogram
  /// mass differs from `total_pixels`.
  Lsgd(int m_rows, int n_cols, std::uint32_t total_pixels, std::vector<CellHistogram> cells);

  int m_rows() const noexcept { return m_rows_; }
  int n_cols() const noexcept { return n_cols_; }
  std::uint32_t total_pixels() const noexcept { return total_pixels_; }

  const CellHistogram& cell(int row, int col) const noexcept {
    return cells_[static_cast<std::size_t>(row * n_cols_ + col)];
  }
  std::span<const CellHistogram> cells() const noexcept { return cells_; }
  /// All counts, row-major by (cell_row, cell_col, bin).
  std::span<const std::uint32_t> counts() const noexcept {
    return {cells_.empty() ? nullptr : cells_.front().data(), cells_.size() * kBins};
  }

  friend bool operator==(const Lsgd&, const Lsgd&) = default;

 private:
  int m_rows_;
  int n_cols_;
  std::uint32_t total_pixels_;
  std::vector<CellHistogram> cells_;
};

Lsgd extract_lsgd(const GrayImage& image, const Segmentation& seg);

std::uint64_t l1_cell_distance(const CellHistogram& a, const CellHistogram& b) noexcept;

/// Throws InputError unless both descriptors share (M, N, total_pixels).
void check_compatible(const Lsgd& a, const Lsgd& b);

/// Sum of per-cell L1 distances; D lies in [0, 2 * total_pixels].
std::uint64_t lsgd_distance(const Lsgd& a, const Lsgd& b);
std::uint64_t lsgd_distance_unchecked(const Lsgd& a, const Lsgd& b) noexcept;

/// 1 - D / (2 * total_pixels).
double similarity_from_distance(std::uint64_t distance, std::uint32_t total_pixels) noexcept;

SimScore sim_score(const Lsgd& q, const Lsgd& d);

/// Little-endian u32 header (M, N, total_pixels) followed by M*N*256 u32 counts.
std::vector<std::uint8_t> serialize_lsgd(const Lsgd& lsgd);
Lsgd deserialize_lsgd(std::span<const std::uint8_t> bytes);

void write_lsgd_file(const std::filesystem::path& path, const Lsgd& lsgd);
Lsgd read_lsgd_file(const std::filesystem::path& path);

}  // namespace lsgd
