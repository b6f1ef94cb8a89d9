#include "lsgd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lsgd/descriptor.hpp"
#include "lsgd/error.hpp"

namespace lsgd::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int32_t nearest_spatial(std::span<const GridCenter> centers, double px, double py) {
  std::int32_t best = 0;
  double best_d = kInf;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double dx = px - centers[k].x;
    const double dy = py - centers[k].y;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::int32_t>(k);
    }
  }
  return best;
}

void check_assign_args(const GrayImage& image, std::span<const GridCenter> centers,
                       std::span<std::int32_t> labels) {
  if (labels.size() != image.size()) throw InputError("label buffer does not match image size");
  if (centers.empty()) throw InputError("no centers to assign to");
}

// Centers grouped by the sp-sized cell containing them. Any center whose
// window covers pixel x lies in a bucket column within one cell of x.
class CenterBuckets {
 public:
  CenterBuckets(std::span<const GridCenter> centers, int width, int height, int sp)
      : sp_(sp), rows_(grid_rows(height, sp)), cols_(grid_cols(width, sp)) {
    offsets_.assign(static_cast<std::size_t>(rows_ * cols_) + 1, 0);
    std::vector<int> bucket(centers.size());
    for (std::size_t k = 0; k < centers.size(); ++k) {
      bucket[k] = bucket_row(centers[k].y) * cols_ + bucket_col(centers[k].x);
      ++offsets_[static_cast<std::size_t>(bucket[k]) + 1];
    }
    for (std::size_t b = 1; b < offsets_.size(); ++b) offsets_[b] += offsets_[b - 1];
    members_.resize(centers.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Ascending k keeps each bucket sorted by center index.
    for (std::size_t k = 0; k < centers.size(); ++k) {
      members_[fill[static_cast<std::size_t>(bucket[k])]++] = static_cast<std::int32_t>(k);
    }
  }

  int bucket_row(double y) const noexcept { return clamp_index(y, rows_); }
  int bucket_col(double x) const noexcept { return clamp_index(x, cols_); }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  std::span<const std::int32_t> bucket(int r, int c) const noexcept {
    const auto b = static_cast<std::size_t>(r * cols_ + c);
    return std::span<const std::int32_t>(members_).subspan(offsets_[b],
                                                           offsets_[b + 1] - offsets_[b]);
  }

 private:
  int clamp_index(double v, int n) const noexcept {
    const double cell = std::floor(v / sp_);
    if (cell < 0.0) return 0;
    if (cell >= n - 1) return n - 1;
    return static_cast<int>(cell);
  }

  int sp_;
  int rows_;
  int cols_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> members_;
};

}  // namespace

double assign_serial(const GrayImage& image, std::span<const GridCenter> centers,
                     const SegmentationConfig& config, std::span<std::int32_t> labels) {
  check_assign_args(image, centers, labels);
  const FuseMetric metric(config);
  const double sp = config.sp;
  const int w = image.width();
  double energy = 0.0;
  for (int y = 0; y < image.height(); ++y) {
    const double py = y + 0.5;
    double row_energy = 0.0;
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5;
      const double intensity = image.at(x, y);
      std::int32_t best = -1;
      double best_d = kInf;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const auto& c = centers[k];
        if (std::abs(px - c.x) >= sp || std::abs(py - c.y) >= sp) continue;
        const double d = metric(c, px, py, intensity);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::int32_t>(k);
        }
      }
      if (best < 0) {
        best = nearest_spatial(centers, px, py);
        best_d = metric(centers[static_cast<std::size_t>(best)], px, py, intensity);
      }
      labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
             static_cast<std::size_t>(x)] = best;
      row_energy += best_d;
    }
    energy += row_energy;
  }
  return energy;
}

double assign_parallel(const GrayImage& image, std::span<const GridCenter> centers,
                       const SegmentationConfig& config, std::span<std::int32_t> labels) {
  check_assign_args(image, centers, labels);
  const FuseMetric metric(config);
  const int sp = config.sp;
  const int w = image.width();
  const int h = image.height();
  const CenterBuckets buckets(centers, w, h, sp);
  std::vector<double> row_energy(static_cast<std::size_t>(h), 0.0);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double py = y + 0.5;
    const int br0 = buckets.bucket_row(py - sp);
    const int br1 = buckets.bucket_row(py + sp);
    double acc = 0.0;
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5;
      const double intensity = image.at(x, y);
      const int bc0 = buckets.bucket_col(px - sp);
      const int bc1 = buckets.bucket_col(px + sp);
      std::int32_t best = -1;
      double best_d = kInf;
      for (int br = br0; br <= br1; ++br) {
        for (int bc = bc0; bc <= bc1; ++bc) {
          for (const std::int32_t k : buckets.bucket(br, bc)) {
            const auto& c = centers[static_cast<std::size_t>(k)];
            if (std::abs(px - c.x) >= sp || std::abs(py - c.y) >= sp) continue;
            const double d = metric(c, px, py, intensity);
            if (d < best_d || (d == best_d && k < best)) {
              best_d = d;
              best = k;
            }
          }
        }
      }
      if (best < 0) {
        best = nearest_spatial(centers, px, py);
        best_d = metric(centers[static_cast<std::size_t>(best)], px, py, intensity);
      }
      labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
             static_cast<std::size_t>(x)] = best;
      acc += best_d;
    }
    row_energy[static_cast<std::size_t>(y)] = acc;
  }

  double energy = 0.0;
  for (const double e : row_energy) energy += e;
  return energy;
}

void score_serial(const Lsgd& query, std::span<const Lsgd* const> database,
                  std::span<double> out) {
  if (out.size() != database.size()) throw InputError("score buffer size mismatch");
  for (std::size_t i = 0; i < database.size(); ++i) {
    out[i] = sim_score(query, *database[i]).value;
  }
}

void score_parallel(const Lsgd& query, std::span<const Lsgd* const> database,
                    std::span<double> out) {
  if (out.size() != database.size()) throw InputError("score buffer size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(database.size());
  // Validate geometry up front; exceptions must not escape the parallel region.
  for (const Lsgd* d : database) check_compatible(query, *d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = similarity_from_distance(lsgd_distance_unchecked(query, *database[idx]),
                                        query.total_pixels());
  }
}

}  // namespace lsgd::kernels
