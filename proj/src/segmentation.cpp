#include "lsgd/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lsgd/error.hpp"
#include "lsgd/format.hpp"
#include "lsgd/kernels.hpp"

namespace lsgd {

namespace {

struct CellAccumulator {
  std::int64_t twice_x = 0;  // sum of (2c + 1), i.e. twice the pixel-center x
  std::int64_t twice_y = 0;
  std::int64_t intensity = 0;
  std::int64_t count = 0;
};

// Moves every center to the mean of its members and returns the largest
// displacement. Integer sums keep the update independent of pixel order.
double update_centers(const GrayImage& image, std::span<const std::int32_t> labels,
                      std::vector<GridCenter>& centers) {
  std::vector<CellAccumulator> acc(centers.size());
  const int w = image.width();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                       static_cast<std::size_t>(x);
      auto& a = acc[static_cast<std::size_t>(labels[idx])];
      a.twice_x += 2 * x + 1;
      a.twice_y += 2 * y + 1;
      a.intensity += image.at(x, y);
      ++a.count;
    }
  }
  double max_shift = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const auto& a = acc[k];
    if (a.count == 0) continue;  // empty cell keeps its previous state
    auto& c = centers[k];
    const double n = static_cast<double>(a.count);
    const double nx = static_cast<double>(a.twice_x) / (2.0 * n);
    const double ny = static_cast<double>(a.twice_y) / (2.0 * n);
    max_shift = std::max(max_shift, std::hypot(nx - c.x, ny - c.y));
    c.x = nx;
    c.y = ny;
    c.intensity = static_cast<double>(a.intensity) / n;
  }
  return max_shift;
}

}  // namespace

std::vector<std::size_t> Segmentation::cell_sizes() const {
  std::vector<std::size_t> sizes(centers.size(), 0);
  for (const auto label : labels) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

int grid_rows(int height, int sp) noexcept { return (height + sp - 1) / sp; }
int grid_cols(int width, int sp) noexcept { return (width + sp - 1) / sp; }

double fuse_distance(const GridCenter& center, const PixelSample& px,
                     const SegmentationConfig& config) {
  const double de = std::hypot(center.x - px.x, center.y - px.y);
  const double di = std::abs(center.intensity - px.intensity);
  return std::hypot(de / config.spatial_norm_value(), di / config.intensity_norm);
}

std::vector<GridCenter> init_centers(const GrayImage& image, const SegmentationConfig& config) {
  config.validate_for(image.width(), image.height());
  const int sp = config.sp;
  const int rows = grid_rows(image.height(), sp);
  const int cols = grid_cols(image.width(), sp);
  std::vector<GridCenter> centers;
  centers.reserve(static_cast<std::size_t>(rows * cols));
  for (int i = 0; i < rows; ++i) {
    const int y0 = i * sp;
    const int y1 = std::min(y0 + sp, image.height());
    for (int j = 0; j < cols; ++j) {
      const int x0 = j * sp;
      const int x1 = std::min(x0 + sp, image.width());
      GridCenter c;
      c.x = 0.5 * (x0 + x1);
      c.y = 0.5 * (y0 + y1);
      // The pixel containing the midpoint.
      const int px = std::min(image.width() - 1, static_cast<int>(std::floor(c.x)));
      const int py = std::min(image.height() - 1, static_cast<int>(std::floor(c.y)));
      c.intensity = image.at(px, py);
      c.cell_row = i;
      c.cell_col = j;
      centers.push_back(c);
    }
  }
  return centers;
}

Segmentation segment(const GrayImage& image, const SegmentationConfig& config,
                     Execution execution) {
  Segmentation seg;
  seg.centers = init_centers(image, config);
  seg.width = image.width();
  seg.height = image.height();
  seg.m_rows = grid_rows(image.height(), config.sp);
  seg.n_cols = grid_cols(image.width(), config.sp);
  seg.labels.assign(image.size(), 0);

  std::vector<std::int32_t> pass(image.size(), 0);
  for (int it = 0; it < config.max_iters; ++it) {
    const double energy =
        execution == Execution::Parallel
            ? kernels::assign_parallel(image, seg.centers, config, pass)
            : kernels::assign_serial(image, seg.centers, config, pass);
    // Centers drifting away from pixels can push them out of every window
    // that held a better center; such a pass is discarded and ends the run.
    if (!seg.energy_history.empty() && energy > seg.energy_history.back()) {
      seg.stopped_on_energy_rise = true;
      break;
    }
    seg.labels.swap(pass);
    seg.energy_history.push_back(energy);
    seg.iterations = it + 1;
    const double shift = update_centers(image, seg.labels, seg.centers);
    if (shift < config.center_shift_eps) break;
  }
  seg.energy = seg.energy_history.back();
  return seg;
}

GrayImage label_map_image(const Segmentation& seg) {
  std::vector<std::uint8_t> px(seg.labels.size());
  std::transform(seg.labels.begin(), seg.labels.end(), px.begin(),
                 [](std::int32_t label) { return static_cast<std::uint8_t>(label % 256); });
  return GrayImage(seg.width, seg.height, std::move(px));
}

void write_centers_csv(const std::filesystem::path& path, const Segmentation& seg) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "cell_row,cell_col,x,y,intensity\n";
  for (const auto& c : seg.centers) {
    out << c.cell_row << ',' << c.cell_col << ',' << format_double(c.x) << ','
        << format_double(c.y) << ',' << format_double(c.intensity) << '\n';
  }
  if (!out) throw LoadError("failed writing " + path.string());
}

}  // namespace lsgd
