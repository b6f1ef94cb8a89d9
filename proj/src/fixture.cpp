#include "lsgd/fixture.hpp"

#include <algorithm>
#include <cstdio>

#include "lsgd/error.hpp"

namespace lsgd {

GrayImage smooth_random_field(Lcg64& rng, int width, int height, int grid) {
  const int gw = std::max(2, grid);
  const int gh = std::max(2, grid);
  std::vector<int> ctrl(static_cast<std::size_t>(gw * gh));
  for (auto& v : ctrl) v = static_cast<int>(rng.uniform(256));

  // Position x maps onto control interval x * (gw - 1) / (width - 1).
  const std::int64_t dx = std::max(1, width - 1);
  const std::int64_t dy = std::max(1, height - 1);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    const std::int64_t fy = static_cast<std::int64_t>(y) * (gh - 1);
    const int j0 = static_cast<int>(fy / dy);
    const std::int64_t ry = fy % dy;
    const int j1 = std::min(j0 + 1, gh - 1);
    for (int x = 0; x < width; ++x) {
      const std::int64_t fx = static_cast<std::int64_t>(x) * (gw - 1);
      const int i0 = static_cast<int>(fx / dx);
      const std::int64_t rx = fx % dx;
      const int i1 = std::min(i0 + 1, gw - 1);
      const std::int64_t v00 = ctrl[static_cast<std::size_t>(j0 * gw + i0)];
      const std::int64_t v10 = ctrl[static_cast<std::size_t>(j0 * gw + i1)];
      const std::int64_t v01 = ctrl[static_cast<std::size_t>(j1 * gw + i0)];
      const std::int64_t v11 = ctrl[static_cast<std::size_t>(j1 * gw + i1)];
      const std::int64_t num = v00 * (dx - rx) * (dy - ry) + v10 * rx * (dy - ry) +
                               v01 * (dx - rx) * ry + v11 * rx * ry;
      const std::int64_t den = dx * dy;
      px[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
         static_cast<std::size_t>(x)] = static_cast<std::uint8_t>((num + den / 2) / den);
    }
  }
  return GrayImage(width, height, std::move(px));
}

GrayImage perturb(const GrayImage& image, Lcg64& rng, int amplitude) {
  if (amplitude <= 0) return image;
  std::vector<std::uint8_t> px(image.pixels().begin(), image.pixels().end());
  for (auto& v : px) {
    const int n = static_cast<int>(v) + rng.uniform_int(-amplitude, amplitude);
    v = static_cast<std::uint8_t>(std::clamp(n, 0, 255));
  }
  return GrayImage(image.width(), image.height(), std::move(px));
}

Fixture generate_fixture(const FixtureParams& p) {
  if (p.frames < 1) throw ConfigError("fixture needs at least one frame");
  if (p.revisits < 0) throw ConfigError("revisits must be >= 0");
  if (p.noise < 0 || p.noise > 255 || p.cluster_noise < 0 || p.cluster_noise > 255) {
    throw ConfigError("noise must lie in [0, 255]");
  }
  if (p.width < 1 || p.height < 1) throw ConfigError("fixture dimensions must be positive");
  if (p.cluster_size < 1) throw ConfigError("cluster_size must be >= 1");
  if (p.min_gap < 0) throw ConfigError("min_gap must be >= 0");
  if (p.field_grid < 2) throw ConfigError("field_grid must be >= 2");

  Lcg64 rng(p.seed);
  Fixture fx;
  fx.images.reserve(static_cast<std::size_t>(p.frames + p.revisits));
  for (int start = 0; start < p.frames; start += p.cluster_size) {
    const auto scene = smooth_random_field(rng, p.width, p.height, p.field_grid);
    const int members = std::min(p.cluster_size, p.frames - start);
    if (p.cluster_size == 1) {
      fx.images.push_back(scene);
      continue;
    }
    for (int k = 0; k < members; ++k) fx.images.push_back(perturb(scene, rng, p.cluster_noise));
  }

  for (int k = 0; k < p.revisits; ++k) {
    const int query = p.frames + k;
    const int limit = std::min(p.frames, query - p.min_gap);
    if (limit <= 0) {
      throw ConfigError("no base frame is older than min_gap for revisit " + std::to_string(query));
    }
    const auto source = rng.uniform(static_cast<std::uint32_t>(limit));
    fx.images.push_back(perturb(fx.images[source], rng, p.noise));
    fx.revisits.emplace_back(static_cast<std::uint32_t>(query), source);
    fx.ground_truth.add(source, static_cast<std::uint32_t>(query));
  }
  return fx;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec || !std::filesystem::is_directory(root)) {
    throw LoadError("cannot create fixture directory " + root.string());
  }
  char name[32];
  for (std::size_t i = 0; i < fixture.images.size(); ++i) {
    std::snprintf(name, sizeof name, "%06zu.png", i);
    write_png(root / name, fixture.images[i]);
  }
  write_ground_truth_csv(root / "ground_truth.csv", fixture.ground_truth);
}

}  // namespace lsgd
