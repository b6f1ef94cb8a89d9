#include "lsgd/descriptor.hpp"

#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "lsgd/error.hpp"

namespace lsgd {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

}  // namespace

Lsgd::Lsgd(int m_rows, int n_cols, std::uint32_t total_pixels, std::vector<CellHistogram> cells)
    : m_rows_(m_rows), n_cols_(n_cols), total_pixels_(total_pixels), cells_(std::move(cells)) {
  if (m_rows < 1 || n_cols < 1) throw InputError("descriptor grid must be at least 1x1");
  if (cells_.size() != static_cast<std::size_t>(m_rows) * static_cast<std::size_t>(n_cols)) {
    throw InputError("descriptor holds " + std::to_string(cells_.size()) + " cells, expected " +
                     std::to_string(m_rows) + "x" + std::to_string(n_cols));
  }
  std::uint64_t mass = 0;
  for (const auto& cell : cells_) {
    mass = std::accumulate(cell.begin(), cell.end(), mass);
  }
  if (mass != total_pixels_) {
    throw InputError("descriptor mass " + std::to_string(mass) + " != total_pixels " +
                     std::to_string(total_pixels_));
  }
}

Lsgd extract_lsgd(const GrayImage& image, const Segmentation& seg) {
  if (seg.width != image.width() || seg.height != image.height() ||
      seg.labels.size() != image.size()) {
    throw InputError("segmentation does not match image dimensions");
  }
  std::vector<CellHistogram> cells(static_cast<std::size_t>(seg.m_rows * seg.n_cols),
                                   CellHistogram{});
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto label = seg.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= cells.size()) {
      throw InputError("label " + std::to_string(label) + " out of range");
    }
    ++cells[static_cast<std::size_t>(label)][px[i]];
  }
  return Lsgd(seg.m_rows, seg.n_cols, static_cast<std::uint32_t>(image.size()),
              std::move(cells));
}

std::uint64_t l1_cell_distance(const CellHistogram& a, const CellHistogram& b) noexcept {
  std::uint64_t d = 0;
  for (int i = 0; i < kBins; ++i) {
    d += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  }
  return d;
}

void check_compatible(const Lsgd& a, const Lsgd& b) {
  if (a.m_rows() != b.m_rows() || a.n_cols() != b.n_cols() ||
      a.total_pixels() != b.total_pixels()) {
    throw InputError("descriptor geometry mismatch: " + std::to_string(a.m_rows()) + "x" +
                     std::to_string(a.n_cols()) + "/" + std::to_string(a.total_pixels()) +
                     " vs " + std::to_string(b.m_rows()) + "x" + std::to_string(b.n_cols()) +
                     "/" + std::to_string(b.total_pixels()));
  }
}

std::uint64_t lsgd_distance_unchecked(const Lsgd& a, const Lsgd& b) noexcept {
  const auto ca = a.counts();
  const auto cb = b.counts();
  std::uint64_t d = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    d += ca[i] > cb[i] ? ca[i] - cb[i] : cb[i] - ca[i];
  }
  return d;
}

std::uint64_t lsgd_distance(const Lsgd& a, const Lsgd& b) {
  check_compatible(a, b);
  return lsgd_distance_unchecked(a, b);
}

double similarity_from_distance(std::uint64_t distance, std::uint32_t total_pixels) noexcept {
  return 1.0 - static_cast<double>(distance) / (2.0 * static_cast<double>(total_pixels));
}

SimScore sim_score(const Lsgd& q, const Lsgd& d) {
  return SimScore{similarity_from_distance(lsgd_distance(q, d), q.total_pixels())};
}

std::vector<std::uint8_t> serialize_lsgd(const Lsgd& lsgd) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + lsgd.counts().size() * 4);
  put_u32(out, static_cast<std::uint32_t>(lsgd.m_rows()));
  put_u32(out, static_cast<std::uint32_t>(lsgd.n_cols()));
  put_u32(out, lsgd.total_pixels());
  for (const auto v : lsgd.counts()) put_u32(out, v);
  return out;
}

Lsgd deserialize_lsgd(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw ParseError("descriptor blob shorter than its header");
  const auto m = get_u32(bytes, 0);
  const auto n = get_u32(bytes, 4);
  const auto total = get_u32(bytes, 8);
  if (m == 0 || n == 0 || m > 1u << 15 || n > 1u << 15) {
    throw ParseError("descriptor header has invalid grid " + std::to_string(m) + "x" +
                     std::to_string(n));
  }
  const std::size_t cells = static_cast<std::size_t>(m) * n;
  if (bytes.size() != 12 + cells * kBins * 4) {
    throw ParseError("descriptor blob is " + std::to_string(bytes.size()) +
                     " bytes, header implies " + std::to_string(12 + cells * kBins * 4));
  }
  std::vector<CellHistogram> hist(cells);
  std::size_t offset = 12;
  for (auto& cell : hist) {
    for (auto& bin : cell) {
      bin = get_u32(bytes, offset);
      offset += 4;
    }
  }
  try {
    return Lsgd(static_cast<int>(m), static_cast<int>(n), total, std::move(hist));
  } catch (const InputError& e) {
    throw ParseError(std::string("corrupt descriptor blob: ") + e.what());
  }
}

void write_lsgd_file(const std::filesystem::path& path, const Lsgd& lsgd) {
  const auto bytes = serialize_lsgd(lsgd);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("cannot write descriptor " + path.string());
}

Lsgd read_lsgd_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open descriptor " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return deserialize_lsgd(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lsgd
