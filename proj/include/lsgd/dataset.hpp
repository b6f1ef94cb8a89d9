#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "lsgd/image.hpp"

namespace lsgd {

/// Image files of a sequence directory, ordered by numeric filename stem.
struct SequenceManifest {
  std::filesystem::path root;
  std::vector<std::pair<FrameId, std::filesystem::path>> frames;
  int width = 0;
  int height = 0;

  std::size_t size() const noexcept { return frames.size(); }
};

/// Lists `<root>/*.png|*.jpg|*.jpeg`. Other extensions are ignored; image
/// files whose stem is not a decimal number are rejected. Dimensions are read
/// from a sample of frames (first, middle, last) and enforced by load_frame.
SequenceManifest load_sequence(const std::filesystem::path& root);

/// Decodes frame `index`; throws LoadError if its size differs from the
/// manifest.
GrayImage load_frame(const SequenceManifest& manifest, std::size_t index);

/// Decodes an 8-bit gray, RGB or RGBA image and converts it to gray with
/// BT.601 weights. 16-bit and float images are rejected.
GrayImage read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Loop-closure ground truth as unordered frame pairs stored (smaller, larger).
struct GroundTruth {
  std::set<std::pair<std::uint32_t, std::uint32_t>> positives;
  /// A retrieved frame r is correct for query q iff |r - p| <= tolerance for
  /// some partner p of q.
  int tolerance = 10;

  void add(std::uint32_t a, std::uint32_t b);
  std::vector<std::uint32_t> partners(std::uint32_t query) const;
  bool is_correct(std::uint32_t query, std::uint32_t retrieved) const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Lines "a,b"; an optional non-numeric header line is skipped.
GroundTruth parse_ground_truth_csv(std::istream& in, const std::string& source = "csv",
                                   std::optional<std::size_t> frame_count = std::nullopt);
/// Square 0/1 matrix, whitespace separated; symmetrized, diagonal ignored.
GroundTruth parse_ground_truth_matrix(std::istream& in, const std::string& source = "matrix",
                                      std::optional<std::size_t> frame_count = std::nullopt);

/// `.csv` files parse as pairs, anything else as a matrix. When `frame_count`
/// is given, ids at or beyond it are rejected.
GroundTruth load_ground_truth(const std::filesystem::path& path,
                              std::optional<std::size_t> frame_count = std::nullopt);

void write_ground_truth_csv(std::ostream& out, const GroundTruth& gt);
void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruth& gt);

}  // namespace lsgd
