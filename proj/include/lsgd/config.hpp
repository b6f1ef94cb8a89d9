#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lsgd {

/// Superpixel grid segmentation parameters.
struct SegmentationConfig {
  /// Side of the initial square grid cells, in pixels.
  int sp = 40;
  /// Spatial normalizer of the fuse distance; follows `sp` when unset.
  std::optional<double> spatial_norm;
  double intensity_norm = 10.0;
  int max_iters = 10;
  /// Iteration stops once no center moves by this many pixels or more.
  double center_shift_eps = 0.5;

  double spatial_norm_value() const noexcept {
    return spatial_norm.value_or(static_cast<double>(sp));
  }

  /// Throws ConfigError on values invalid regardless of image size.
  void validate() const;
  /// Additionally checks `sp <= min(width, height)`.
  void validate_for(int width, int height) const;
};

enum class RetrievalMode { Exhaustive, DynamicNodes };

std::string_view to_string(RetrievalMode mode) noexcept;
/// Accepts "exhaustive" and "nodes" (plus the enumerator spellings).
RetrievalMode parse_mode(std::string_view text);

struct PipelineConfig {
  /// Gate on the similarity to a node's founding frame.
  double alpha = 0.6;
  /// Gate on the mean similarity to all members of a node.
  double beta = 0.65;
  /// Frames with id >= query - temporal_gap are never loop candidates.
  int temporal_gap = 50;
  int top_n = 10;
  /// Minimum best-candidate similarity for a detection to report a match.
  double accept_threshold = 0.0;
  RetrievalMode mode = RetrievalMode::DynamicNodes;

  void validate() const;
};

struct Config {
  SegmentationConfig segmentation;
  PipelineConfig pipeline;
};

/// Sets one field from its textual `key=value` form. Throws ConfigError on an
/// unknown key or an unparsable value.
void apply_config_entry(Config& config, std::string_view key, std::string_view value);

/// Reads a flat `key=value` file. Blank lines and lines starting with `#` are
/// skipped. The result is validated.
Config load_config_file(const std::filesystem::path& path);

/// Every field as (key, value) in file order; `apply_config_entry` accepts each.
std::vector<std::pair<std::string, std::string>> config_entries(const Config& config);

}  // namespace lsgd
