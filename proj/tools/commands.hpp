#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsgd/config.hpp"
#include "lsgd/detection_log.hpp"
#include "lsgd/eval.hpp"
#include "lsgd/fixture.hpp"
#include "lsgd/nodedb.hpp"

namespace lsgd::cli {

/// Detection output file names inside the output directory.
inline constexpr const char* kDetectionsFile = "detections.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSweepFile = "sweep.csv";

struct SegmentOptions {
  std::filesystem::path image;
  SegmentationConfig config;
  std::filesystem::path out;
};

/// Writes labels.png and centers.csv; prints M, N, iterations and energy.
void cmd_segment(const SegmentOptions& options, std::ostream& log);

struct DetectOptions {
  std::filesystem::path root;
  Config config;
  std::filesystem::path out;
};

struct DetectRun {
  std::vector<DetectionRow> rows;
  NodeDatabase database;
  std::size_t frames = 0;
  int m_rows = 0;
  int n_cols = 0;
  double wall_ms = 0.0;
};

/// Runs the detector over a sequence directory without writing anything.
DetectRun run_detect(const std::filesystem::path& root, const Config& config);

/// Writes detections.csv, manifest.json and, in nodes mode, the node snapshot.
DetectRun cmd_detect(const DetectOptions& options, std::ostream& log);

/// Reads the dataset root and config back from a manifest.json.
DetectOptions read_manifest(const std::filesystem::path& path);

struct EvalCommandOptions {
  std::filesystem::path log;
  std::filesystem::path ground_truth;
  EvalOptions eval;
  int tolerance = 10;
  std::filesystem::path out;
};

EvalReport cmd_eval(const EvalCommandOptions& options, std::ostream& log);

struct SweepOptions {
  std::filesystem::path root;
  /// Defaults to `<root>/ground_truth.csv`.
  std::optional<std::filesystem::path> ground_truth;
  Config config;
  /// Config key to vary; any key accepted by apply_config_entry.
  std::string parameter;
  std::vector<std::string> values;
  EvalOptions eval;
  int tolerance = 10;
  std::filesystem::path out;
};

/// One detect + eval run per value, written to sweep.csv. Metric columns stay
/// empty when the ground truth holds no positive query.
void cmd_sweep(const SweepOptions& options, std::ostream& log);

struct FixtureOptions {
  FixtureParams params;
  std::filesystem::path out;
};

void cmd_fixture(const FixtureOptions& options, std::ostream& log);

/// Writes `text` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace lsgd::cli
