#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsgd/image.hpp"

namespace lsgd {

struct DetectionResult;

/// One line of the detection log, the evaluator's input.
///
/// CSV columns, in order:
///   query_id, match_id, score, elapsed_ms, node_id, created_new,
///   retrieval_ms, ranked
/// match_id and node_id are empty when absent; created_new is 0/1 and empty
/// outside dynamic-nodes mode; ranked is `frame:score` pairs joined by `;`.
struct DetectionRow {
  std::uint32_t query_id = 0;
  std::optional<std::uint32_t> match_id;
  double score = 0.0;
  double elapsed_ms = 0.0;
  std::optional<std::uint32_t> node_id;
  std::optional<bool> created_new;
  double retrieval_ms = 0.0;
  std::vector<ScoredFrame> ranked;
};

DetectionRow to_row(const DetectionResult& result);

inline constexpr const char* kDetectionLogHeader =
    "query_id,match_id,score,elapsed_ms,node_id,created_new,retrieval_ms,ranked";

std::string format_row(const DetectionRow& row);
/// Same as format_row with both timing columns left empty; used to compare
/// runs for determinism.
std::string format_row_untimed(const DetectionRow& row);

void write_detection_log(std::ostream& out, std::span<const DetectionRow> rows);
void write_detection_log(const std::filesystem::path& path, std::span<const DetectionRow> rows);

/// Throws ParseError naming the offending line.
std::vector<DetectionRow> read_detection_log(std::istream& in, const std::string& source = "log");
std::vector<DetectionRow> read_detection_log(const std::filesystem::path& path);

}  // namespace lsgd
