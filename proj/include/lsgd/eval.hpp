#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lsgd/dataset.hpp"
#include "lsgd/detection_log.hpp"

namespace lsgd {

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct EvalOptions {
  /// Only queries with a ground-truth partner older than this gap count as
  /// positives (the recall denominator).
  int temporal_gap = 50;
  double omega = 10.0;
};

struct EvalReport {
  std::vector<PrPoint> curve;
  double auc = 0.0;
  std::map<int, double> recall_at;
  double max_precision_at_full_recall = 0.0;
  double max_recall_at_full_precision = 0.0;
  double mean_time_ms = 0.0;
  double mean_retrieval_ms = 0.0;
  double prt = 0.0;
  std::size_t queries = 0;
  std::size_t positive_queries = 0;
  int temporal_gap = 0;
  int tolerance = 0;
  double omega = 0.0;
};

/// Queries in `rows` with at least one partner p satisfying p + gap < query.
std::size_t count_positive_queries(std::span<const DetectionRow> rows, const GroundTruth& gt,
                                   int temporal_gap);

/// Detections fire when a match is present and score >= threshold. With no
/// detection firing, precision is 1 by convention. Throws EvalError when the
/// ground truth is empty or no query is positive.
PrPoint precision_recall_at(std::span<const DetectionRow> rows, const GroundTruth& gt,
                            int temporal_gap, double threshold);

/// One point per distinct logged match score, thresholds descending. A log
/// without detections yields the single point (1, precision 1, recall 0).
std::vector<PrPoint> pr_curve(std::span<const DetectionRow> rows, const GroundTruth& gt,
                              int temporal_gap);

/// Fraction of positive queries whose first n ranked frames hold a correct one.
double recall_at_n(std::span<const DetectionRow> rows, const GroundTruth& gt, int temporal_gap,
                   int n);

/// Trapezoidal area under precision over recall, extended to recall 0 at the
/// curve's maximum precision.
double auc(std::span<const PrPoint> curve);

/// auc / (1 + omega * mean_time_s).
double prt(double auc_value, double mean_time_s, double omega) noexcept;

EvalReport evaluate(std::span<const DetectionRow> rows, const GroundTruth& gt,
                    const EvalOptions& options);

std::string report_json(const EvalReport& report);
/// Writes report.json, pr_curve.csv and summary.csv into `dir`.
void write_report_files(const std::filesystem::path& dir, const EvalReport& report);
std::string summary_line(const EvalReport& report);

}  // namespace lsgd
