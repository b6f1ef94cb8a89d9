#include "lsgd/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "lsgd/error.hpp"
#include "lsgd/format.hpp"

namespace lsgd {

namespace {

bool has_old_partner(const GroundTruth& gt, std::uint32_t query, int temporal_gap) {
  for (const auto p : gt.partners(query)) {
    if (static_cast<std::int64_t>(p) + temporal_gap < static_cast<std::int64_t>(query)) return true;
  }
  return false;
}

std::size_t checked_positives(std::span<const DetectionRow> rows, const GroundTruth& gt,
                              int temporal_gap) {
  if (gt.positives.empty()) throw EvalError("ground truth holds no loop closures; recall undefined");
  const auto n = count_positive_queries(rows, gt, temporal_gap);
  if (n == 0) {
    throw EvalError("no logged query has a ground-truth partner older than the temporal gap (" +
                    std::to_string(temporal_gap) + "); recall undefined");
  }
  return n;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw LoadError("cannot write " + path.string());
}

}  // namespace

std::size_t count_positive_queries(std::span<const DetectionRow> rows, const GroundTruth& gt,
                                   int temporal_gap) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const DetectionRow& r) {
    return has_old_partner(gt, r.query_id, temporal_gap);
  }));
}

PrPoint precision_recall_at(std::span<const DetectionRow> rows, const GroundTruth& gt,
                            int temporal_gap, double threshold) {
  const auto positives = checked_positives(rows, gt, temporal_gap);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& r : rows) {
    if (!r.match_id || r.score < threshold) continue;
    if (gt.is_correct(r.query_id, *r.match_id)) {
      ++tp;
    } else {
      ++fp;
    }
  }
  PrPoint pt;
  pt.threshold = threshold;
  pt.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  pt.recall = static_cast<double>(tp) / static_cast<double>(positives);
  return pt;
}

std::vector<PrPoint> pr_curve(std::span<const DetectionRow> rows, const GroundTruth& gt,
                              int temporal_gap) {
  const auto positives = checked_positives(rows, gt, temporal_gap);

  struct Fired {
    double score;
    bool correct;
  };
  std::vector<Fired> fired;
  for (const auto& r : rows) {
    if (r.match_id) fired.push_back({r.score, gt.is_correct(r.query_id, *r.match_id)});
  }
  if (fired.empty()) return {PrPoint{1.0, 1.0, 0.0}};

  std::sort(fired.begin(), fired.end(), [](const Fired& a, const Fired& b) { return a.score > b.score; });
  std::vector<PrPoint> curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < fired.size(); ++i) {
    (fired[i].correct ? tp : fp) += 1;
    // Emit once all detections sharing this score have been counted.
    if (i + 1 < fired.size() && fired[i + 1].score == fired[i].score) continue;
    curve.push_back({fired[i].score, static_cast<double>(tp) / static_cast<double>(tp + fp),
                     static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return curve;
}

double recall_at_n(std::span<const DetectionRow> rows, const GroundTruth& gt, int temporal_gap,
                   int n) {
  if (n < 1) throw EvalError("recall@n needs n >= 1");
  const auto positives = checked_positives(rows, gt, temporal_gap);
  std::size_t hits = 0;
  for (const auto& r : rows) {
    if (!has_old_partner(gt, r.query_id, temporal_gap)) continue;
    const auto limit = std::min(r.ranked.size(), static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < limit; ++k) {
      if (gt.is_correct(r.query_id, r.ranked[k].frame.index)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(positives);
}

double auc(std::span<const PrPoint> curve) {
  if (curve.empty()) return 0.0;
  std::vector<PrPoint> pts(curve.begin(), curve.end());
  std::stable_sort(pts.begin(), pts.end(), [](const PrPoint& a, const PrPoint& b) {
    if (a.recall != b.recall) return a.recall < b.recall;
    return a.precision > b.precision;
  });
  double max_precision = 0.0;
  for (const auto& p : pts) max_precision = std::max(max_precision, p.precision);

  double area = 0.0;
  double prev_r = 0.0;
  double prev_p = max_precision;
  for (const auto& p : pts) {
    area += (p.recall - prev_r) * 0.5 * (p.precision + prev_p);
    prev_r = p.recall;
    prev_p = p.precision;
  }
  return std::clamp(area, 0.0, 1.0);
}

double prt(double auc_value, double mean_time_s, double omega) noexcept {
  return auc_value / (1.0 + omega * mean_time_s);
}

EvalReport evaluate(std::span<const DetectionRow> rows, const GroundTruth& gt,
                    const EvalOptions& options) {
  EvalReport report;
  report.temporal_gap = options.temporal_gap;
  report.tolerance = gt.tolerance;
  report.omega = options.omega;
  report.queries = rows.size();
  report.positive_queries = checked_positives(rows, gt, options.temporal_gap);
  report.curve = pr_curve(rows, gt, options.temporal_gap);
  report.auc = auc(report.curve);
  for (const int n : {1, 5, 10}) report.recall_at[n] = recall_at_n(rows, gt, options.temporal_gap, n);
  for (const auto& p : report.curve) {
    if (p.recall == 1.0) {
      report.max_precision_at_full_recall = std::max(report.max_precision_at_full_recall, p.precision);
    }
    if (p.precision == 1.0) {
      report.max_recall_at_full_precision = std::max(report.max_recall_at_full_precision, p.recall);
    }
  }
  if (!rows.empty()) {
    double total = 0.0;
    double retrieval = 0.0;
    for (const auto& r : rows) {
      total += r.elapsed_ms;
      retrieval += r.retrieval_ms;
    }
    report.mean_time_ms = total / static_cast<double>(rows.size());
    report.mean_retrieval_ms = retrieval / static_cast<double>(rows.size());
  }
  report.prt = prt(report.auc, report.mean_time_ms / 1000.0, options.omega);
  return report;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : report.curve) {
    curve.push_back({{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}});
  }
  nlohmann::json recall_at = nlohmann::json::object();
  for (const auto& [n, v] : report.recall_at) recall_at[std::to_string(n)] = v;
  const nlohmann::json doc{
      {"conventions",
       {{"precision_without_detections", 1.0},
        {"recall_denominator",
         "queries with a ground-truth partner p such that p + temporal_gap < query"},
        {"prt", "auc / (1 + omega * mean_time_ms / 1000)"}}},
      {"queries", report.queries},
      {"positive_queries", report.positive_queries},
      {"temporal_gap", report.temporal_gap},
      {"tolerance", report.tolerance},
      {"omega", report.omega},
      {"auc", report.auc},
      {"recall_at", recall_at},
      {"max_precision_at_full_recall", report.max_precision_at_full_recall},
      {"max_recall_at_full_precision", report.max_recall_at_full_precision},
      {"mean_time_ms", report.mean_time_ms},
      {"mean_retrieval_ms", report.mean_retrieval_ms},
      {"prt", report.prt},
      {"curve", curve},
  };
  return doc.dump(2) + "\n";
}

void write_report_files(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_json(report));

  std::string curve = "threshold,precision,recall\n";
  for (const auto& p : report.curve) {
    curve += format_double(p.threshold) + "," + format_double(p.precision) + "," +
             format_double(p.recall) + "\n";
  }
  write_text(dir / "pr_curve.csv", curve);

  const auto r = [&](int n) {
    const auto it = report.recall_at.find(n);
    return it == report.recall_at.end() ? 0.0 : it->second;
  };
  write_text(dir / "summary.csv", "auc,r@1,r@5,r@10,mean_time_ms,prt\n" + format_double(report.auc) +
                                      "," + format_double(r(1)) + "," + format_double(r(5)) + "," +
                                      format_double(r(10)) + "," +
                                      format_double(report.mean_time_ms) + "," +
                                      format_double(report.prt) + "\n");
}

std::string summary_line(const EvalReport& report) {
  const auto r = [&](int n) {
    const auto it = report.recall_at.find(n);
    return it == report.recall_at.end() ? 0.0 : it->second;
  };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "auc=%.4f r@1=%.4f r@5=%.4f r@10=%.4f mean_time_ms=%.3f prt=%.4f positives=%zu",
                report.auc, r(1), r(5), r(10), report.mean_time_ms, report.prt,
                report.positive_queries);
  return buf;
}

}  // namespace lsgd
