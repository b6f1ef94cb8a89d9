#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "lsgd/dataset.hpp"
#include "lsgd/error.hpp"
#include "lsgd/format.hpp"
#include "lsgd/pipeline.hpp"
#include "lsgd/segmentation.hpp"

namespace lsgd::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw LoadError("cannot create output directory " + dir.string());
}

std::string manifest_json(const DetectOptions& options, const DetectRun& run) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : config_entries(options.config)) config[key] = value;
  double total = 0.0;
  double retrieval = 0.0;
  for (const auto& r : run.rows) {
    total += r.elapsed_ms;
    retrieval += r.retrieval_ms;
  }
  const double n = run.rows.empty() ? 1.0 : static_cast<double>(run.rows.size());
  nlohmann::json totals{{"frames", run.frames},
                        {"wall_ms", run.wall_ms},
                        {"mean_time_ms", total / n},
                        {"mean_retrieval_ms", retrieval / n},
                        {"cells", run.m_rows * run.n_cols}};
  if (options.config.pipeline.mode == RetrievalMode::DynamicNodes) {
    totals["node_count"] = run.database.nodes().size();
  }
  const nlohmann::json doc{{"version", 1},
                           {"dataset_root", fs::absolute(options.root).lexically_normal().string()},
                           {"mode", std::string(to_string(options.config.pipeline.mode))},
                           {"output_dir", fs::absolute(options.out).lexically_normal().string()},
                           {"config", config},
                           {"totals", totals}};
  return doc.dump(2) + "\n";
}

GroundTruth load_gt(const fs::path& path, int tolerance, std::size_t frames) {
  auto gt = load_ground_truth(path, frames);
  gt.tolerance = tolerance;
  return gt;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw LoadError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw LoadError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void cmd_segment(const SegmentOptions& options, std::ostream& log) {
  const auto image = read_image(options.image);
  const auto seg = segment(image, options.config);
  ensure_dir(options.out);
  write_png(options.out / "labels.png", label_map_image(seg));
  write_centers_csv(options.out / "centers.csv", seg);
  log << "M=" << seg.m_rows << " N=" << seg.n_cols << " iterations=" << seg.iterations
      << " energy=" << format_double(seg.energy) << "\n";
}

DetectRun run_detect(const fs::path& root, const Config& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto manifest = load_sequence(root);
  config.segmentation.validate_for(manifest.width, manifest.height);
  LoopDetector detector(config.segmentation, config.pipeline);
  DetectRun run;
  run.frames = manifest.size();
  run.m_rows = grid_rows(manifest.height, config.segmentation.sp);
  run.n_cols = grid_cols(manifest.width, config.segmentation.sp);
  run.rows.reserve(manifest.size());
  run_sequence(
      detector, manifest.size(), [&](std::size_t i) { return load_frame(manifest, i); },
      [&](const DetectionResult& r) { run.rows.push_back(to_row(r)); });
  run.database = detector.database();
  run.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

DetectRun cmd_detect(const DetectOptions& options, std::ostream& log) {
  auto run = run_detect(options.root, options.config);
  ensure_dir(options.out);
  {
    std::ostringstream csv;
    write_detection_log(csv, run.rows);
    write_file_atomic(options.out / kDetectionsFile, csv.str());
  }
  const bool nodes = options.config.pipeline.mode == RetrievalMode::DynamicNodes;
  if (nodes) save_snapshot(run.database, options.out);
  write_file_atomic(options.out / kManifestFile, manifest_json(options, run));

  std::size_t matches = 0;
  for (const auto& r : run.rows) matches += r.match_id.has_value();
  log << "frames=" << run.frames << " matches=" << matches;
  if (nodes) log << " nodes=" << run.database.nodes().size();
  log << " wall_ms=" << format_double(run.wall_ms) << "\n";
  return run;
}

DetectOptions read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  DetectOptions options;
  try {
    options.root = doc.at("dataset_root").get<std::string>();
    for (const auto& [key, value] : doc.at("config").items()) {
      apply_config_entry(options.config, key, value.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed manifest: " + e.what());
  }
  options.config.segmentation.validate();
  options.config.pipeline.validate();
  return options;
}

EvalReport cmd_eval(const EvalCommandOptions& options, std::ostream& log) {
  const auto rows = read_detection_log(options.log);
  auto gt = load_ground_truth(options.ground_truth);
  gt.tolerance = options.tolerance;
  const auto report = evaluate(rows, gt, options.eval);
  ensure_dir(options.out);
  write_report_files(options.out, report);
  log << summary_line(report) << "\n";
  return report;
}

void cmd_sweep(const SweepOptions& options, std::ostream& log) {
  if (options.values.empty()) throw ConfigError("sweep needs at least one value");
  const auto gt_path = options.ground_truth.value_or(options.root / "ground_truth.csv");

  std::string csv = "parameter,value,cells,nodes,mean_time_ms,mean_retrieval_ms,auc,r@1,r@5,r@10,prt\n";
  for (const auto& value : options.values) {
    Config config = options.config;
    apply_config_entry(config, options.parameter, value);
    config.segmentation.validate();
    config.pipeline.validate();
    DetectRun run;
    try {
      run = run_detect(options.root, config);
    } catch (const Error& e) {
      throw RunError(options.parameter + "=" + value + ": " + e.what());
    }
    const bool nodes = config.pipeline.mode == RetrievalMode::DynamicNodes;
    double total = 0.0;
    double retrieval = 0.0;
    for (const auto& r : run.rows) {
      total += r.elapsed_ms;
      retrieval += r.retrieval_ms;
    }
    const double n = run.rows.empty() ? 1.0 : static_cast<double>(run.rows.size());

    std::string metrics = ",,,,";
    const auto gt = load_gt(gt_path, options.tolerance, run.frames);
    if (!gt.positives.empty() &&
        count_positive_queries(run.rows, gt, options.eval.temporal_gap) > 0) {
      const auto report = evaluate(run.rows, gt, options.eval);
      metrics = format_double(report.auc) + "," + format_double(report.recall_at.at(1)) + "," +
                format_double(report.recall_at.at(5)) + "," +
                format_double(report.recall_at.at(10)) + "," + format_double(report.prt);
    }
    const std::string row = options.parameter + "," + value + "," +
                            std::to_string(run.m_rows * run.n_cols) + "," +
                            (nodes ? std::to_string(run.database.nodes().size()) : "") + "," +
                            format_double(total / n) + "," + format_double(retrieval / n) + "," +
                            metrics;
    csv += row + "\n";
    log << row << "\n";
  }
  ensure_dir(options.out);
  write_file_atomic(options.out / kSweepFile, csv);
}

void cmd_fixture(const FixtureOptions& options, std::ostream& log) {
  const auto fixture = generate_fixture(options.params);
  write_fixture(fixture, options.out);
  log << "frames=" << fixture.images.size() << " revisits=" << fixture.revisits.size()
      << " out=" << options.out.string() << "\n";
}

}  // namespace lsgd::cli
