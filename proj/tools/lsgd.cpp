#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "lsgd/error.hpp"

namespace {

using lsgd::Config;

struct GlobalFlags {
  std::optional<std::string> config_file;
  std::optional<int> sp;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> mode;
  std::optional<int> temporal_gap;
  std::optional<int> top_n;
  double omega = 10.0;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

// Config file first, then flags.
Config resolve_config(const GlobalFlags& g) {
  Config config = g.config_file ? lsgd::load_config_file(*g.config_file) : Config{};
  if (g.sp) config.segmentation.sp = *g.sp;
  if (g.alpha) config.pipeline.alpha = *g.alpha;
  if (g.beta) config.pipeline.beta = *g.beta;
  if (g.mode) config.pipeline.mode = lsgd::parse_mode(*g.mode);
  if (g.temporal_gap) config.pipeline.temporal_gap = *g.temporal_gap;
  if (g.top_n) config.pipeline.top_n = *g.top_n;
  config.segmentation.validate();
  config.pipeline.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-closure detection with superpixel-grid histogram descriptors"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config_file, "key=value configuration file");
  app.add_option("--sp", g.sp, "Segmentation scale in pixels");
  app.add_option("--alpha", g.alpha, "Node representative gate");
  app.add_option("--beta", g.beta, "Node average gate");
  app.add_option("--mode", g.mode, "Retrieval mode")
      ->check(CLI::IsMember({"exhaustive", "nodes"}));
  app.add_option("--temporal-gap", g.temporal_gap, "Recent frames excluded from candidacy");
  app.add_option("--top-n", g.top_n, "Ranked candidates kept per query");
  app.add_option("--omega", g.omega, "PRT time weight")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Fixture generator seed");

  auto* segment = app.add_subcommand("segment", "Segment one image and export labels and centers");
  std::string image;
  segment->add_option("image", image, "Image file")->required();

  auto* detect = app.add_subcommand("detect", "Run loop-closure detection over a sequence");
  std::string root;
  std::optional<std::string> replay;
  detect->add_option("root", root, "Sequence directory");
  detect->add_option("--replay", replay, "Rerun the configuration recorded in a manifest.json");

  auto* eval = app.add_subcommand("eval", "Evaluate a detection log against ground truth");
  std::string log_path;
  std::string gt_path;
  int tolerance = 10;
  eval->add_option("log", log_path, "detections.csv")->required();
  eval->add_option("gt", gt_path, "Ground truth (.csv pairs or 0/1 matrix)")->required();
  eval->add_option("--tolerance", tolerance, "Ground-truth frame tolerance")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Detect and evaluate once per parameter value");
  std::string sweep_root;
  std::optional<std::string> sweep_gt;
  std::string param;
  std::vector<std::string> values;
  sweep->add_option("root", sweep_root, "Sequence directory")->required();
  sweep->add_option("--gt", sweep_gt, "Ground truth; defaults to <root>/ground_truth.csv");
  sweep->add_option("--param", param, "Parameter to vary (sp, beta, ...)")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',')->required();
  sweep->add_option("--tolerance", tolerance, "Ground-truth frame tolerance")->capture_default_str();

  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic sequence with ground truth");
  lsgd::FixtureParams params;
  fixture->add_option("--frames", params.frames, "Base frames")->capture_default_str();
  fixture->add_option("--revisits", params.revisits, "Revisit frames appended")->capture_default_str();
  fixture->add_option("--noise", params.noise, "Revisit noise amplitude")->capture_default_str();
  fixture->add_option("--width", params.width)->capture_default_str();
  fixture->add_option("--height", params.height)->capture_default_str();
  fixture->add_option("--cluster-size", params.cluster_size, "Base frames per scene")
      ->capture_default_str();
  fixture->add_option("--cluster-noise", params.cluster_noise, "Noise within a scene")
      ->capture_default_str();
  fixture->add_option("--min-gap", params.min_gap, "Revisit sources are older than this")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*segment) {
      const auto config = resolve_config(g);
      lsgd::cli::cmd_segment({image, config.segmentation, g.out}, std::cout);
    } else if (*detect) {
      lsgd::cli::DetectOptions options;
      if (replay) {
        options = lsgd::cli::read_manifest(*replay);
        if (!root.empty()) options.root = root;
      } else {
        if (root.empty()) throw lsgd::ConfigError("detect needs a sequence directory or --replay");
        options.root = root;
        options.config = resolve_config(g);
      }
      options.out = g.out;
      lsgd::cli::cmd_detect(options, std::cout);
    } else if (*eval) {
      const auto config = resolve_config(g);
      lsgd::cli::EvalCommandOptions options;
      options.log = log_path;
      options.ground_truth = gt_path;
      options.eval = {config.pipeline.temporal_gap, g.omega};
      options.tolerance = tolerance;
      options.out = g.out;
      lsgd::cli::cmd_eval(options, std::cout);
    } else if (*sweep) {
      lsgd::cli::SweepOptions options;
      options.root = sweep_root;
      if (sweep_gt) options.ground_truth = *sweep_gt;
      options.config = resolve_config(g);
      options.parameter = param;
      std::erase(values, std::string{});
      options.values = values;
      options.eval = {options.config.pipeline.temporal_gap, g.omega};
      options.tolerance = tolerance;
      options.out = g.out;
      lsgd::cli::cmd_sweep(options, std::cout);
    } else if (*fixture) {
      if (g.seed) params.seed = *g.seed;
      lsgd::cli::cmd_fixture({params, g.out}, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "lsgd: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
