#include "lsgd/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lsgd/error.hpp"
#include "lsgd/format.hpp"

namespace lsgd {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for key '" + std::string(key) +
                      "'");
  }
  return value;
}

}  // namespace

void SegmentationConfig::validate() const {
  if (sp < 2) throw ConfigError("sp must be >= 2, got " + std::to_string(sp));
  if (!(spatial_norm_value() > 0.0)) throw ConfigError("spatial_norm must be > 0");
  if (!(intensity_norm > 0.0)) throw ConfigError("intensity_norm must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(center_shift_eps >= 0.0)) throw ConfigError("center_shift_eps must be >= 0");
}

void SegmentationConfig::validate_for(int width, int height) const {
  validate();
  if (sp > width || sp > height) {
    throw ConfigError("sp exceeds image dimensions (sp=" + std::to_string(sp) + ", image " +
                      std::to_string(width) + "x" + std::to_string(height) + ")");
  }
}

std::string_view to_string(RetrievalMode mode) noexcept {
  return mode == RetrievalMode::Exhaustive ? "exhaustive" : "nodes";
}

RetrievalMode parse_mode(std::string_view text) {
  if (text == "exhaustive" || text == "Exhaustive") return RetrievalMode::Exhaustive;
  if (text == "nodes" || text == "DynamicNodes" || text == "dynamic_nodes") {
    return RetrievalMode::DynamicNodes;
  }
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected exhaustive|nodes)");
}

void PipelineConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (temporal_gap < 0) throw ConfigError("temporal_gap must be >= 0");
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  if (!(accept_threshold >= 0.0 && accept_threshold <= 1.0)) {
    throw ConfigError("accept_threshold must lie in [0, 1]");
  }
}

void apply_config_entry(Config& config, std::string_view key, std::string_view value) {
  auto& seg = config.segmentation;
  auto& pipe = config.pipeline;
  if (key == "sp") {
    seg.sp = parse_number<int>(key, value);
  } else if (key == "spatial_norm") {
    seg.spatial_norm = parse_number<double>(key, value);
  } else if (key == "intensity_norm") {
    seg.intensity_norm = parse_number<double>(key, value);
  } else if (key == "max_iters") {
    seg.max_iters = parse_number<int>(key, value);
  } else if (key == "center_shift_eps") {
    seg.center_shift_eps = parse_number<double>(key, value);
  } else if (key == "alpha") {
    pipe.alpha = parse_number<double>(key, value);
  } else if (key == "beta") {
    pipe.beta = parse_number<double>(key, value);
  } else if (key == "temporal_gap") {
    pipe.temporal_gap = parse_number<int>(key, value);
  } else if (key == "top_n") {
    pipe.top_n = parse_number<int>(key, value);
  } else if (key == "accept_threshold") {
    pipe.accept_threshold = parse_number<double>(key, value);
  } else if (key == "mode") {
    pipe.mode = parse_mode(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply_config_entry(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.segmentation.validate();
  config.pipeline.validate();
  return config;
}

std::vector<std::pair<std::string, std::string>> config_entries(const Config& config) {
  const auto& seg = config.segmentation;
  const auto& pipe = config.pipeline;
  return {
      {"sp", std::to_string(seg.sp)},
      {"spatial_norm", format_double(seg.spatial_norm_value())},
      {"intensity_norm", format_double(seg.intensity_norm)},
      {"max_iters", std::to_string(seg.max_iters)},
      {"center_shift_eps", format_double(seg.center_shift_eps)},
      {"alpha", format_double(pipe.alpha)},
      {"beta", format_double(pipe.beta)},
      {"temporal_gap", std::to_string(pipe.temporal_gap)},
      {"top_n", std::to_string(pipe.top_n)},
      {"accept_threshold", format_double(pipe.accept_threshold)},
      {"mode", std::string(to_string(pipe.mode))},
  };
}

}  // namespace lsgd
