#include "lsgd/detection_log.hpp"

#include <fstream>
#include <sstream>

#include "lsgd/error.hpp"
#include "lsgd/format.hpp"
#include "lsgd/pipeline.hpp"

namespace lsgd {

namespace {

std::string format_ranked(const std::vector<ScoredFrame>& ranked) {
  std::string out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(ranked[i].frame.index);
    out += ':';
    out += format_double(ranked[i].score.value);
  }
  return out;
}

std::string format_impl(const DetectionRow& row, bool timed) {
  std::string out = std::to_string(row.query_id);
  out += ',';
  if (row.match_id) out += std::to_string(*row.match_id);
  out += ',';
  out += format_double(row.score);
  out += ',';
  if (timed) out += format_double(row.elapsed_ms);
  out += ',';
  if (row.node_id) out += std::to_string(*row.node_id);
  out += ',';
  if (row.created_new) out += *row.created_new ? '1' : '0';
  out += ',';
  if (timed) out += format_double(row.retrieval_ms);
  out += ',';
  out += format_ranked(row.ranked);
  return out;
}

}  // namespace

DetectionRow to_row(const DetectionResult& result) {
  DetectionRow row;
  row.query_id = result.query.index;
  if (result.match) row.match_id = result.match->index;
  row.score = result.score.value;
  row.elapsed_ms = result.elapsed_ms;
  row.node_id = result.node_id;
  if (result.node_id) row.created_new = result.created_new;
  row.retrieval_ms = result.retrieval_ms;
  row.ranked = result.ranked;
  return row;
}

std::string format_row(const DetectionRow& row) { return format_impl(row, true); }
std::string format_row_untimed(const DetectionRow& row) { return format_impl(row, false); }

void write_detection_log(std::ostream& out, std::span<const DetectionRow> rows) {
  out << kDetectionLogHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

void write_detection_log(const std::filesystem::path& path, std::span<const DetectionRow> rows) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  write_detection_log(out, rows);
  if (!out) throw LoadError("failed writing " + path.string());
}

std::vector<DetectionRow> read_detection_log(std::istream& in, const std::string& source) {
  std::vector<DetectionRow> rows;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) { throw ParseError(source, line_no, what); };
  const auto id_field = [&](std::string_view text, const char* name) {
    const auto v = parse_unsigned(text);
    if (!v || *v > 0xFFFFFFFFul) fail(std::string("invalid ") + name + " '" + std::string(text) + "'");
    return static_cast<std::uint32_t>(*v);
  };
  const auto real_field = [&](std::string_view text, const char* name) {
    const auto v = parse_double(text);
    if (!v) fail(std::string("invalid ") + name + " '" + std::string(text) + "'");
    return *v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (line_no == 1 && body.starts_with("query_id")) continue;
    const auto f = split(body, ',');
    if (f.size() != 8) fail("expected 8 columns, found " + std::to_string(f.size()));

    DetectionRow row;
    row.query_id = id_field(f[0], "query_id");
    if (!f[1].empty()) row.match_id = id_field(f[1], "match_id");
    row.score = real_field(f[2], "score");
    if (!f[3].empty()) row.elapsed_ms = real_field(f[3], "elapsed_ms");
    if (!f[4].empty()) row.node_id = id_field(f[4], "node_id");
    if (f[5] == "1") {
      row.created_new = true;
    } else if (f[5] == "0") {
      row.created_new = false;
    } else if (!f[5].empty()) {
      fail("invalid created_new '" + std::string(f[5]) + "'");
    }
    if (!f[6].empty()) row.retrieval_ms = real_field(f[6], "retrieval_ms");
    if (!f[7].empty()) {
      for (const auto item : split(f[7], ';')) {
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) fail("invalid ranked entry '" + std::string(item) + "'");
        row.ranked.push_back({FrameId{id_field(item.substr(0, colon), "ranked frame")},
                              SimScore{real_field(item.substr(colon + 1), "ranked score")}});
      }
    }
    if (!rows.empty() && row.query_id <= rows.back().query_id) {
      fail("query ids must strictly increase");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DetectionRow> read_detection_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open detection log " + path.string());
  return read_detection_log(in, path.string());
}

}  // namespace lsgd
