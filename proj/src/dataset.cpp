#include "lsgd/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>

#include "lsgd/error.hpp"
#include "lsgd/format.hpp"

namespace fs = std::filesystem;

namespace lsgd {

namespace {

bool is_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::uint32_t check_id(unsigned long v, std::optional<std::size_t> frame_count,
                       const std::string& source, std::size_t line) {
  if (v > 0xFFFFFFFFul || (frame_count && v >= *frame_count)) {
    throw ParseError(source, line, "frame id " + std::to_string(v) + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

GrayImage read_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw LoadError("no such image file " + path.string());
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw LoadError("cannot decode image " + path.string());
  if (mat.depth() != CV_8U) {
    throw LoadError("unsupported bit depth in " + path.string() + " (only 8-bit images)");
  }
  const int w = mat.cols;
  const int h = mat.rows;
  const int ch = mat.channels();
  if (ch == 1) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
      const auto* row = mat.ptr<std::uint8_t>(y);
      std::copy(row, row + w, px.begin() + static_cast<std::ptrdiff_t>(y) * w);
    }
    return GrayImage(w, h, std::move(px));
  }
  if (ch != 3 && ch != 4) {
    throw LoadError("unsupported channel count " + std::to_string(ch) + " in " + path.string());
  }
  std::vector<Rgb> rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < w; ++x) {
      const auto* p = row + static_cast<std::ptrdiff_t>(x) * ch;  // BGR(A)
      rgb[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          Rgb{p[2], p[1], p[0]};
    }
  }
  return to_grayscale(rgb, w, h);
}

void write_png(const fs::path& path, const GrayImage& image) {
  const cv::Mat mat(image.height(), image.width(), CV_8UC1,
                    const_cast<std::uint8_t*>(image.pixels().data()));
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw LoadError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw LoadError("cannot write " + path.string());
}

SequenceManifest load_sequence(const fs::path& root) {
  if (!fs::is_directory(root)) throw LoadError("not a directory: " + root.string());
  std::map<unsigned long, fs::path> by_stem;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file() || !is_image_extension(entry.path())) continue;
    const auto stem = entry.path().stem().string();
    const auto value = all_digits(stem) ? parse_unsigned(stem) : std::nullopt;
    if (!value) {
      throw LoadError("image file name is not numeric: " + entry.path().string());
    }
    const auto [it, inserted] = by_stem.emplace(*value, entry.path());
    if (!inserted) {
      throw LoadError("duplicate frame number " + stem + ": " + it->second.string() + " and " +
                      entry.path().string());
    }
  }
  if (by_stem.empty()) throw LoadError("no PNG or JPEG images in " + root.string());

  SequenceManifest manifest;
  manifest.root = root;
  std::uint32_t index = 0;
  for (auto& [stem, path] : by_stem) manifest.frames.emplace_back(FrameId{index++}, path);

  const std::size_t n = manifest.frames.size();
  const std::size_t samples[] = {0, n / 2, n - 1};
  for (const auto i : samples) {
    const auto img = read_image(manifest.frames[i].second);
    if (manifest.width == 0) {
      manifest.width = img.width();
      manifest.height = img.height();
    } else if (img.width() != manifest.width || img.height() != manifest.height) {
      throw LoadError("mixed image dimensions: " + manifest.frames[i].second.string() + " is " +
                      std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                      ", expected " + std::to_string(manifest.width) + "x" +
                      std::to_string(manifest.height));
    }
  }
  return manifest;
}

GrayImage load_frame(const SequenceManifest& manifest, std::size_t index) {
  if (index >= manifest.frames.size()) {
    throw LoadError("frame index " + std::to_string(index) + " beyond sequence of " +
                    std::to_string(manifest.frames.size()));
  }
  const auto& path = manifest.frames[index].second;
  auto img = read_image(path);
  if (img.width() != manifest.width || img.height() != manifest.height) {
    throw LoadError("mixed image dimensions: " + path.string() + " is " +
                    std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    ", expected " + std::to_string(manifest.width) + "x" +
                    std::to_string(manifest.height));
  }
  return img;
}

void GroundTruth::add(std::uint32_t a, std::uint32_t b) {
  if (a == b) throw InputError("ground-truth pair links frame " + std::to_string(a) + " to itself");
  positives.emplace(std::min(a, b), std::max(a, b));
}

std::vector<std::uint32_t> GroundTruth::partners(std::uint32_t query) const {
  std::vector<std::uint32_t> out;
  for (const auto& [a, b] : positives) {
    if (a == query) out.push_back(b);
    if (b == query) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GroundTruth::is_correct(std::uint32_t query, std::uint32_t retrieved) const {
  for (const auto p : partners(query)) {
    const auto diff = p > retrieved ? p - retrieved : retrieved - p;
    if (diff <= static_cast<std::uint32_t>(tolerance)) return true;
  }
  return false;
}

GroundTruth parse_ground_truth_csv(std::istream& in, const std::string& source,
                                   std::optional<std::size_t> frame_count) {
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, ',');
    if (!seen_content) {
      seen_content = true;
      // A first line without any digit is a header.
      if (std::none_of(body.begin(), body.end(),
                       [](unsigned char c) { return std::isdigit(c); })) {
        continue;
      }
    }
    if (fields.size() != 2) throw ParseError(source, line_no, "expected 'a,b'");
    const auto a = parse_unsigned(trim(fields[0]));
    const auto b = parse_unsigned(trim(fields[1]));
    if (!a || !b) throw ParseError(source, line_no, "invalid frame id in '" + std::string(body) + "'");
    const auto ia = check_id(*a, frame_count, source, line_no);
    const auto ib = check_id(*b, frame_count, source, line_no);
    if (ia == ib) throw ParseError(source, line_no, "self-pair " + std::to_string(ia));
    gt.add(ia, ib);
  }
  return gt;
}

GroundTruth parse_ground_truth_matrix(std::istream& in, const std::string& source,
                                      std::optional<std::size_t> frame_count) {
  std::vector<std::vector<bool>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream tokens(line);
    std::vector<bool> row;
    std::string tok;
    while (tokens >> tok) {
      if (tok == "1") {
        row.push_back(true);
      } else if (tok == "0") {
        row.push_back(false);
      } else {
        throw ParseError(source, line_no, "matrix entry must be 0 or 1, got '" + tok + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, line_no,
                       "ragged matrix: row has " + std::to_string(row.size()) +
                           " entries, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (!rows.empty() && rows.size() != rows.front().size()) {
    throw ParseError(source, line_no,
                     "matrix is " + std::to_string(rows.size()) + "x" +
                         std::to_string(rows.front().size()) + ", expected square");
  }
  if (frame_count && rows.size() > *frame_count) {
    throw ParseError(source, line_no,
                     "matrix covers " + std::to_string(rows.size()) + " frames, sequence has " +
                         std::to_string(*frame_count));
  }
  GroundTruth gt;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (i != j && rows[i][j]) {
        gt.add(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      }
    }
  }
  return gt;
}

GroundTruth load_ground_truth(const fs::path& path, std::optional<std::size_t> frame_count) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open ground truth " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".csv") return parse_ground_truth_csv(in, path.string(), frame_count);
  return parse_ground_truth_matrix(in, path.string(), frame_count);
}

void write_ground_truth_csv(std::ostream& out, const GroundTruth& gt) {
  for (const auto& [a, b] : gt.positives) out << a << ',' << b << '\n';
}

void write_ground_truth_csv(const fs::path& path, const GroundTruth& gt) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  write_ground_truth_csv(out, gt);
  if (!out) throw LoadError("failed writing " + path.string());
}

}  // namespace lsgd
