#include "lsgd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <string>

#include "lsgd/error.hpp"
#include "lsgd/kernels.hpp"

namespace lsgd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void rank_candidates(std::vector<ScoredFrame>& candidates, int top_n) {
  std::sort(candidates.begin(), candidates.end(), [](const ScoredFrame& a, const ScoredFrame& b) {
    if (a.score.value != b.score.value) return a.score.value > b.score.value;
    return a.frame < b.frame;
  });
  if (top_n >= 0 && candidates.size() > static_cast<std::size_t>(top_n)) {
    candidates.resize(static_cast<std::size_t>(top_n));
  }
}

std::vector<ScoredFrame> exhaustive_query(std::span<const FrameDescriptor> history,
                                          const Lsgd& query, int top_n) {
  std::vector<const Lsgd*> db;
  db.reserve(history.size());
  for (const auto& h : history) db.push_back(h.descriptor.get());
  std::vector<double> scores(history.size());
  kernels::score_parallel(query, db, scores);
  std::vector<ScoredFrame> ranked;
  ranked.reserve(history.size());
  for (std::size_t i = 0; i < history.size(); ++i) {
    ranked.push_back({history[i].frame, SimScore{scores[i]}});
  }
  rank_candidates(ranked, top_n);
  return ranked;
}

bool outside_temporal_gap(FrameId candidate, FrameId query, int temporal_gap) noexcept {
  return static_cast<std::int64_t>(candidate.index) + temporal_gap <
         static_cast<std::int64_t>(query.index);
}

LoopDetector::LoopDetector(SegmentationConfig segmentation, PipelineConfig pipeline)
    : seg_config_(std::move(segmentation)), config_(std::move(pipeline)) {
  seg_config_.validate();
  config_.validate();
}

DescribedFrame LoopDetector::describe(const GrayImage& image) const {
  const auto start = Clock::now();
  const auto seg = segment(image, seg_config_);
  DescribedFrame out;
  out.descriptor = std::make_shared<const Lsgd>(extract_lsgd(image, seg));
  out.width = image.width();
  out.height = image.height();
  out.describe_ms = ms_since(start);
  return out;
}

DetectionResult LoopDetector::process_frame(const GrayImage& image, FrameId id) {
  if (dims_ && (image.width() != dims_->first || image.height() != dims_->second)) {
    throw RunError("frame " + std::to_string(id.index) + " is " + std::to_string(image.width()) +
                   "x" + std::to_string(image.height()) + ", run expects " +
                   std::to_string(dims_->first) + "x" + std::to_string(dims_->second));
  }
  return commit(id, describe(image));
}

DetectionResult LoopDetector::commit(FrameId id, DescribedFrame frame) {
  if (!frame.descriptor) throw InputError("frame has no descriptor");
  if (dims_ && (frame.width != dims_->first || frame.height != dims_->second)) {
    throw RunError("frame " + std::to_string(id.index) + " is " + std::to_string(frame.width) +
                   "x" + std::to_string(frame.height) + ", run expects " +
                   std::to_string(dims_->first) + "x" + std::to_string(dims_->second));
  }
  if (!history_.empty() && !(history_.back().frame < id)) {
    throw InputError("frame ids must strictly increase (got " + std::to_string(id.index) +
                     " after " + std::to_string(history_.back().frame.index) + ")");
  }

  const auto start = Clock::now();
  DetectionResult result;
  result.query = id;
  const auto eligible = [&](FrameId f) { return outside_temporal_gap(f, id, config_.temporal_gap); };

  if (config_.mode == RetrievalMode::Exhaustive) {
    // history_ is in frame order, so the eligible frames form a prefix.
    const auto end = std::find_if(history_.begin(), history_.end(),
                                  [&](const FrameDescriptor& h) { return !eligible(h.frame); });
    const std::span<const FrameDescriptor> older(history_.data(),
                                                 static_cast<std::size_t>(end - history_.begin()));
    result.ranked = exhaustive_query(older, *frame.descriptor, config_.top_n);
    result.comparisons = older.size();
  } else {
    auto sel = db_.select_or_create(frame.descriptor, id, config_);
    result.node_id = sel.node_id;
    result.created_new = sel.created_new;
    result.comparisons = sel.comparisons;
    std::erase_if(sel.candidates, [&](const ScoredFrame& c) { return !eligible(c.frame); });
    rank_candidates(sel.candidates, config_.top_n);
    result.ranked = std::move(sel.candidates);
  }

  if (!result.ranked.empty()) {
    result.score = result.ranked.front().score;
    if (result.score.value >= config_.accept_threshold) result.match = result.ranked.front().frame;
  }
  result.retrieval_ms = ms_since(start);
  result.elapsed_ms = frame.describe_ms + result.retrieval_ms;

  dims_ = std::make_pair(frame.width, frame.height);
  history_.push_back({id, std::move(frame.descriptor)});
  return result;
}

std::vector<DetectionResult> run_sequence(
    LoopDetector& detector, std::size_t count,
    const std::function<GrayImage(std::size_t)>& load,
    const std::function<void(const DetectionResult&)>& on_result) {
  constexpr std::size_t kBatch = 32;
  std::vector<DetectionResult> results;
  results.reserve(count);
  std::vector<DescribedFrame> batch;
  std::vector<std::exception_ptr> errors;
  for (std::size_t begin = 0; begin < count; begin += kBatch) {
    const std::size_t n = std::min(kBatch, count - begin);
    batch.assign(n, DescribedFrame{});
    errors.assign(n, nullptr);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        batch[k] = detector.describe(load(begin + k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      results.push_back(
          detector.commit(FrameId{static_cast<std::uint32_t>(begin + k)}, std::move(batch[k])));
      if (on_result) on_result(results.back());
    }
  }
  return results;
}

}  // namespace lsgd
