#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lsgd/config.hpp"
#include "lsgd/descriptor.hpp"
#include "lsgd/image.hpp"
#include "lsgd/nodedb.hpp"
#include "lsgd/segmentation.hpp"

namespace lsgd {

struct DetectionResult {
  FrameId query;
  std::optional<FrameId> match;
  /// Best candidate similarity, 0 when there were no candidates.
  SimScore score;
  /// At most top_n candidates, descending score, ties to the older frame.
  std::vector<ScoredFrame> ranked;
  /// Segmentation + description + retrieval.
  double elapsed_ms = 0.0;
  /// Retrieval and ranking only.
  double retrieval_ms = 0.0;
  /// Set in dynamic-nodes mode only.
  std::optional<std::uint32_t> node_id;
  bool created_new = false;
  /// Descriptor comparisons spent on retrieval.
  std::size_t comparisons = 0;
};

/// Sorts descending by score, ties to the smaller frame id, then truncates.
void rank_candidates(std::vector<ScoredFrame>& candidates, int top_n);

/// Full linear scan of `history`; the reference retrieval.
std::vector<ScoredFrame> exhaustive_query(std::span<const FrameDescriptor> history,
                                          const Lsgd& query, int top_n);

/// True when `candidate` may close a loop with `query` under `temporal_gap`:
/// candidate < query - temporal_gap.
bool outside_temporal_gap(FrameId candidate, FrameId query, int temporal_gap) noexcept;

/// Descriptor of one frame, computable ahead of the serialized database step.
struct DescribedFrame {
  LsgdPtr descriptor;
  int width = 0;
  int height = 0;
  double describe_ms = 0.0;
};

/// Per-frame loop-closure detection over a growing history.
class LoopDetector {
 public:
  LoopDetector(SegmentationConfig segmentation, PipelineConfig pipeline);

  /// Segments, describes and retrieves; equivalent to commit(id, describe(image)).
  DetectionResult process_frame(const GrayImage& image, FrameId id);

  /// Pure and thread-safe.
  DescribedFrame describe(const GrayImage& image) const;

  /// Runs retrieval against the history and adds the frame to it. Throws
  /// RunError on a size mismatch and InputError on a non-increasing id.
  DetectionResult commit(FrameId id, DescribedFrame frame);

  const SegmentationConfig& segmentation_config() const noexcept { return seg_config_; }
  const PipelineConfig& pipeline_config() const noexcept { return config_; }
  const NodeDatabase& database() const noexcept { return db_; }
  const std::vector<FrameDescriptor>& history() const noexcept { return history_; }

 private:
  SegmentationConfig seg_config_;
  PipelineConfig config_;
  NodeDatabase db_;
  std::vector<FrameDescriptor> history_;
  std::optional<std::pair<int, int>> dims_;
};

/// Processes frames 0..count-1 in order. Frames are loaded and described in
/// parallel batches; commits stay sequential, so the results equal a plain
/// loop over process_frame.
std::vector<DetectionResult> run_sequence(
    LoopDetector& detector, std::size_t count,
    const std::function<GrayImage(std::size_t)>& load,
    const std::function<void(const DetectionResult&)>& on_result = {});

}  // namespace lsgd
