#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "lsgd/config.hpp"
#include "lsgd/descriptor.hpp"
#include "lsgd/image.hpp"

namespace lsgd {

using LsgdPtr = std::shared_ptr<const Lsgd>;

struct FrameDescriptor {
  FrameId frame;
  LsgdPtr descriptor;
};

/// A group of similar frames. Its founding frame is the representative and
/// never changes.
struct DynamicNode {
  std::uint32_t node_id = 0;
  std::vector<FrameDescriptor> members;

  const Lsgd& representative() const { return *members.front().descriptor; }
};

struct NodeSelection {
  std::uint32_t node_id = 0;
  bool created_new = false;
  /// Members of the selected node scored against the query, captured before
  /// the query joined it. Empty when a node was created.
  std::vector<ScoredFrame> candidates;
  /// Gate values of the selected node; unset when a node was created.
  std::optional<double> representative_score;
  std::optional<double> average_score;
  /// Nodes whose representative was compared against the query.
  std::size_t nodes_examined = 0;
  /// Total descriptor comparisons made by this call.
  std::size_t comparisons = 0;
};

struct NodeStats {
  std::size_t node_count = 0;
  /// member count -> number of nodes of that size
  std::map<std::size_t, std::size_t> member_histogram;

  friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

/// Incrementally grown set of dynamic nodes. Single writer: calls to
/// select_or_create must be serialized in frame order.
class NodeDatabase {
 public:
  NodeDatabase() = default;

  /// Rebuilds a database from exported nodes; throws InputError when the
  /// nodes violate the ordering or partition invariants.
  static NodeDatabase from_nodes(std::vector<DynamicNode> nodes);

  /// Walks nodes oldest first. The first node whose representative scores
  /// above alpha and whose member average scores above beta receives the
  /// query; otherwise a new node is founded by it. Throws InputError when
  /// `id` is not greater than every frame already stored.
  NodeSelection select_or_create(LsgdPtr query, FrameId id, const PipelineConfig& config);

  const std::vector<DynamicNode>& nodes() const noexcept { return nodes_; }
  std::size_t frame_count() const noexcept { return frame_index_.size(); }
  std::optional<std::uint32_t> node_of(FrameId frame) const;

  friend bool operator==(const NodeDatabase& a, const NodeDatabase& b);

 private:
  std::vector<DynamicNode> nodes_;
  std::map<FrameId, std::uint32_t> frame_index_;
};

NodeStats node_stats(const NodeDatabase& db);

/// Writes `nodes.json` (node ids and member frame ids) into `dir` and one
/// descriptor blob per frame under `dir/descriptors/<frame>.lsgd`.
void save_snapshot(const NodeDatabase& db, const std::filesystem::path& dir);
NodeDatabase load_snapshot(const std::filesystem::path& dir);

}  // namespace lsgd
