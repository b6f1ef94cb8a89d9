#include "lsgd/nodedb.hpp"

#include <fstream>
#include <json.hpp>
#include <string>

#include "lsgd/error.hpp"
#include "lsgd/kernels.hpp"

namespace lsgd {

NodeDatabase NodeDatabase::from_nodes(std::vector<DynamicNode> nodes) {
  NodeDatabase db;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.node_id != i + 1) {
      throw InputError("node ids must be consecutive from 1, found " +
                       std::to_string(node.node_id) + " at position " + std::to_string(i));
    }
    if (node.members.empty()) {
      throw InputError("node " + std::to_string(node.node_id) + " has no members");
    }
    for (std::size_t j = 0; j < node.members.size(); ++j) {
      const auto& m = node.members[j];
      if (!m.descriptor) throw InputError("node member without descriptor");
      if (j > 0 && !(node.members[j - 1].frame < m.frame)) {
        throw InputError("node " + std::to_string(node.node_id) +
                         " member frames are not strictly increasing");
      }
      if (!db.frame_index_.emplace(m.frame, node.node_id).second) {
        throw InputError("frame " + std::to_string(m.frame.index) +
                         " belongs to more than one node");
      }
    }
  }
  db.nodes_ = std::move(nodes);
  return db;
}

NodeSelection NodeDatabase::select_or_create(LsgdPtr query, FrameId id,
                                             const PipelineConfig& config) {
  if (!query) throw InputError("null query descriptor");
  if (!frame_index_.empty() && !(frame_index_.rbegin()->first < id)) {
    throw InputError("frame " + std::to_string(id.index) +
                     " is not newer than frame " +
                     std::to_string(frame_index_.rbegin()->first.index) + " already stored");
  }

  NodeSelection sel;
  std::vector<const Lsgd*> others;
  std::vector<double> scores;
  for (auto& node : nodes_) {
    ++sel.nodes_examined;
    ++sel.comparisons;
    const double first = sim_score(*query, node.representative()).value;
    if (!(first > config.alpha)) continue;

    const std::size_t m = node.members.size();
    others.clear();
    for (std::size_t j = 1; j < m; ++j) others.push_back(node.members[j].descriptor.get());
    scores.assign(m, 0.0);
    scores[0] = first;
    kernels::score_parallel(*query, others, std::span<double>(scores).subspan(1));
    sel.comparisons += m - 1;

    double sum = 0.0;
    for (const double s : scores) sum += s;
    const double average = sum / static_cast<double>(m);
    if (!(average > config.beta)) continue;

    sel.node_id = node.node_id;
    sel.representative_score = first;
    sel.average_score = average;
    sel.candidates.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      sel.candidates.push_back({node.members[j].frame, SimScore{scores[j]}});
    }
    node.members.push_back({id, std::move(query)});
    frame_index_.emplace(id, node.node_id);
    return sel;
  }

  DynamicNode fresh;
  fresh.node_id = static_cast<std::uint32_t>(nodes_.size() + 1);
  fresh.members.push_back({id, std::move(query)});
  nodes_.push_back(std::move(fresh));
  frame_index_.emplace(id, nodes_.back().node_id);
  sel.node_id = nodes_.back().node_id;
  sel.created_new = true;
  return sel;
}

std::optional<std::uint32_t> NodeDatabase::node_of(FrameId frame) const {
  const auto it = frame_index_.find(frame);
  if (it == frame_index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const NodeDatabase& a, const NodeDatabase& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& na = a.nodes_[i];
    const auto& nb = b.nodes_[i];
    if (na.node_id != nb.node_id || na.members.size() != nb.members.size()) return false;
    for (std::size_t j = 0; j < na.members.size(); ++j) {
      if (na.members[j].frame != nb.members[j].frame) return false;
      if (!(*na.members[j].descriptor == *nb.members[j].descriptor)) return false;
    }
  }
  return true;
}

NodeStats node_stats(const NodeDatabase& db) {
  NodeStats stats;
  stats.node_count = db.nodes().size();
  for (const auto& node : db.nodes()) ++stats.member_histogram[node.members.size()];
  return stats;
}

void save_snapshot(const NodeDatabase& db, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const auto blob_dir = dir / "descriptors";
  fs::create_directories(blob_dir);
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : db.nodes()) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : node.members) {
      members.push_back(m.frame.index);
      write_lsgd_file(blob_dir / (std::to_string(m.frame.index) + ".lsgd"), *m.descriptor);
    }
    nodes.push_back({{"node_id", node.node_id}, {"members", members}});
  }
  const nlohmann::json doc{{"version", 1}, {"descriptor_dir", "descriptors"}, {"nodes", nodes}};
  std::ofstream out(dir / "nodes.json");
  out << doc.dump(2) << '\n';
  if (!out) throw LoadError("cannot write " + (dir / "nodes.json").string());
}

NodeDatabase load_snapshot(const std::filesystem::path& dir) {
  const auto manifest = dir / "nodes.json";
  std::ifstream in(manifest);
  if (!in) throw LoadError("cannot open " + manifest.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  try {
    const auto blob_dir = dir / doc.at("descriptor_dir").get<std::string>();
    std::vector<DynamicNode> nodes;
    for (const auto& jn : doc.at("nodes")) {
      DynamicNode node;
      node.node_id = jn.at("node_id").get<std::uint32_t>();
      for (const auto& jm : jn.at("members")) {
        const auto frame = jm.get<std::uint32_t>();
        node.members.push_back(
            {FrameId{frame}, std::make_shared<const Lsgd>(read_lsgd_file(
                                 blob_dir / (std::to_string(frame) + ".lsgd")))});
      }
      nodes.push_back(std::move(node));
    }
    return NodeDatabase::from_nodes(std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
}

}  // namespace lsgd
