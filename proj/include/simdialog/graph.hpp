#ifndef SIMDIALOG_GRAPH_HPP
#define SIMDIALOG_GRAPH_HPP

#include <algorithm>
#include <memory>
#include <unordered_map>
#include <vector>

#include "simdialog/model.hpp"

namespace simdialog {

namespace detail {

inline bool edge_order_less(const Edge* a, const Edge* b) {
  return std::tie(a->order, a->to) < std::tie(b->order, b->to);
}

}  // namespace detail

/// Nodes reachable from `id` by one edge, in ascending edge order.
/// Edges whose target does not exist are skipped.
inline std::vector<const DialogNode*> successors(const Project& project, const NodeId& id) {
  if (project.find_node(id) == nullptr) throw Error(ErrorCode::NotFound, "unknown node '" + id + "'");
  std::vector<const Edge*> out;
  for (const auto& e : project.edges)
    if (e.from == id) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), detail::edge_order_less);
  std::vector<const DialogNode*> nodes;
  nodes.reserve(out.size());
  for (const Edge* e : out)
    if (const DialogNode* n = project.find_node(e->to)) nodes.push_back(n);
  return nodes;
}

/// Read-only index over an immutable project: adjacency sorted by edge order
/// and start nodes by name. Shared by every session running on the project.
class DialogGraph {
 public:
  explicit DialogGraph(std::shared_ptr<const Project> project) : project_(std::move(project)) {
    for (const auto& e : project_->edges) out_[e.from].push_back(&e);
    for (auto& [from, edges] : out_) std::stable_sort(edges.begin(), edges.end(), detail::edge_order_less);
    for (const auto& [id, node] : project_->nodes)
      if (node.is<StartNode>()) starts_.try_emplace(node.as<StartNode>().name, &node);
  }

  static std::shared_ptr<const DialogGraph> make(Project project) {
    return std::make_shared<const DialogGraph>(std::make_shared<const Project>(std::move(project)));
  }

  const Project& project() const noexcept { return *project_; }
  std::shared_ptr<const Project> project_ptr() const noexcept { return project_; }

  const DialogNode& node(const NodeId& id) const {
    const DialogNode* n = project_->find_node(id);
    if (n == nullptr) throw Error(ErrorCode::NotFound, "unknown node '" + id + "'");
    return *n;
  }

  const DialogNode& start(std::string_view name) const {
    auto it = starts_.find(std::string(name));
    if (it == starts_.end()) throw Error(ErrorCode::NotFound, "no start node named '" + std::string(name) + "'");
    return *it->second;
  }

  bool has_start(std::string_view name) const { return starts_.contains(std::string(name)); }

  /// Outgoing edges in ascending order.
  std::span<const Edge* const> out_edges(const NodeId& id) const {
    auto it = out_.find(id);
    if (it == out_.end()) return {};
    return it->second;
  }

  std::vector<const DialogNode*> successors(const NodeId& id) const {
    node(id);
    std::vector<const DialogNode*> nodes;
    for (const Edge* e : out_edges(id))
      if (const DialogNode* n = project_->find_node(e->to)) nodes.push_back(n);
    return nodes;
  }

 private:
  std::shared_ptr<const Project> project_;
  std::unordered_map<NodeId, std::vector<const Edge*>> out_;
  std::unordered_map<std::string, const DialogNode*> starts_;
};

}  // namespace simdialog

#endif  // SIMDIALOG_GRAPH_HPP
