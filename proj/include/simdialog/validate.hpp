#ifndef SIMDIALOG_VALIDATE_HPP
#define SIMDIALOG_VALIDATE_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simdialog/model.hpp"

namespace simdialog {

enum class Severity { Info, Warning, Error };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "error";
}

/// What a diagnostic is about. Each Error kind corresponds to exactly one
/// structural invariant of the model.
enum class Check {
  // errors
  NoPlayerActor,
  InvalidActor,
  InvalidStateDeclaration,
  DuplicateStateName,
  StateDefaultOutOfRange,
  InvalidNodeId,
  NodeWithoutPage,
  NodeInMultiplePages,
  PageUnknownNode,
  DanglingEdge,
  DuplicateEdgeOrder,
  MisplacedBranchLabel,
  UnresolvedTarget,
  DuplicateStartName,
  StartHasIncoming,
  TerminalHasOutgoing,
  EmptyItem,
  UnknownActor,
  PlayerItemWithCause,
  NpcItemWithoutCause,
  MissingConversant,
  WeightDimension,
  WeightOutOfRange,
  InvalidAsset,
  // warnings
  Unreachable,
  Cycle,
  MixedSuccessors,
  DeadEnd,
  // info
  Note,
};

struct Diagnostic {
  Severity severity = Severity::Error;
  Check check = Check::Note;
  std::optional<NodeId> node;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

inline std::string format(const Diagnostic& d) {
  std::string out(to_string(d.severity));
  if (d.node) out += "[" + *d.node + "]";
  out += ": " + d.message;
  return out;
}

inline std::size_t count(const std::vector<Diagnostic>& diags, Severity severity) {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.severity == severity; }));
}

inline bool has_errors(const std::vector<Diagnostic>& diags) { return count(diags, Severity::Error) > 0; }

namespace detail {

class Validator {
 public:
  explicit Validator(const Project& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    actors();
    states(Scope::Player);
    states(Scope::Npc);
    pages();
    nodes();
    edges();
    structure();
    return std::move(out_);
  }

 private:
  void error(Check c, std::optional<NodeId> node, std::string msg) {
    out_.push_back({Severity::Error, c, std::move(node), std::move(msg)});
  }
  void warning(Check c, std::optional<NodeId> node, std::string msg) {
    out_.push_back({Severity::Warning, c, std::move(node), std::move(msg)});
  }

  void actors() {
    bool has_player = false;
    for (const auto& [key, actor] : p_.actors) {
      if (actor.id.empty() || actor.id != key) error(Check::InvalidActor, std::nullopt, "actor key '" + key + "' does not match its id '" + actor.id + "'");
      has_player = has_player || actor.kind == Scope::Player;
    }
    if (!has_player) error(Check::NoPlayerActor, std::nullopt, "project declares no player actor");
  }

  void states(Scope scope) {
    std::set<std::string> seen;
    const std::string s(to_string(scope));
    for (const auto& decl : p_.states(scope)) {
      if (decl.name.empty()) error(Check::InvalidStateDeclaration, std::nullopt, s + " state with empty name");
      else if (!seen.insert(decl.name).second) error(Check::DuplicateStateName, std::nullopt, s + " state '" + decl.name + "' declared twice");
      if (!in_unit_range(decl.default_value))
        error(Check::StateDefaultOutOfRange, std::nullopt, s + " state '" + decl.name + "' default is outside [-1, 1]");
    }
  }

  void pages() {
    std::map<NodeId, int> membership;
    for (const auto& [name, page] : p_.pages) {
      for (const auto& id : page.node_ids) {
        ++membership[id];
        if (!p_.nodes.contains(id)) error(Check::PageUnknownNode, std::nullopt, "page '" + name + "' lists unknown node '" + id + "'");
      }
      for (const auto& [id, pos] : page.layout)
        if (!page.node_ids.contains(id)) error(Check::PageUnknownNode, std::nullopt, "page '" + name + "' has a layout entry for non-member node '" + id + "'");
    }
    for (const auto& [id, node] : p_.nodes) {
      int m = membership.contains(id) ? membership[id] : 0;
      if (m == 0) error(Check::NodeWithoutPage, id, "node belongs to no page");
      if (m > 1) error(Check::NodeInMultiplePages, id, "node belongs to " + std::to_string(m) + " pages");
    }
  }

  void weights(const NodeId& id, std::string_view what, const std::vector<double>& v, Scope scope) {
    const auto expected = p_.states(scope).size();
    if (v.size() != expected) {
      error(Check::WeightDimension, id,
            std::string(what) + " has " + std::to_string(v.size()) + " " + std::string(to_string(scope)) +
                " components, expected " + std::to_string(expected));
    }
    for (double w : v) {
      if (!in_unit_range(w)) {
        error(Check::WeightOutOfRange, id, std::string(what) + " has a component outside [-1, 1]");
        break;
      }
    }
  }

  void cause(const NodeId& id, const CauseWeights& c) {
    if (!in_unit_range(c.general)) error(Check::WeightOutOfRange, id, "general cause weight is outside [-1, 1]");
    weights(id, "cause", c.player, Scope::Player);
    weights(id, "cause", c.npc, Scope::Npc);
  }

  void effect(const NodeId& id, const EffectWeights& e) {
    weights(id, "effect", e.player, Scope::Player);
    weights(id, "effect", e.npc, Scope::Npc);
  }

  void target(const NodeId& id, const std::string& start) {
    if (p_.find_start(start) == nullptr) error(Check::UnresolvedTarget, id, "target '" + start + "' does not name a start node");
  }

  void nodes() {
    std::map<std::string, NodeId> start_names;
    const auto npc_count = p_.actor_ids(Scope::Npc).size();
    for (const auto& [key, node] : p_.nodes) {
      if (node.id.empty() || node.id != key) error(Check::InvalidNodeId, key, "node key does not match its id '" + node.id + "'");
      if (const auto* s = std::get_if<StartNode>(&node.body)) {
        if (s->name.empty()) error(Check::UnresolvedTarget, key, "start node has an empty name");
        else if (auto [it, fresh] = start_names.try_emplace(s->name, key); !fresh)
          error(Check::DuplicateStartName, key, "start name '" + s->name + "' is also used by node '" + it->second + "'");
        effect(key, s->effect);
      } else if (const auto* item = std::get_if<DialogItem>(&node.body)) {
        dialog_item(key, *item, npc_count);
      } else if (const auto* t = std::get_if<TerminationNode>(&node.body)) {
        if (t->cause) cause(key, *t->cause);
      } else if (const auto* r = std::get_if<ReferenceNode>(&node.body)) {
        target(key, r->target_start);
      } else if (const auto* sd = std::get_if<SubdialogNode>(&node.body)) {
        target(key, sd->target_start);
      }
    }
  }

  void dialog_item(const NodeId& id, const DialogItem& item, std::size_t npc_count) {
    if (!item.cue && !item.direction) error(Check::EmptyItem, id, "dialog item has neither cue nor direction");
    const Actor* speaker = p_.find_actor(item.actor);
    if (speaker == nullptr) {
      error(Check::UnknownActor, id, "unknown actor '" + item.actor + "'");
    } else if (speaker->kind == Scope::Player) {
      if (item.cause) error(Check::PlayerItemWithCause, id, "player item carries a cause");
      if (item.conversant) {
        const Actor* c = p_.find_actor(*item.conversant);
        if (c == nullptr || c->kind != Scope::Npc)
          error(Check::UnknownActor, id, "conversant '" + *item.conversant + "' is not an NPC actor");
      } else if (npc_count > 1) {
        error(Check::MissingConversant, id, "player item needs an explicit conversant when several NPCs exist");
      }
    } else {
      if (!item.cause) error(Check::NpcItemWithoutCause, id, "NPC item has no cause weights");
      if (item.conversant && p_.find_actor(*item.conversant) == nullptr)
        error(Check::UnknownActor, id, "unknown conversant '" + *item.conversant + "'");
    }
    if (item.cause) cause(id, *item.cause);
    effect(id, item.effect);
    for (const auto& a : item.assets)
      if (a.path.empty()) error(Check::InvalidAsset, id, "asset with empty path");
  }

  void edges() {
    std::set<std::pair<NodeId, int>> orders;
    for (const auto& e : p_.edges) {
      const DialogNode* from = p_.find_node(e.from);
      const DialogNode* to = p_.find_node(e.to);
      if (from == nullptr || to == nullptr) {
        error(Check::DanglingEdge, from ? std::optional(e.from) : std::nullopt,
              "edge " + e.from + " -> " + e.to + " has a missing endpoint");
        continue;
      }
      if (!orders.emplace(e.from, e.order).second)
        error(Check::DuplicateEdgeOrder, e.from, "two outgoing edges share order " + std::to_string(e.order));
      if (e.branch && !from->is<SubdialogNode>())
        error(Check::MisplacedBranchLabel, e.from, "branch label on an edge that does not leave a subdialog node");
      if (to->is<StartNode>()) error(Check::StartHasIncoming, e.to, "start node has an incoming edge from '" + e.from + "'");
      if (from->is<TerminationNode>() || from->is<ReferenceNode>())
        error(Check::TerminalHasOutgoing, e.from, std::string(to_string(from->kind())) + " node has an outgoing edge");
    }
  }

  // Reachability, cycles, mixed successors and dead ends: all warnings.
  void structure() {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [id, node] : p_.nodes) adj[id];
    for (const auto& e : p_.edges)
      if (p_.nodes.contains(e.from) && p_.nodes.contains(e.to)) adj[e.from].push_back(e.to);

    std::set<NodeId> reached;
    std::vector<NodeId> stack;
    for (const auto& [id, node] : p_.nodes)
      if (node.is<StartNode>()) stack.push_back(id);
    while (!stack.empty()) {
      NodeId id = std::move(stack.back());
      stack.pop_back();
      if (!reached.insert(id).second) continue;
      for (const auto& next : adj[id]) stack.push_back(next);
    }
    for (const auto& [id, node] : p_.nodes)
      if (!reached.contains(id)) warning(Check::Unreachable, id, "node is not reachable from any start node");

    for (auto& scc : cyclic_components(adj)) {
      std::sort(scc.begin(), scc.end());
      std::string members;
      for (const auto& id : scc) members += (members.empty() ? "" : ", ") + id;
      warning(Check::Cycle, scc.front(), "cycle through nodes {" + members + "}");
    }

    for (const auto& [id, node] : p_.nodes) {
      bool player = false, other_item = false;
      for (const auto& next : adj[id]) {
        const DialogNode& n = p_.nodes.at(next);
        if (is_player_item(p_, n)) player = true;
        else if (n.is<DialogItem>()) other_item = true;
      }
      if (player && other_item)
        warning(Check::MixedSuccessors, id, "followed by both player and NPC items; NPC items are ignored while the player menu is shown");
      if ((node.is<StartNode>() || node.is<DialogItem>()) && adj[id].empty())
        warning(Check::DeadEnd, id, "conversation cannot continue past this node");
    }
  }

  // Tarjan's algorithm, iterative. Returns components that contain a cycle.
  static std::vector<std::vector<NodeId>> cyclic_components(const std::map<NodeId, std::vector<NodeId>>& adj) {
    struct Frame {
      NodeId id;
      std::size_t next = 0;
    };
    std::map<NodeId, int> index, low;
    std::set<NodeId> on_stack;
    std::vector<NodeId> stack;
    std::vector<std::vector<NodeId>> result;
    int counter = 0;

    for (const auto& [root, _] : adj) {
      if (index.contains(root)) continue;
      std::vector<Frame> frames{{root}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack.insert(root);
      while (!frames.empty()) {
        Frame& f = frames.back();
        const auto& out = adj.at(f.id);
        if (f.next < out.size()) {
          const NodeId& w = out[f.next++];
          if (!index.contains(w)) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack.insert(w);
            frames.push_back({w});
          } else if (on_stack.contains(w)) {
            low[f.id] = std::min(low[f.id], index[w]);
          }
          continue;
        }
        NodeId v = f.id;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().id] = std::min(low[frames.back().id], low[v]);
        if (low[v] != index[v]) continue;
        std::vector<NodeId> scc;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          scc.push_back(w);
        } while (w != v);
        bool self_loop = std::find(adj.at(v).begin(), adj.at(v).end(), v) != adj.at(v).end();
        if (scc.size() > 1 || self_loop) result.push_back(std::move(scc));
      }
    }
    return result;
  }

  const Project& p_;
  std::vector<Diagnostic> out_;
};

}  // namespace detail

/// Structural checks. Errors mark broken invariants; cycles, unreachable
/// nodes and similar oddities are warnings since any graph shape is allowed.
inline std::vector<Diagnostic> validate(const Project& project) { return detail::Validator(project).run(); }

}  // namespace simdialog

#endif  // SIMDIALOG_VALIDATE_HPP
