#ifndef SIMDIALOG_BUILDER_HPP
#define SIMDIALOG_BUILDER_HPP

#include <string>
#include <utility>

#include "simdialog/model.hpp"

namespace simdialog {

/// Single-threaded construction helper. Nodes are added to the current page;
/// weight vectors are sized to the declared states when build() is called.
/// The builder does not validate: invalid projects stay representable so
/// validate() can report on them.
class ProjectBuilder {
 public:
  ProjectBuilder() = default;
  explicit ProjectBuilder(Project base) : project_(std::move(base)) {}

  ProjectBuilder& title(std::string title) {
    project_.metadata.title = std::move(title);
    return *this;
  }

  ProjectBuilder& actor(ActorId id, std::string display_name, Scope kind) {
    Actor a;
    a.id = id;
    a.display_name = std::move(display_name);
    a.kind = kind;
    project_.actors[id] = std::move(a);
    return *this;
  }
  ProjectBuilder& player(ActorId id, std::string name) { return actor(std::move(id), std::move(name), Scope::Player); }
  ProjectBuilder& npc(ActorId id, std::string name) { return actor(std::move(id), std::move(name), Scope::Npc); }

  ProjectBuilder& state(Scope scope, std::string name, double default_value = 0.0) {
    auto& decls = scope == Scope::Player ? project_.player_states : project_.npc_states;
    decls.push_back({std::move(name), default_value});
    return *this;
  }
  ProjectBuilder& player_state(std::string name, double default_value = 0.0) {
    return state(Scope::Player, std::move(name), default_value);
  }
  ProjectBuilder& npc_state(std::string name, double default_value = 0.0) {
    return state(Scope::Npc, std::move(name), default_value);
  }

  ProjectBuilder& page(std::string name) {
    auto& p = project_.pages[name];
    p.name = name;
    current_page_ = std::move(name);
    return *this;
  }

  NodeId add(DialogNode::Body body, NodeId id = {}) {
    if (current_page_.empty()) page("main");
    if (id.empty()) id = fresh_id();
    project_.nodes[id] = DialogNode{id, std::move(body)};
    project_.pages[current_page_].node_ids.insert(id);
    return id;
  }

  NodeId start(std::string name, NodeId id = {}) { return add(StartNode{std::move(name), {}}, std::move(id)); }

  /// Adds a dialog item. NPC speakers get a zero cause so the item is valid as-is.
  NodeId item(ActorId actor, std::optional<std::string> cue, std::optional<std::string> direction = std::nullopt,
              NodeId id = {}) {
    DialogItem it;
    const Actor* a = project_.find_actor(actor);
    it.actor = std::move(actor);
    it.cue = std::move(cue);
    it.direction = std::move(direction);
    if (a != nullptr && a->kind == Scope::Npc) it.cause = CauseWeights{};
    return add(std::move(it), std::move(id));
  }

  NodeId termination(std::string direction, std::optional<std::string> value = std::nullopt, NodeId id = {}) {
    return add(TerminationNode{std::move(direction), std::move(value), std::nullopt}, std::move(id));
  }
  NodeId reference(std::string target_start, NodeId id = {}) {
    return add(ReferenceNode{std::move(target_start)}, std::move(id));
  }
  NodeId subdialog(std::string target_start, NodeId id = {}) {
    return add(SubdialogNode{std::move(target_start)}, std::move(id));
  }

  /// Links from -> to. A negative order means "next free order after the
  /// source's existing edges".
  ProjectBuilder& link(const NodeId& from, const NodeId& to, int order = -1,
                       std::optional<std::string> branch = std::nullopt) {
    if (order < 0) {
      order = 0;
      for (const auto& e : project_.edges)
        if (e.from == from) order = std::max(order, e.order + 1);
    }
    project_.edges.push_back({from, to, order, std::move(branch)});
    return *this;
  }

  /// Links a run of nodes into a chain.
  ProjectBuilder& chain(std::initializer_list<NodeId> ids) {
    const NodeId* prev = nullptr;
    for (const auto& id : ids) {
      if (prev != nullptr) link(*prev, id);
      prev = &id;
    }
    return *this;
  }

  ProjectBuilder& general(const NodeId& id, double w) {
    cause_of(id).general = w;
    return *this;
  }

  ProjectBuilder& cause(const NodeId& id, Scope scope, std::string_view state, double w) {
    auto& c = cause_of(id);
    auto& vec = scope == Scope::Player ? c.player : c.npc;
    set_component(vec, scope, state, w);
    return *this;
  }

  ProjectBuilder& effect(const NodeId& id, Scope scope, std::string_view state, double e) {
    auto& node = require(id);
    EffectWeights* eff = nullptr;
    if (node.is<StartNode>()) eff = &node.as<StartNode>().effect;
    else if (node.is<DialogItem>()) eff = &node.as<DialogItem>().effect;
    else throw Error(ErrorCode::InvalidArgument, "node '" + id + "' carries no effect");
    set_component(scope == Scope::Player ? eff->player : eff->npc, scope, state, e);
    return *this;
  }

  ProjectBuilder& label(const NodeId& id, std::string text) {
    item_of(id).menu_label = std::move(text);
    return *this;
  }
  ProjectBuilder& conversant(const NodeId& id, ActorId actor) {
    item_of(id).conversant = std::move(actor);
    return *this;
  }
  ProjectBuilder& asset(const NodeId& id, AssetRole role, std::string path) {
    item_of(id).assets.push_back({role, std::move(path)});
    return *this;
  }
  ProjectBuilder& position(const NodeId& id, double x, double y) {
    for (auto& [name, page] : project_.pages)
      if (page.node_ids.contains(id)) page.layout[id] = {x, y};
    return *this;
  }

  /// Direct access for edits the helpers do not cover.
  Project& draft() noexcept { return project_; }

  Project build() const {
    Project out = project_;
    const auto np = out.player_states.size();
    const auto nn = out.npc_states.size();
    auto pad = [](std::vector<double>& v, std::size_t n) {
      if (v.size() < n) v.resize(n, 0.0);
    };
    for (auto& [id, node] : out.nodes) {
      std::visit(
          [&](auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, StartNode>) {
              pad(body.effect.player, np);
              pad(body.effect.npc, nn);
            } else if constexpr (std::is_same_v<T, DialogItem>) {
              pad(body.effect.player, np);
              pad(body.effect.npc, nn);
              if (body.cause) {
                pad(body.cause->player, np);
                pad(body.cause->npc, nn);
              }
            } else if constexpr (std::is_same_v<T, TerminationNode>) {
              if (body.cause) {
                pad(body.cause->player, np);
                pad(body.cause->npc, nn);
              }
            }
          },
          node.body);
    }
    return out;
  }

 private:
  NodeId fresh_id() {
    NodeId id;
    do {
      id = "n" + std::to_string(++counter_);
    } while (project_.nodes.contains(id));
    return id;
  }

  DialogNode& require(const NodeId& id) {
    auto it = project_.nodes.find(id);
    if (it == project_.nodes.end()) throw Error(ErrorCode::NotFound, "unknown node '" + id + "'");
    return it->second;
  }

  DialogItem& item_of(const NodeId& id) {
    auto& node = require(id);
    if (!node.is<DialogItem>()) throw Error(ErrorCode::InvalidArgument, "node '" + id + "' is not a dialog item");
    return node.as<DialogItem>();
  }

  CauseWeights& cause_of(const NodeId& id) {
    auto& node = require(id);
    std::optional<CauseWeights>* slot = nullptr;
    if (node.is<DialogItem>()) slot = &node.as<DialogItem>().cause;
    else if (node.is<TerminationNode>()) slot = &node.as<TerminationNode>().cause;
    else throw Error(ErrorCode::InvalidArgument, "node '" + id + "' carries no cause");
    if (!*slot) *slot = CauseWeights{};
    return **slot;
  }

  void set_component(std::vector<double>& vec, Scope scope, std::string_view state, double w) {
    const auto& decls = project_.states(scope);
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == state) {
        if (vec.size() < decls.size()) vec.resize(decls.size(), 0.0);
        vec[i] = w;
        return;
      }
    }
    throw Error(ErrorCode::NotFound, "unknown " + std::string(to_string(scope)) + " state '" + std::string(state) + "'");
  }

  Project project_;
  std::string current_page_;
  int counter_ = 0;
};

}  // namespace simdialog

#endif  // SIMDIALOG_BUILDER_HPP
