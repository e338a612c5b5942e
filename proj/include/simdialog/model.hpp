#ifndef SIMDIALOG_MODEL_HPP
#define SIMDIALOG_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "simdialog/error.hpp"

namespace simdialog {

using NodeId = std::string;
using ActorId = std::string;

/// Which side of a conversation a state or actor belongs to.
enum class Scope { Player, Npc };

inline std::string_view to_string(Scope scope) { return scope == Scope::Player ? "player" : "npc"; }

/// Clamps a state value into [-1, 1]. NaN is rejected rather than clamped.
inline double clamp_unit(double value) {
  if (std::isnan(value)) throw Error(ErrorCode::InvalidArgument, "state value is NaN");
  return std::clamp(value, -1.0, 1.0);
}

inline bool in_unit_range(double value) { return value >= -1.0 && value <= 1.0; }

struct StateDeclaration {
  std::string name;
  double default_value = 0.0;

  bool operator==(const StateDeclaration&) const = default;
};

/// Ordered, named state values, every component kept in [-1, 1].
/// Component i corresponds to declaration i of its scope.
class StateVector {
 public:
  StateVector() = default;

  explicit StateVector(std::span<const StateDeclaration> decls) {
    names_.reserve(decls.size());
    values_.reserve(decls.size());
    for (const auto& decl : decls) {
      names_.push_back(decl.name);
      values_.push_back(clamp_unit(decl.default_value));
    }
  }

  StateVector(std::vector<std::string> names, std::vector<double> values)
      : names_(std::move(names)), values_(std::move(values)) {
    if (names_.size() != values_.size())
      throw Error(ErrorCode::DimensionMismatch, "state names and values differ in length");
    for (auto& v : values_) v = clamp_unit(v);
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  double operator[](std::size_t i) const { return values_.at(i); }

  double value(std::string_view name) const { return values_[require(name)]; }

  void set(std::size_t i, double v) { values_.at(i) = clamp_unit(v); }
  void set(std::string_view name, double v) { set(require(name), v); }

  bool operator==(const StateVector&) const = default;

 private:
  std::size_t require(std::string_view name) const {
    auto idx = index_of(name);
    if (!idx) throw Error(ErrorCode::NotFound, "unknown state '" + std::string(name) + "'");
    return *idx;
  }

  std::vector<std::string> names_;
  std::vector<double> values_;
};

struct Actor {
  ActorId id;
  std::string display_name;
  Scope kind = Scope::Npc;
  std::map<std::string, std::string> attributes;
  std::string color;  // cue bar render hint, e.g. "#c0392b"

  bool operator==(const Actor&) const = default;
};

/// Coefficients of the cause score: general + player weights + NPC weights.
struct CauseWeights {
  double general = 0.0;
  std::vector<double> player;
  std::vector<double> npc;

  static CauseWeights zero(std::size_t player_count, std::size_t npc_count) {
    return {0.0, std::vector<double>(player_count, 0.0), std::vector<double>(npc_count, 0.0)};
  }

  bool operator==(const CauseWeights&) const = default;
};

struct EffectWeights {
  std::vector<double> player;
  std::vector<double> npc;

  static EffectWeights zero(std::size_t player_count, std::size_t npc_count) {
    return {std::vector<double>(player_count, 0.0), std::vector<double>(npc_count, 0.0)};
  }

  bool operator==(const EffectWeights&) const = default;
};

enum class AssetRole { Audio, LipSync, Other };

inline std::string_view to_string(AssetRole role) {
  switch (role) {
    case AssetRole::Audio: return "audio";
    case AssetRole::LipSync: return "lipsync";
    case AssetRole::Other: return "other";
  }
  return "other";
}

inline std::optional<AssetRole> parse_asset_role(std::string_view text) {
  if (text == "audio") return AssetRole::Audio;
  if (text == "lipsync") return AssetRole::LipSync;
  if (text == "other") return AssetRole::Other;
  return std::nullopt;
}

struct Asset {
  AssetRole role = AssetRole::Other;
  std::string path;

  bool operator==(const Asset&) const = default;
};

struct StartNode {
  std::string name;
  EffectWeights effect;

  bool operator==(const StartNode&) const = default;
};

/// One line that can be spoken (a cue), with its stage direction and metadata.
struct DialogItem {
  ActorId actor;
  std::optional<ActorId> conversant;
  std::optional<std::string> cue;
  std::optional<std::string> direction;
  std::optional<std::string> menu_label;
  std::optional<CauseWeights> cause;  // NPC items only
  EffectWeights effect;
  std::vector<Asset> assets;

  bool operator==(const DialogItem&) const = default;
};

struct TerminationNode {
  std::string direction;
  std::optional<std::string> termination_value;
  std::optional<CauseWeights> cause;  // scored like an NPC reply when competing with one

  bool operator==(const TerminationNode&) const = default;
};

struct ReferenceNode {
  std::string target_start;

  bool operator==(const ReferenceNode&) const = default;
};

struct SubdialogNode {
  std::string target_start;

  bool operator==(const SubdialogNode&) const = default;
};

enum class NodeKind { Start, Item, Termination, Reference, Subdialog };

inline std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Start: return "start";
    case NodeKind::Item: return "item";
    case NodeKind::Termination: return "termination";
    case NodeKind::Reference: return "reference";
    case NodeKind::Subdialog: return "subdialog";
  }
  return "item";
}

struct DialogNode {
  using Body = std::variant<StartNode, DialogItem, TerminationNode, ReferenceNode, SubdialogNode>;

  NodeId id;
  Body body;

  NodeKind kind() const noexcept { return static_cast<NodeKind>(body.index()); }

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(body);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(body);
  }
  template <class T>
  T& as() {
    return std::get<T>(body);
  }

  bool operator==(const DialogNode&) const = default;
};

struct Edge {
  NodeId from;
  NodeId to;
  int order = 0;
  std::optional<std::string> branch;  // only on edges leaving a subdialog node

  bool operator==(const Edge&) const = default;
  auto key() const { return std::tie(from, order, to, branch); }
};

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

/// Organizational grouping of nodes; carries no runtime meaning.
struct Page {
  std::string name;
  std::set<NodeId> node_ids;
  std::map<NodeId, Position> layout;

  bool operator==(const Page&) const = default;
};

struct Metadata {
  std::string title;
  std::string version;

  bool operator==(const Metadata&) const = default;
};

/// The whole authored artifact. Keyed containers keep actors, pages and
/// nodes in canonical id order; edges keep authoring order in memory and are
/// compared as a multiset.
struct Project {
  Metadata metadata;
  std::map<ActorId, Actor> actors;
  std::vector<StateDeclaration> player_states;
  std::vector<StateDeclaration> npc_states;
  std::map<std::string, Page> pages;
  std::map<NodeId, DialogNode> nodes;
  std::vector<Edge> edges;

  const DialogNode* find_node(const NodeId& id) const {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
  }

  const Actor* find_actor(const ActorId& id) const {
    auto it = actors.find(id);
    return it == actors.end() ? nullptr : &it->second;
  }

  /// First start node with the given name, by node id order.
  const DialogNode* find_start(std::string_view name) const {
    for (const auto& [id, node] : nodes)
      if (node.is<StartNode>() && node.as<StartNode>().name == name) return &node;
    return nullptr;
  }

  const std::vector<StateDeclaration>& states(Scope scope) const {
    return scope == Scope::Player ? player_states : npc_states;
  }

  std::vector<ActorId> actor_ids(Scope kind) const {
    std::vector<ActorId> out;
    for (const auto& [id, actor] : actors)
      if (actor.kind == kind) out.push_back(id);
    return out;
  }

  std::vector<Edge> sorted_edges() const {
    auto out = edges;
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
    return out;
  }

  friend bool operator==(const Project& a, const Project& b) {
    return a.metadata == b.metadata && a.actors == b.actors && a.player_states == b.player_states &&
           a.npc_states == b.npc_states && a.pages == b.pages && a.nodes == b.nodes &&
           a.sorted_edges() == b.sorted_edges();
  }
};

/// The NPC whose states a dialog item reads (cause) and writes (effect):
/// the speaker if it is an NPC, otherwise the addressed conversant. A player
/// item without a conversant falls back to the project's only NPC.
inline std::optional<ActorId> npc_party(const Project& project, const DialogItem& item) {
  if (const Actor* speaker = project.find_actor(item.actor); speaker && speaker->kind == Scope::Npc)
    return speaker->id;
  if (item.conversant) return item.conversant;
  auto npcs = project.actor_ids(Scope::Npc);
  if (npcs.size() == 1) return npcs.front();
  return std::nullopt;
}

inline bool is_player_item(const Project& project, const DialogNode& node) {
  if (!node.is<DialogItem>()) return false;
  const Actor* actor = project.find_actor(node.as<DialogItem>().actor);
  return actor != nullptr && actor->kind == Scope::Player;
}

}  // namespace simdialog

#endif  // SIMDIALOG_MODEL_HPP
