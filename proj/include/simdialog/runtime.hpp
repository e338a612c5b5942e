#ifndef SIMDIALOG_RUNTIME_HPP
#define SIMDIALOG_RUNTIME_HPP

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <string>
#include <variant>
#include <vector>

#include "simdialog/graph.hpp"
#include "simdialog/scoring.hpp"

namespace simdialog {

/// At rest a session is either waiting on the player or finished. NpcTurn is
/// only observable while the engine is auto-advancing.
enum class Phase { AwaitingChoice, NpcTurn, Ended };

inline std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::AwaitingChoice: return "awaiting-choice";
    case Phase::NpcTurn: return "npc-turn";
    case Phase::Ended: return "ended";
  }
  return "ended";
}

struct Ending {
  std::string direction;
  std::optional<std::string> termination_value;

  bool operator==(const Ending&) const = default;
};

struct TranscriptEntry {
  NodeId node;
  NodeKind kind = NodeKind::Item;
  std::optional<ActorId> actor;
  std::optional<std::string> cue;
  std::optional<std::string> direction;
  std::optional<double> score;  // set when the node won an NPC selection
  StateVector player_after;
  std::optional<ActorId> conversant;
  StateVector conversant_after;

  bool operator==(const TranscriptEntry&) const = default;
};

struct MenuOption {
  NodeId node;
  std::string label;
  int order = 0;

  bool operator==(const MenuOption&) const = default;
};

/// A manual state edit. `scope` is "player", "npc" (the current conversant)
/// or the id of an NPC actor.
struct StateEdit {
  std::string scope;
  std::string name;
  double value = 0.0;
};

struct SessionOptions {
  std::size_t max_steps = 10'000;
};

/// Live traversal of one conversation. Copyable; a session is confined to one
/// thread at a time, while the graph it runs on is shared and immutable.
class Session {
 public:
  static Session start(std::shared_ptr<const DialogGraph> graph, std::string_view start_name,
                       SelectionPolicy policy = {}, std::span<const StateEdit> overrides = {},
                       SessionOptions options = {}) {
    Session s(std::move(graph), policy, options);
    const DialogNode& start = s.graph_->start(start_name);
    s.phase_ = Phase::NpcTurn;
    s.apply_start_effect(start.as<StartNode>());
    for (const auto& edit : overrides) s.set_state(edit.scope, edit.name, edit.value);
    s.current_ = start.id;
    s.record(start, std::nullopt);
    s.settle(1, nullptr, std::nullopt);
    return s;
  }

  Phase phase() const noexcept { return phase_; }
  const std::optional<Ending>& ending() const noexcept { return ending_; }
  const NodeId& current_node() const noexcept { return current_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }
  const StateVector& player_states() const noexcept { return player_; }
  const std::map<ActorId, StateVector>& npc_states() const noexcept { return npcs_; }
  const std::optional<ActorId>& conversant() const noexcept { return conversant_; }
  std::size_t stack_depth() const noexcept { return stack_.size(); }
  const SelectionPolicy& policy() const noexcept { return policy_; }
  const DialogGraph& graph() const noexcept { return *graph_; }

  const StateVector& npc_states(const ActorId& id) const {
    auto it = npcs_.find(id);
    if (it == npcs_.end()) throw Error(ErrorCode::NotFound, "no NPC states for '" + id + "'");
    return it->second;
  }

  /// Player items among the pending successors, in edge order.
  std::vector<MenuOption> menu_options() const {
    if (phase_ != Phase::AwaitingChoice)
      throw Error(ErrorCode::InvalidPhase, "menu requested while session is " + std::string(to_string(phase_)));
    std::vector<MenuOption> menu;
    for (const auto& [edge, node] : pending()) {
      if (!is_player_item(graph_->project(), *node)) continue;
      const auto& item = node->as<DialogItem>();
      std::string label = item.menu_label && !item.menu_label->empty() ? *item.menu_label
                          : item.cue && !item.cue->empty()             ? *item.cue
                          : item.direction                             ? "[" + *item.direction + "]"
                                                                       : node->id;
      menu.push_back({node->id, std::move(label), edge->order});
    }
    return menu;
  }

  /// Plays the chosen player item, then auto-advances through NPC turns,
  /// references, subdialogs and terminations until the next menu or the end.
  /// On error the session is left unchanged.
  void choose(const NodeId& option) {
    const auto menu = menu_options();
    auto it = std::find_if(menu.begin(), menu.end(), [&](const MenuOption& m) { return m.node == option; });
    if (it == menu.end()) throw Error(ErrorCode::InvalidChoice, "'" + option + "' is not on the current menu");
    Session next = *this;
    next.phase_ = Phase::NpcTurn;
    next.settle(0, &graph_->node(option), std::nullopt);
    *this = std::move(next);
  }

  /// Sets a state to clamp(value, -1, 1). No traversal happens.
  void set_state(std::string_view scope, std::string_view name, double value) { target(scope).set(name, value); }

  double state(std::string_view scope, std::string_view name) const { return target(scope).value(name); }

 private:
  Session(std::shared_ptr<const DialogGraph> graph, SelectionPolicy policy, SessionOptions options)
      : graph_(std::move(graph)), policy_(policy), options_(options), rng_(policy.seed) {
    const Project& p = graph_->project();
    player_ = StateVector(p.player_states);
    for (const auto& id : p.actor_ids(Scope::Npc)) npcs_.emplace(id, StateVector(p.npc_states));
    if (npcs_.size() == 1) conversant_ = npcs_.begin()->first;
    empty_npc_ = StateVector(std::vector<std::string>(p.npc_states.size()), std::vector<double>(p.npc_states.size(), 0.0));
  }

  StateVector& target(std::string_view scope) {
    return const_cast<StateVector&>(std::as_const(*this).target(scope));
  }

  const StateVector& target(std::string_view scope) const {
    if (scope == "player") return player_;
    if (scope == "npc") {
      if (!conversant_) throw Error(ErrorCode::NotFound, "no current conversant for scope 'npc'");
      return npcs_.at(*conversant_);
    }
    auto it = npcs_.find(std::string(scope));
    if (it == npcs_.end()) throw Error(ErrorCode::NotFound, "unknown state scope '" + std::string(scope) + "'");
    return it->second;
  }

  StateVector& npc_vector(const std::optional<ActorId>& id) {
    if (!id) return empty_npc_;
    auto it = npcs_.find(*id);
    if (it == npcs_.end()) throw Error(ErrorCode::NotFound, "no NPC states for '" + *id + "'");
    return it->second;
  }

  using PendingEdge = std::pair<const Edge*, const DialogNode*>;

  /// Successors of the current node. After a subdialog returns, only the
  /// edges whose branch label matches the termination value are pending.
  std::vector<PendingEdge> pending() const {
    std::vector<PendingEdge> out;
    for (const Edge* e : graph_->out_edges(current_)) {
      if (branch_filter_ && e->branch != *branch_filter_) continue;
      out.emplace_back(e, &graph_->node(e->to));
    }
    return out;
  }

  void apply_start_effect(const StartNode& start) {
    player_ = apply_effect(player_, start.effect.player);
    // The start node has no speaker, so its NPC effect initializes every NPC.
    for (auto& [id, states] : npcs_) states = apply_effect(states, start.effect.npc);
  }

  void record(const DialogNode& node, std::optional<double> score) {
    TranscriptEntry e;
    e.node = node.id;
    e.kind = node.kind();
    e.score = score;
    if (const auto* item = std::get_if<DialogItem>(&node.body)) {
      e.actor = item->actor;
      e.cue = item->cue;
      e.direction = item->direction;
    } else if (const auto* t = std::get_if<TerminationNode>(&node.body)) {
      e.direction = t->direction;
    }
    e.player_after = player_;
    e.conversant = conversant_;
    if (conversant_) e.conversant_after = npcs_.at(*conversant_);
    transcript_.push_back(std::move(e));
  }

  /// Executes one node. Returns a node that must run immediately after it
  /// (the start node behind a reference or subdialog), else nullptr.
  const DialogNode* execute(const DialogNode& node, std::optional<double> score) {
    branch_filter_.reset();
    current_ = node.id;
    const Project& p = graph_->project();
    switch (node.kind()) {
      case NodeKind::Start:
        apply_start_effect(node.as<StartNode>());
        record(node, score);
        return nullptr;
      case NodeKind::Item: {
        const auto& item = node.as<DialogItem>();
        player_ = apply_effect(player_, item.effect.player);
        if (auto npc = npc_party(p, item)) {
          StateVector& states = npc_vector(npc);
          states = apply_effect(states, item.effect.npc);
          conversant_ = npc;
        }
        record(node, score);
        return nullptr;
      }
      case NodeKind::Reference:
        record(node, score);
        return &graph_->start(node.as<ReferenceNode>().target_start);
      case NodeKind::Subdialog:
        stack_.push_back(node.id);
        record(node, score);
        return &graph_->start(node.as<SubdialogNode>().target_start);
      case NodeKind::Termination: {
        const auto& t = node.as<TerminationNode>();
        record(node, score);
        if (stack_.empty()) {
          phase_ = Phase::Ended;
          ending_ = Ending{t.direction, t.termination_value};
        } else {
          current_ = stack_.back();
          stack_.pop_back();
          branch_filter_ = t.termination_value;
        }
        return nullptr;
      }
    }
    return nullptr;
  }

  /// Runs nodes until the session rests. `executed` counts nodes already run
  /// in this advance; reaching max_steps without resting is a CycleOverflow.
  void settle(std::size_t executed, const DialogNode* next, std::optional<double> score) {
    const Project& p = graph_->project();
    while (true) {
      if (next != nullptr) {
        if (executed >= options_.max_steps) throw CycleOverflowError(executed);
        ++executed;
        next = execute(*next, score);
        score.reset();
        if (next != nullptr || phase_ == Phase::Ended) {
          if (phase_ == Phase::Ended) return;
          continue;
        }
      }

      const auto pend = pending();
      const bool player_turn = std::any_of(pend.begin(), pend.end(), [&](const PendingEdge& pe) {
        return is_player_item(p, *pe.second);
      });
      if (player_turn) {
        phase_ = Phase::AwaitingChoice;
        return;
      }
      if (pend.empty()) {
        if (branch_filter_) {
          throw Error(ErrorCode::UnmatchedBranch,
                      "subdialog '" + current_ + "' has no edge for termination value '" +
                          branch_filter_->value_or("") + "'");
        }
        throw Error(ErrorCode::NoCandidates, "node '" + current_ + "' has no way to continue");
      }

      std::vector<Candidate> candidates;
      candidates.reserve(pend.size());
      const auto zero = CauseWeights::zero(p.player_states.size(), p.npc_states.size());
      for (const auto& [edge, node] : pend) {
        Candidate c{node->id, zero, conversant_};
        if (const auto* item = std::get_if<DialogItem>(&node->body)) {
          if (item->cause) c.cause = *item->cause;
          c.npc = npc_party(p, *item);
        } else if (const auto* t = std::get_if<TerminationNode>(&node->body); t && t->cause) {
          c.cause = *t->cause;
        }
        candidates.push_back(std::move(c));
      }
      auto lookup = [this](const std::optional<ActorId>& id) -> const StateVector& { return npc_vector(id); };
      const Selection sel = select_npc_response(candidates, player_, lookup, policy_, rng_);
      next = &graph_->node(sel.node);
      score = sel.score;
    }
  }

  std::shared_ptr<const DialogGraph> graph_;
  SelectionPolicy policy_;
  SessionOptions options_;
  SelectionRng rng_;
  Phase phase_ = Phase::NpcTurn;
  std::optional<Ending> ending_;
  NodeId current_;
  std::optional<std::optional<std::string>> branch_filter_;
  std::vector<NodeId> stack_;
  StateVector player_;
  std::map<ActorId, StateVector> npcs_;
  StateVector empty_npc_;  // all zeros; read when a candidate has no NPC party
  std::optional<ActorId> conversant_;
  std::vector<TranscriptEntry> transcript_;
};

/// A replay choice: a 1-based menu index or a node id.
struct ChoiceToken {
  std::variant<std::size_t, NodeId> value;

  static ChoiceToken parse(std::string_view text) {
    const bool digits = !text.empty() && text.size() < 19 && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); });
    if (digits) return {static_cast<std::size_t>(std::stoull(std::string(text)))};
    return {NodeId(text)};
  }

  NodeId resolve(const std::vector<MenuOption>& menu) const {
    if (const auto* index = std::get_if<std::size_t>(&value)) {
      if (*index == 0 || *index > menu.size())
        throw Error(ErrorCode::InvalidChoice, "menu index " + std::to_string(*index) + " is out of range 1.." +
                                                  std::to_string(menu.size()));
      return menu[*index - 1].node;
    }
    return std::get<NodeId>(value);
  }
};

/// A state edit applied just before choice number `before_choice`
/// (0-based); edits past the last choice apply after it.
struct TimedStateEdit {
  std::size_t before_choice = 0;
  StateEdit edit;
};

/// Headless play. Deterministic for a fixed policy seed. Errors are rethrown
/// as ReplayError carrying the 1-based choice step (0 = start).
inline Session replay(std::shared_ptr<const DialogGraph> graph, std::string_view start_name,
                      std::span<const ChoiceToken> choices, std::span<const TimedStateEdit> edits,
                      SelectionPolicy policy = {}, std::span<const StateEdit> overrides = {},
                      SessionOptions options = {}) {
  auto wrap = [](std::size_t step, auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(step, e.code(), e.detail());
    }
  };
  Session session = wrap(0, [&] { return Session::start(graph, start_name, policy, overrides, options); });
  auto apply_edits = [&](std::size_t step, auto pred) {
    wrap(step, [&] {
      for (const auto& t : edits)
        if (pred(t.before_choice)) session.set_state(t.edit.scope, t.edit.name, t.edit.value);
    });
  };
  for (std::size_t i = 0; i < choices.size(); ++i) {
    apply_edits(i + 1, [i](std::size_t at) { return at == i; });
    wrap(i + 1, [&] { session.choose(choices[i].resolve(session.menu_options())); });
  }
  apply_edits(choices.size(), [n = choices.size()](std::size_t at) { return at >= n; });
  return session;
}

}  // namespace simdialog

#endif  // SIMDIALOG_RUNTIME_HPP
