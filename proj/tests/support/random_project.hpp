#ifndef SIMDIALOG_TESTS_RANDOM_PROJECT_HPP
#define SIMDIALOG_TESTS_RANDOM_PROJECT_HPP

// Generator of random *valid* projects for property tests.
//
// Shape: a chain of graphs g0..gN-1, each behind its own Start. Edges only
// run forward inside a graph, and Reference/Subdialog nodes only target later
// graphs, each graph being targeted at most once. So every graph is acyclic,
// every run terminates and every node executes at most once per session.
// Terminations emit no value, "a" or "b"; each Subdialog node has an edge for
// all three, so no branch can go unmatched.

#include <random>
#include <string>
#include <vector>

#include "simdialog/simdialog.hpp"

namespace fixtures {

using namespace simdialog;

class RandomProjects {
 public:
  explicit RandomProjects(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  /// Mix of author-style short decimals, exact endpoints and full doubles.
  double weight() {
    switch (uniform(0, 4)) {
      case 0: return uniform(-20, 20) / 20.0;
      case 1: return chance(0.5) ? 1.0 : -1.0;
      case 2: return 0.0;
      default: return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_);
    }
  }

  std::vector<double> weights(std::size_t n) {
    std::vector<double> v(n);
    for (auto& w : v) w = weight();
    return v;
  }

  /// Text that exercises escaping: markup characters, quotes, whitespace at
  /// the edges, line breaks and multi-byte UTF-8.
  std::string text(int max_len = 12, bool allow_empty = true) {
    static const std::vector<std::string> pieces = {
        "a", "b", "Z", "0", " ", "&", "<", ">", "\"", "'", "\t", "\n", "\r", "é", "日本", "[x]", ":", "&amp;", "]]>", "--"};
    const int len = uniform(allow_empty ? 0 : 1, max_len);
    std::string s;
    for (int i = 0; i < len; ++i) s += pieces[uniform(0, static_cast<int>(pieces.size()) - 1)];
    return s;
  }

  std::string unique(std::string stem) { return stem + "~" + std::to_string(++serial_) + text(3); }

  Project project() {
    Project p;
    serial_ = 0;
    p.metadata.title = text();
    p.metadata.version = chance(0.5) ? "1." + std::to_string(uniform(0, 9)) : "";

    const int players = uniform(1, 2);
    const int npcs = uniform(0, 3);
    for (int i = 0; i < players + npcs; ++i) {
      Actor a;
      a.id = unique(i < players ? "player" : "npc");
      a.display_name = text();
      a.kind = i < players ? Scope::Player : Scope::Npc;
      if (chance(0.3)) a.color = "#" + std::to_string(uniform(100000, 999999));
      for (int k = uniform(0, 2); k > 0; --k) a.attributes[unique("attr")] = text();
      (i < players ? player_ids_ : npc_ids_).push_back(a.id);
      p.actors[a.id] = std::move(a);
    }
    for (int i = uniform(0, 4); i > 0; --i) p.player_states.push_back({unique("ps"), weight()});
    for (int i = uniform(0, 4); i > 0; --i) p.npc_states.push_back({unique("ns"), weight()});

    const int page_count = uniform(1, 3);
    std::vector<std::string> pages;
    for (int i = 0; i < page_count; ++i) {
      pages.push_back(unique("page"));
      p.pages[pages.back()].name = pages.back();
    }

    const int graphs = uniform(1, 4);
    std::vector<std::string> starts;
    for (int g = 0; g < graphs; ++g) starts.push_back(unique("start"));
    int next_target = 1;  // graphs 1.. are each entered from at most one node

    for (int g = 0; g < graphs; ++g) {
      next_target = std::max(next_target, g + 1);
      Page& page = p.pages[pages[uniform(0, page_count - 1)]];
      auto add = [&](DialogNode::Body body) {
        NodeId id = unique("n");
        page.node_ids.insert(id);
        if (chance(0.5)) page.layout[id] = {static_cast<double>(uniform(-500, 500)), weight() * 1000};
        p.nodes[id] = DialogNode{id, std::move(body)};
        return id;
      };

      StartNode start{starts[g], effect(p)};
      const NodeId start_id = add(std::move(start));

      std::vector<NodeId> ends;
      for (int t = uniform(1, 2); t > 0; --t) {
        TerminationNode term{text(), termination_value(), std::nullopt};
        if (chance(0.3)) term.cause = cause(p);
        ends.push_back(add(std::move(term)));
      }

      // Body nodes in topological order; each links forward or to an end.
      std::vector<NodeId> body;
      const int n = uniform(0, 6);
      for (int i = 0; i < n; ++i) {
        const bool can_jump = next_target < graphs;
        const int kind = uniform(0, can_jump ? 5 : 3);
        if (kind <= 1 || npc_ids_.empty()) body.push_back(add(player_item(p)));
        else if (kind <= 3) body.push_back(add(npc_item(p)));
        else if (kind == 4) body.push_back(add(SubdialogNode{starts[next_target++]}));
        else body.push_back(add(ReferenceNode{starts[next_target++]}));
      }

      auto later = [&](std::size_t i) {
        const std::size_t options = (body.size() - i - 1) + ends.size();
        const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, options - 1)(rng_);
        return pick < body.size() - i - 1 ? body[i + 1 + pick] : ends[pick - (body.size() - i - 1)];
      };
      auto link = [&](const NodeId& from, const NodeId& to, int order, std::optional<std::string> branch = std::nullopt) {
        p.edges.push_back({from, to, order, std::move(branch)});
      };

      link(start_id, body.empty() ? ends[0] : body[0], uniform(-2, 2));
      for (std::size_t i = 0; i < body.size(); ++i) {
        const DialogNode& node = p.nodes.at(body[i]);
        if (node.is<ReferenceNode>()) continue;
        int order = uniform(-3, 3);
        if (node.is<SubdialogNode>()) {
          for (std::optional<std::string> label : {std::optional<std::string>{}, std::optional<std::string>("a"),
                                                   std::optional<std::string>("b")})
            link(body[i], later(i), order++, label);
          continue;
        }
        std::vector<NodeId> targets = {i + 1 < body.size() ? body[i + 1] : ends[0]};
        for (int extra = uniform(0, 2); extra > 0; --extra) {
          NodeId t = later(i);
          if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        std::shuffle(targets.begin(), targets.end(), rng_);
        for (const auto& t : targets) link(body[i], t, order++);
      }
    }
    std::shuffle(p.edges.begin(), p.edges.end(), rng_);
    player_ids_.clear();
    npc_ids_.clear();
    return p;
  }

 private:
  std::optional<std::string> termination_value() {
    switch (uniform(0, 2)) {
      case 0: return std::nullopt;
      case 1: return "a";
      default: return "b";
    }
  }

  EffectWeights effect(const Project& p) {
    if (chance(0.3)) return EffectWeights::zero(p.player_states.size(), p.npc_states.size());
    return {weights(p.player_states.size()), weights(p.npc_states.size())};
  }

  CauseWeights cause(const Project& p) { return {weight(), weights(p.player_states.size()), weights(p.npc_states.size())}; }

  void fill_text(DialogItem& item) {
    switch (uniform(0, 2)) {
      case 0: item.cue = text(); break;
      case 1: item.direction = text(); break;
      default:
        item.cue = text();
        item.direction = text();
    }
    if (chance(0.3)) item.menu_label = text();
    for (int a = uniform(0, 2); a > 0; --a) {
      const auto role = static_cast<AssetRole>(uniform(0, 2));
      item.assets.push_back({role, "assets/" + std::to_string(uniform(0, 5)) + ".wav"});
    }
  }

  DialogItem player_item(const Project& p) {
    DialogItem item;
    item.actor = player_ids_[uniform(0, static_cast<int>(player_ids_.size()) - 1)];
    if (npc_ids_.size() > 1 || (!npc_ids_.empty() && chance(0.5)))
      item.conversant = npc_ids_[uniform(0, static_cast<int>(npc_ids_.size()) - 1)];
    fill_text(item);
    item.effect = effect(p);
    return item;
  }

  DialogItem npc_item(const Project& p) {
    DialogItem item;
    item.actor = npc_ids_[uniform(0, static_cast<int>(npc_ids_.size()) - 1)];
    if (chance(0.3)) item.conversant = player_ids_[0];
    fill_text(item);
    item.cause = cause(p);
    item.effect = effect(p);
    return item;
  }

  std::mt19937_64 rng_;
  int serial_ = 0;
  std::vector<ActorId> player_ids_;
  std::vector<ActorId> npc_ids_;
};

}  // namespace fixtures

#endif  // SIMDIALOG_TESTS_RANDOM_PROJECT_HPP
