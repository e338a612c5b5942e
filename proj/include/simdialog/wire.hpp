#ifndef SIMDIALOG_WIRE_HPP
#define SIMDIALOG_WIRE_HPP

// JSON shapes exchanged with the simulator UI (wire version 1).

#include <json.hpp>

#include <string>

#include "simdialog/runtime.hpp"
#include "simdialog/scoring.hpp"

namespace simdialog::wire {

using nlohmann::json;

inline constexpr int kWireVersion = 1;

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json states_json(const StateVector& states) {
  json out = json::array();
  for (std::size_t i = 0; i < states.size(); ++i) out.push_back({{"name", states.names()[i]}, {"value", states[i]}});
  return out;
}

inline json color_json(const DialogNode& node) {
  const CauseWeights* cause = nullptr;
  if (const auto* item = std::get_if<DialogItem>(&node.body); item && item->cause) cause = &*item->cause;
  if (const auto* t = std::get_if<TerminationNode>(&node.body); t && t->cause) cause = &*t->cause;
  const ColorClass c = cause ? color_class(*cause) : ColorClass{};
  return {{"class", to_string(c.kind)}, {"intensity", c.intensity}};
}

/// GraphView plus actors, state declarations and start names.
inline json project_json(const Project& p) {
  std::map<NodeId, const Page*> page_of;
  for (const auto& [name, page] : p.pages)
    for (const auto& id : page.node_ids) page_of[id] = &page;

  json nodes = json::array();
  for (const auto& [id, node] : p.nodes) {
    json n = {{"id", id}, {"kind", to_string(node.kind())}, {"color", color_json(node)}};
    const Page* page = page_of.contains(id) ? page_of[id] : nullptr;
    n["page"] = page ? json(page->name) : json(nullptr);
    if (page && page->layout.contains(id)) {
      const auto& pos = page->layout.at(id);
      n["position"] = {{"x", pos.x}, {"y", pos.y}};
    } else {
      n["position"] = nullptr;
    }
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, StartNode>) {
            n["name"] = body.name;
          } else if constexpr (std::is_same_v<T, DialogItem>) {
            n["actor"] = body.actor;
            n["conversant"] = optional_json(body.conversant);
            n["cue"] = optional_json(body.cue);
            n["direction"] = optional_json(body.direction);
            n["label"] = optional_json(body.menu_label);
          } else if constexpr (std::is_same_v<T, TerminationNode>) {
            n["direction"] = body.direction;
            n["terminationValue"] = optional_json(body.termination_value);
          } else {
            n["target"] = body.target_start;
          }
        },
        node.body);
    nodes.push_back(std::move(n));
  }

  json edges = json::array();
  for (const auto& e : p.sorted_edges())
    edges.push_back({{"from", e.from}, {"to", e.to}, {"order", e.order}, {"branchLabel", optional_json(e.branch)}});

  json actors = json::array();
  for (const auto& [id, a] : p.actors)
    actors.push_back({{"id", id},
                      {"name", a.display_name},
                      {"kind", to_string(a.kind)},
                      {"color", a.color},
                      {"attributes", a.attributes}});

  auto decls = [](const std::vector<StateDeclaration>& ds) {
    json out = json::array();
    for (const auto& d : ds) out.push_back({{"name", d.name}, {"default", d.default_value}});
    return out;
  };

  json starts = json::array();
  for (const auto& [id, node] : p.nodes)
    if (node.is<StartNode>()) starts.push_back(node.as<StartNode>().name);

  return {{"wireVersion", kWireVersion},
          {"title", p.metadata.title},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"actors", std::move(actors)},
          {"states", {{"player", decls(p.player_states)}, {"npc", decls(p.npc_states)}}},
          {"starts", std::move(starts)}};
}

inline json entry_json(const TranscriptEntry& e) {
  return {{"nodeId", e.node},
          {"kind", to_string(e.kind)},
          {"actor", optional_json(e.actor)},
          {"cue", optional_json(e.cue)},
          {"direction", optional_json(e.direction)},
          {"score", optional_json(e.score)},
          {"player", states_json(e.player_after)},
          {"conversant", optional_json(e.conversant)},
          {"conversantStates", states_json(e.conversant_after)}};
}

inline json transcript_json(std::span<const TranscriptEntry> transcript) {
  json out = json::array();
  for (const auto& e : transcript) out.push_back(entry_json(e));
  return out;
}

inline json snapshot_json(const Session& s) {
  json menu = json::array();
  if (s.phase() == Phase::AwaitingChoice)
    for (const auto& m : s.menu_options()) menu.push_back({{"nodeId", m.node}, {"label", m.label}, {"order", m.order}});
  json npcs = json::object();
  for (const auto& [id, states] : s.npc_states()) npcs[id] = states_json(states);
  json ending = nullptr;
  if (s.ending()) ending = {{"direction", s.ending()->direction}, {"terminationValue", optional_json(s.ending()->termination_value)}};
  return {{"phase", to_string(s.phase())},
          {"currentNodeId", s.current_node()},
          {"menu", std::move(menu)},
          {"player", states_json(s.player_states())},
          {"conversant", optional_json(s.conversant())},
          {"npcs", std::move(npcs)},
          {"ending", std::move(ending)},
          {"stackDepth", s.stack_depth()},
          {"transcript", transcript_json(s.transcript())}};
}

/// Reads {"policy": "argmax"|"softmax", "seed": n, "temperature": t}.
inline SelectionPolicy policy_from_json(const json& body, std::uint64_t default_seed) {
  const std::string mode = body.value("policy", std::string("argmax"));
  const std::uint64_t seed = body.contains("seed") && !body["seed"].is_null() ? body["seed"].get<std::uint64_t>() : default_seed;
  if (mode == "argmax") return {SelectionMode::Argmax, 1.0, seed};
  if (mode == "softmax") return SelectionPolicy::softmax(body.value("temperature", 1.0), seed);
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + mode + "'");
}

}  // namespace simdialog::wire

#endif  // SIMDIALOG_WIRE_HPP
