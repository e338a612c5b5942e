#ifndef SIMDIALOG_SCRIPT_IMPORT_HPP
#define SIMDIALOG_SCRIPT_IMPORT_HPP

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "simdialog/model.hpp"
#include "simdialog/validate.hpp"

namespace simdialog {

/// One logical line of a screenplay-style script.
struct ScriptLine {
  enum class Kind { Cue, StandaloneDirection, Blank };

  Kind kind = Kind::Blank;
  std::optional<std::string> actor_name;
  std::optional<std::string> direction;
  std::optional<std::string> cue;
  std::size_t line_number = 0;

  bool operator==(const ScriptLine&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Position of the first ':' outside square brackets, or npos.
inline std::size_t unbracketed_colon(std::string_view s) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    else if (s[i] == ']' && depth > 0) --depth;
    else if (s[i] == ':' && depth == 0) return i;
  }
  return std::string_view::npos;
}

inline void check_brackets(std::string_view s, std::size_t line) {
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    else if (c == ']' && depth > 0) --depth;
  }
  if (depth > 0) throw ParseError(line, "unclosed '['");
}

/// Splits a leading "[...]" off `text`. Returns (direction, remainder).
inline std::pair<std::optional<std::string>, std::string_view> leading_direction(std::string_view text, std::size_t line) {
  if (text.empty() || text.front() != '[') return {std::nullopt, text};
  const auto close = text.find(']');
  if (close == std::string_view::npos) throw ParseError(line, "unclosed '['");
  auto inner = trim(text.substr(1, close - 1));
  std::optional<std::string> direction;
  if (!inner.empty()) direction = std::string(inner);
  return {direction, trim(text.substr(close + 1))};
}

}  // namespace detail

/// Parses "Actor: [direction] cue" lines, stand-alone "[direction]" lines,
/// blank lines, and continuation lines (no colon, not bracketed) that extend
/// the previous cue.
inline std::vector<ScriptLine> parse_script(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<ScriptLine> lines;
  std::optional<std::size_t> last_content;  // index of the last non-blank entry
  std::size_t number = 0;

  auto finish_cue = [&](std::size_t index) {
    const auto& l = lines[index];
    if (l.kind == ScriptLine::Kind::Cue && !l.cue && !l.direction)
      throw ParseError(l.line_number, "line for '" + *l.actor_name + "' has neither a cue nor a direction");
  };

  std::vector<std::string_view> raw_lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    raw_lines.push_back(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }

  for (std::string_view raw : raw_lines) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const auto line = detail::trim(raw);

    if (line.empty()) {
      lines.push_back({ScriptLine::Kind::Blank, {}, {}, {}, number});
      continue;
    }
    detail::check_brackets(line, number);

    if (line.front() == '[') {
      auto [direction, rest] = detail::leading_direction(line, number);
      if (!rest.empty()) throw ParseError(number, "text after a stand-alone direction has no speaker");
      if (!direction) throw ParseError(number, "empty stand-alone direction");
      if (last_content) finish_cue(*last_content);
      lines.push_back({ScriptLine::Kind::StandaloneDirection, {}, std::move(direction), {}, number});
      last_content = lines.size() - 1;
    } else if (const auto colon = detail::unbracketed_colon(line); colon != std::string_view::npos) {
      const auto actor = detail::trim(line.substr(0, colon));
      if (actor.empty()) throw ParseError(number, "missing actor name before ':'");
      auto [direction, rest] = detail::leading_direction(detail::trim(line.substr(colon + 1)), number);
      if (last_content) finish_cue(*last_content);
      ScriptLine cue_line{ScriptLine::Kind::Cue, std::string(actor), std::move(direction), {}, number};
      if (!rest.empty()) cue_line.cue = std::string(rest);
      lines.push_back(std::move(cue_line));
      last_content = lines.size() - 1;
    } else {
      if (!last_content || lines[*last_content].kind != ScriptLine::Kind::Cue)
        throw ParseError(number, "line has no 'Actor:' label and does not continue a cue");
      auto& prev = lines[*last_content];
      prev.cue = prev.cue ? *prev.cue + " " + std::string(line) : std::string(line);
    }
  }
  if (last_content) finish_cue(*last_content);
  return lines;
}

/// Renders a linear chain of dialog items back to script text.
inline std::string render_script_line(std::string_view actor_name, const std::optional<std::string>& direction,
                                      const std::optional<std::string>& cue) {
  std::string out(actor_name);
  out += ":";
  if (direction) out += " [" + *direction + "]";
  if (cue) {
    if (!direction && !cue->empty() && cue->front() == '[') out += " []";
    out += " " + *cue;
  }
  return out;
}

struct ImportOptions {
  /// Script names (matched case-insensitively) that denote player actors.
  std::vector<std::string> player_names;
  std::string end_direction = "imported script end";
};

struct ImportResult {
  Project project;
  std::vector<Diagnostic> diagnostics;
  NodeId start;
};

namespace detail {

inline std::string slug(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "node" : out;
}

}  // namespace detail

/// Appends the parsed script to `project` as a new page holding a linear
/// chain Start -> one item per line -> Termination. Unknown speakers become
/// NPC actors (or players, if listed in the options). Weights start at zero.
inline ImportResult build_graph(std::span<const ScriptLine> lines, Project project, const std::string& page_name,
                                const std::string& start_name, const ImportOptions& options = {}) {
  if (page_name.empty()) throw Error(ErrorCode::ImportError, "page name is empty");
  if (start_name.empty()) throw Error(ErrorCode::ImportError, "start name is empty");
  if (project.pages.contains(page_name)) throw Error(ErrorCode::ImportError, "page '" + page_name + "' already exists");
  if (project.find_start(start_name) != nullptr)
    throw Error(ErrorCode::ImportError, "start name '" + start_name + "' is already used");

  ImportResult result;
  auto& diags = result.diagnostics;

  std::set<std::string> player_keys;
  for (const auto& n : options.player_names) player_keys.insert(detail::lower(detail::trim(n)));

  auto resolve_actor = [&](std::string_view raw) -> ActorId {
    const auto name = detail::trim(raw);
    const auto key = detail::lower(name);
    for (const auto& [id, actor] : project.actors)
      if (detail::lower(id) == key || detail::lower(actor.display_name) == key) return id;
    ActorId id = detail::slug(name);
    for (int k = 2; project.actors.contains(id); ++k) id = detail::slug(name) + "_" + std::to_string(k);
    const Scope kind = player_keys.contains(key) ? Scope::Player : Scope::Npc;
    project.actors[id] = Actor{id, std::string(name), kind, {}, {}};
    diags.push_back({Severity::Info, Check::Note, std::nullopt,
                     "created " + std::string(to_string(kind)) + " actor '" + std::string(name) + "' (id '" + id + "')"});
    return id;
  };

  // Player names given explicitly exist even when they never speak.
  for (const auto& n : options.player_names) resolve_actor(n);

  const auto base = detail::slug(page_name);
  int counter = 0;
  auto fresh_id = [&] {
    NodeId id;
    do {
      id = base + "-" + std::to_string(counter++);
    } while (project.nodes.contains(id));
    return id;
  };

  const auto np = project.player_states.size();
  const auto nn = project.npc_states.size();
  Page page{page_name, {}, {}};
  std::vector<NodeId> chain;
  auto add = [&](DialogNode::Body body) {
    NodeId id = fresh_id();
    project.nodes[id] = DialogNode{id, std::move(body)};
    page.node_ids.insert(id);
    page.layout[id] = Position{0.0, 120.0 * static_cast<double>(chain.size())};
    chain.push_back(id);
    return id;
  };

  result.start = add(StartNode{start_name, EffectWeights::zero(np, nn)});

  struct Spoken {
    NodeId id;
    ActorId actor;
  };
  std::vector<Spoken> items;
  std::optional<ActorId> last_speaker;
  for (const auto& line : lines) {
    if (line.kind == ScriptLine::Kind::Blank) continue;
    ActorId actor;
    if (line.kind == ScriptLine::Kind::StandaloneDirection) {
      if (!last_speaker)
        throw Error(ErrorCode::ImportError, "line " + std::to_string(line.line_number) + ": stage direction before any speaker");
      actor = *last_speaker;
    } else {
      actor = resolve_actor(*line.actor_name);
      last_speaker = actor;
    }
    DialogItem item;
    item.actor = actor;
    item.cue = line.kind == ScriptLine::Kind::Cue ? line.cue : std::nullopt;
    item.direction = line.direction;
    item.effect = EffectWeights::zero(np, nn);
    if (project.actors.at(actor).kind == Scope::Npc) item.cause = CauseWeights::zero(np, nn);
    items.push_back({add(std::move(item)), actor});
  }

  // Player lines address the nearest NPC speaker: the previous one, else the next.
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (project.actors.at(items[i].actor).kind != Scope::Player) continue;
    std::optional<ActorId> target;
    for (std::size_t j = i; j-- > 0 && !target;)
      if (project.actors.at(items[j].actor).kind == Scope::Npc) target = items[j].actor;
    for (std::size_t j = i + 1; j < items.size() && !target; ++j)
      if (project.actors.at(items[j].actor).kind == Scope::Npc) target = items[j].actor;
    project.nodes.at(items[i].id).as<DialogItem>().conversant = target;
  }

  add(TerminationNode{options.end_direction, std::nullopt, std::nullopt});
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) project.edges.push_back({chain[i], chain[i + 1], 0, std::nullopt});
  project.pages[page_name] = std::move(page);
  result.project = std::move(project);
  return result;
}

/// Walks the linear chain behind `start_name` and renders it as script text.
inline std::string render_script(const Project& project, std::string_view start_name) {
  const DialogNode* node = project.find_start(start_name);
  if (node == nullptr) throw Error(ErrorCode::NotFound, "no start node named '" + std::string(start_name) + "'");
  std::ostringstream out;
  std::set<NodeId> seen;
  while (node != nullptr && seen.insert(node->id).second) {
    if (const auto* item = std::get_if<DialogItem>(&node->body)) {
      const Actor* actor = project.find_actor(item->actor);
      out << render_script_line(actor ? actor->display_name : item->actor, item->direction, item->cue) << '\n';
    }
    const DialogNode* next = nullptr;
    for (const auto& e : project.edges)
      if (e.from == node->id) {
        next = project.find_node(e.to);
        break;
      }
    node = next;
  }
  return out.str();
}

}  // namespace simdialog

#endif  // SIMDIALOG_SCRIPT_IMPORT_HPP
