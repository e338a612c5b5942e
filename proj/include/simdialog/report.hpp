#ifndef SIMDIALOG_REPORT_HPP
#define SIMDIALOG_REPORT_HPP

#include <sstream>
#include <string>

#include "simdialog/number.hpp"
#include "simdialog/runtime.hpp"
#include "simdialog/script_import.hpp"

namespace simdialog {

inline std::string format_states(const StateVector& states) {
  std::string out = "{";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i > 0) out += ", ";
    out += states.names()[i] + "=" + format_number(states[i]);
  }
  return out + "}";
}

/// One transcript entry as two text lines: what happened, then the states.
inline std::string format_entry(const Project& project, std::size_t index, const TranscriptEntry& e) {
  std::ostringstream out;
  out << '[' << index << "] " << to_string(e.kind) << ' ' << e.node;
  const DialogNode* node = project.find_node(e.node);
  switch (e.kind) {
    case NodeKind::Start:
      if (node) out << " \"" << node->as<StartNode>().name << '"';
      break;
    case NodeKind::Item: {
      const Actor* actor = e.actor ? project.find_actor(*e.actor) : nullptr;
      out << ' ' << render_script_line(actor ? actor->display_name : e.actor.value_or("?"), e.direction, e.cue);
      break;
    }
    case NodeKind::Reference:
      if (node) out << " -> \"" << node->as<ReferenceNode>().target_start << '"';
      break;
    case NodeKind::Subdialog:
      if (node) out << " => \"" << node->as<SubdialogNode>().target_start << '"';
      break;
    case NodeKind::Termination:
      out << " \"" << e.direction.value_or("") << '"';
      if (node && node->as<TerminationNode>().termination_value)
        out << " value=" << *node->as<TerminationNode>().termination_value;
      break;
  }
  if (e.score) out << " (score " << format_number(*e.score) << ')';
  out << "\n    states: player" << format_states(e.player_after);
  if (e.conversant) out << ' ' << *e.conversant << format_states(e.conversant_after);
  out << '\n';
  return out.str();
}

inline std::string format_transcript(const Project& project, std::span<const TranscriptEntry> transcript,
                                     std::size_t first_index = 1) {
  std::string out;
  for (std::size_t i = 0; i < transcript.size(); ++i) out += format_entry(project, first_index + i, transcript[i]);
  return out;
}

/// Phase line plus either the numbered menu or the ending.
inline std::string format_rest(const Session& session) {
  std::ostringstream out;
  out << "phase: " << to_string(session.phase()) << '\n';
  if (session.phase() == Phase::AwaitingChoice) {
    const auto menu = session.menu_options();
    for (std::size_t i = 0; i < menu.size(); ++i) out << "  " << (i + 1) << ". " << menu[i].label << "  [" << menu[i].node << "]\n";
  } else if (const auto& end = session.ending()) {
    out << "direction: " << end->direction << '\n';
    if (end->termination_value) out << "termination-value: " << *end->termination_value << '\n';
  }
  return out.str();
}

}  // namespace simdialog

#endif  // SIMDIALOG_REPORT_HPP
