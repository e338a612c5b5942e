#ifndef SIMDIALOG_TESTS_FIXTURES_HPP
#define SIMDIALOG_TESTS_FIXTURES_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "simdialog/simdialog.hpp"

namespace fixtures {

using namespace simdialog;

inline std::filesystem::path dir() { return SIMDIALOG_FIXTURE_DIR; }

inline std::string read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string sample_script() { return read(dir() / "jack_emilia.txt"); }

/// Player asks "How are you doing?"; the NPC answers by mood.
/// Edge order: positive reply 0, negative reply 1.
inline Project mood(bool negative_first = false) {
  ProjectBuilder b;
  b.title("mood").player("pat", "Pat").npc("dana", "Dana").npc_state("mood");
  b.page("greeting");
  auto start = b.start("greet", "start");
  auto ask = b.item("pat", "How are you doing?", std::nullopt, "ask");
  auto good = b.item("dana", "Very well, thank you", std::nullopt, "good");
  auto bad = b.item("dana", "Get lost, creep", std::nullopt, "bad");
  auto end_good = b.termination("pleasant", std::nullopt, "end_good");
  auto end_bad = b.termination("rebuffed", std::nullopt, "end_bad");
  b.cause(good, Scope::Npc, "mood", 1.0).cause(bad, Scope::Npc, "mood", -1.0);
  b.link(start, ask);
  if (negative_first) b.link(ask, bad, 0).link(ask, good, 1);
  else b.link(ask, good, 0).link(ask, bad, 1);
  b.link(good, end_good).link(bad, end_bad);
  return b.build();
}

/// Two NPC items feeding each other forever.
inline Project npc_cycle() {
  ProjectBuilder b;
  b.player("pat", "Pat").npc("dana", "Dana");
  b.page("loop");
  auto s = b.start("loop", "s");
  auto a = b.item("dana", "A", std::nullopt, "a");
  auto c = b.item("dana", "B", std::nullopt, "b");
  b.link(s, a).link(a, c).link(c, a);
  return b.build();
}

/// Start -> NPC greeting -> two player options, each ending the scene.
inline Project greeting_menu() {
  ProjectBuilder b;
  b.player("pat", "Pat").npc("dana", "Dana").player_state("confidence");
  b.page("p");
  auto s = b.start("hello", "s");
  auto g = b.item("dana", "Hello there.", std::nullopt, "greet");
  auto o1 = b.item("pat", "Hi!", std::nullopt, "o1");
  auto o2 = b.item("pat", "Ask about the music, because I have been wondering about it for a long time", std::nullopt, "o2");
  b.label(o2, "Ask about the music");
  auto t1 = b.termination("scene over", std::nullopt, "t1");
  auto t2 = b.termination("music talk", std::nullopt, "t2");
  b.link(s, g).link(g, o1, 0).link(g, o2, 1).link(o1, t1).link(o2, t2);
  b.effect(s, Scope::Player, "confidence", 0.4);
  return b.build();
}

inline std::shared_ptr<const DialogGraph> graph(Project p) { return DialogGraph::make(std::move(p)); }

}  // namespace fixtures

#endif  // SIMDIALOG_TESTS_FIXTURES_HPP
