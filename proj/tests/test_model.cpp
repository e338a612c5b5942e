#include <gtest/gtest.h>

#include <set>

#include "simdialog/simdialog.hpp"
#include "support/fixtures.hpp"
#include "support/random_project.hpp"

using namespace simdialog;

namespace {

Project minimal() {
  ProjectBuilder b;
  b.player("pat", "Pat").page("main");
  auto s = b.start("intro", "s");
  auto t = b.termination("done", std::nullopt, "t");
  b.link(s, t);
  return b.build();
}

std::vector<Diagnostic> errors_of(const std::vector<Diagnostic>& diags) {
  std::vector<Diagnostic> out;
  for (const auto& d : diags)
    if (d.severity == Severity::Error) out.push_back(d);
  return out;
}

std::multiset<Check> checks(const std::vector<Diagnostic>& diags, Severity severity) {
  std::multiset<Check> out;
  for (const auto& d : diags)
    if (d.severity == severity) out.insert(d.check);
  return out;
}

}  // namespace

TEST(StateVector, ClampsAndNames) {
  StateVector v(std::vector<StateDeclaration>{{"mood", 0.0}, {"trust", 2.0}});
  EXPECT_EQ(v.value("trust"), 1.0);
  v.set("mood", -7.0);
  EXPECT_EQ(v.value("mood"), -1.0);
  v.set("mood", 0.5);
  EXPECT_EQ(v[0], 0.5);
  EXPECT_THROW(v.value("nope"), Error);
  EXPECT_THROW(v.set(0, std::nan("")), Error);
}

TEST(Validate, MinimalProjectIsClean) { EXPECT_TRUE(validate(minimal()).empty()); }

TEST(Validate, DanglingReferenceIsOneError) {
  ProjectBuilder b(minimal());
  b.page("main");
  auto s2 = b.start("second", "s2");
  auto r = b.reference("missing", "r");
  b.link(s2, r);
  const auto diags = validate(b.build());
  const auto errs = errors_of(diags);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].check, Check::UnresolvedTarget);
  EXPECT_EQ(errs[0].node, "r");
  EXPECT_TRUE(diags.size() == 1) << format(diags.back());
}

TEST(Validate, NpcCycleIsOneWarning) {
  const auto diags = validate(fixtures::npc_cycle());
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::Warning);
  EXPECT_EQ(diags[0].check, Check::Cycle);
}

TEST(Validate, UnreachableIsWarning) {
  ProjectBuilder b(minimal());
  b.page("main");
  b.item("pat", "hello?", std::nullopt, "lost");
  const auto diags = validate(b.build());
  EXPECT_FALSE(has_errors(diags));
  EXPECT_EQ(checks(diags, Severity::Warning), (std::multiset<Check>{Check::Unreachable, Check::DeadEnd}));
}

TEST(Validate, ReportsErrorKinds) {
  ProjectBuilder b;
  b.npc("dana", "Dana").npc("eve", "Eve").npc_state("mood").page("p");
  auto s = b.start("s", "s");
  auto item = b.item("dana", std::nullopt, std::nullopt, "empty");
  b.link(s, item).link(item, s);
  const auto got = checks(validate(b.build()), Severity::Error);
  EXPECT_TRUE(got.contains(Check::NoPlayerActor));
  EXPECT_TRUE(got.contains(Check::EmptyItem));
  EXPECT_TRUE(got.contains(Check::StartHasIncoming));
}

TEST(Validate, FormatsDiagnostics) {
  Diagnostic d{Severity::Error, Check::DanglingEdge, "n3", "edge n3 -> x has a missing endpoint"};
  EXPECT_EQ(format(d), "error[n3]: edge n3 -> x has a missing endpoint");
  Diagnostic w{Severity::Warning, Check::Cycle, std::nullopt, "cycle"};
  EXPECT_EQ(format(w), "warning: cycle");
}

TEST(Successors, SortedByOrder) {
  ProjectBuilder b;
  b.player("pat", "Pat").npc("dana", "Dana").page("p");
  auto q = b.item("pat", "q", std::nullopt, "q");
  auto a = b.item("dana", "a", std::nullopt, "a");
  auto c = b.item("dana", "c", std::nullopt, "c");
  auto d = b.item("dana", "d", std::nullopt, "d");
  b.link(q, a, 2).link(q, c, 0).link(q, d, 1);
  const Project p = b.build();
  auto ids = [](const std::vector<const DialogNode*>& ns) {
    std::vector<NodeId> out;
    for (auto* n : ns) out.push_back(n->id);
    return out;
  };
  EXPECT_EQ(ids(successors(p, q)), (std::vector<NodeId>{"c", "d", "a"}));
  EXPECT_EQ(ids(successors(p, q)), ids(successors(p, q)));
  EXPECT_TRUE(successors(p, a).empty());
  EXPECT_THROW(successors(p, "ghost"), Error);
  const auto g = DialogGraph::make(p);
  EXPECT_EQ(ids(g->successors(q)), (std::vector<NodeId>{"c", "d", "a"}));
}

TEST(Successors, QuestionWithTwoReplies) {
  const Project p = fixtures::mood();
  // Hand-built adjacency list of the fixture.
  const std::map<NodeId, std::vector<NodeId>> expected = {
      {"start", {"ask"}}, {"ask", {"good", "bad"}}, {"good", {"end_good"}}, {"bad", {"end_bad"}}, {"end_good", {}}, {"end_bad", {}}};
  for (const auto& [id, want] : expected) {
    std::vector<NodeId> got;
    for (auto* n : successors(p, id)) got.push_back(n->id);
    EXPECT_EQ(got, want) << id;
  }
}

TEST(Model, PageMembershipCoversEveryNode) {
  fixtures::RandomProjects gen(11);
  for (int i = 0; i < 100; ++i) {
    const Project p = gen.project();
    std::size_t members = 0;
    for (const auto& [name, page] : p.pages) members += page.node_ids.size();
    EXPECT_EQ(members, p.nodes.size());
  }
}

TEST(Model, GeneratedProjectsAreValid) {
  fixtures::RandomProjects gen(12);
  for (int i = 0; i < 300; ++i) {
    const auto diags = validate(gen.project());
    ASSERT_FALSE(has_errors(diags)) << format(errors_of(diags).front());
  }
}

// Each mutation breaks exactly one invariant on a node no other mutation
// touches. After a random sequence, the set of Error checks reported must be
// exactly the set of invariants broken.
namespace {

struct Mutation {
  Check breaks;
  // Returns false when the project offers no suitable target.
  std::function<bool(Project&, std::set<NodeId>&, fixtures::RandomProjects&)> apply;
};

template <class Pred>
std::optional<NodeId> pick(const Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen, Pred pred) {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : p.nodes)
    if (!used.contains(id) && pred(n)) ids.push_back(id);
  if (ids.empty()) return std::nullopt;
  NodeId id = ids[gen.uniform(0, static_cast<int>(ids.size()) - 1)];
  used.insert(id);
  return id;
}

bool is_npc_item(const Project& p, const DialogNode& n) { return n.is<DialogItem>() && !is_player_item(p, n); }

std::vector<Mutation> catalog() {
  std::vector<Mutation> m;
  m.push_back({Check::PlayerItemWithCause, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [&](const DialogNode& n) { return is_player_item(p, n); });
                 if (!id) return false;
                 p.nodes[*id].as<DialogItem>().cause =
                     CauseWeights::zero(p.player_states.size(), p.npc_states.size());
                 return true;
               }});
  m.push_back({Check::NpcItemWithoutCause, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [&](const DialogNode& n) { return is_npc_item(p, n); });
                 if (!id) return false;
                 p.nodes[*id].as<DialogItem>().cause.reset();
                 return true;
               }});
  m.push_back({Check::WeightOutOfRange, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [&](const DialogNode& n) { return is_npc_item(p, n); });
                 if (!id) return false;
                 p.nodes[*id].as<DialogItem>().cause->general = 1.5;
                 return true;
               }});
  m.push_back({Check::WeightDimension, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode& n) { return n.is<DialogItem>(); });
                 if (!id) return false;
                 p.nodes[*id].as<DialogItem>().effect.player.push_back(0.0);
                 return true;
               }});
  m.push_back({Check::EmptyItem, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode& n) { return n.is<DialogItem>(); });
                 if (!id) return false;
                 auto& item = p.nodes[*id].as<DialogItem>();
                 item.cue.reset();
                 item.direction.reset();
                 return true;
               }});
  m.push_back({Check::UnresolvedTarget, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode& n) { return n.is<ReferenceNode>(); });
                 if (!id) return false;
                 p.nodes[*id].as<ReferenceNode>().target_start = "no such start";
                 return true;
               }});
  m.push_back({Check::NodeWithoutPage, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode&) { return true; });
                 if (!id) return false;
                 for (auto& [name, page] : p.pages) {
                   page.node_ids.erase(*id);
                   page.layout.erase(*id);
                 }
                 return true;
               }});
  m.push_back({Check::DanglingEdge, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode& n) { return n.is<DialogItem>(); });
                 if (!id) return false;
                 p.edges.push_back({*id, "ghost node", 1000, std::nullopt});
                 return true;
               }});
  m.push_back({Check::TerminalHasOutgoing, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto id = pick(p, used, gen, [](const DialogNode& n) { return n.is<TerminationNode>(); });
                 auto to = pick(p, used, gen, [](const DialogNode& n) { return n.is<TerminationNode>(); });
                 if (!id || !to) return false;
                 p.edges.push_back({*id, *to, 0, std::nullopt});
                 return true;
               }});
  m.push_back({Check::MisplacedBranchLabel, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 for (auto& e : p.edges) {
                   const auto& from = p.nodes.at(e.from);
                   if (used.contains(e.from) || !(from.is<StartNode>() || from.is<DialogItem>())) continue;
                   used.insert(e.from);
                   e.branch = "x";
                   (void)gen;
                   return true;
                 }
                 return false;
               }});
  m.push_back({Check::DuplicateStartName, [](Project& p, std::set<NodeId>& used, fixtures::RandomProjects& gen) {
                 auto a = pick(p, used, gen, [](const DialogNode& n) { return n.is<StartNode>(); });
                 if (!a) return false;
                 auto b = pick(p, used, gen, [](const DialogNode& n) { return n.is<StartNode>(); });
                 if (!b) {
                   used.erase(*a);
                   return false;
                 }
                 // Retarget references to b so none becomes ambiguous-by-accident.
                 const std::string old = p.nodes[*b].as<StartNode>().name;
                 p.nodes[*b].as<StartNode>().name = p.nodes[*a].as<StartNode>().name;
                 for (auto& [id, n] : p.nodes) {
                   if (auto* r = std::get_if<ReferenceNode>(&n.body); r && r->target_start == old) r->target_start = p.nodes[*a].as<StartNode>().name;
                   if (auto* s = std::get_if<SubdialogNode>(&n.body); s && s->target_start == old) s->target_start = p.nodes[*a].as<StartNode>().name;
                 }
                 return true;
               }});
  m.push_back({Check::StateDefaultOutOfRange, [](Project& p, std::set<NodeId>&, fixtures::RandomProjects&) {
                 for (auto* decls : {&p.player_states, &p.npc_states})
                   for (auto& d : *decls)
                     if (in_unit_range(d.default_value)) {
                       d.default_value = -2.0;
                       return true;
                     }
                 return false;
               }});
  m.push_back({Check::NoPlayerActor, [](Project& p, std::set<NodeId>&, fixtures::RandomProjects&) {
                 // Only safe before any player item exists to reference the actors.
                 for (const auto& [id, n] : p.nodes)
                   if (n.is<DialogItem>()) return false;
                 std::erase_if(p.actors, [](const auto& kv) { return kv.second.kind == Scope::Player; });
                 return true;
               }});
  return m;
}

}  // namespace

TEST(Validate, MutationsMapToErrorsAndBack) {
  fixtures::RandomProjects gen(13);
  const auto muts = catalog();
  int applied_total = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Project p = gen.project();
    std::set<NodeId> used;
    std::set<Check> expected;
    std::set<std::size_t> done;
    for (int k = gen.uniform(0, 5); k > 0; --k) {
      const std::size_t which = static_cast<std::size_t>(gen.uniform(0, static_cast<int>(muts.size()) - 1));
      if (done.contains(which)) continue;  // one use per kind keeps the bookkeeping exact
      if (muts[which].apply(p, used, gen)) {
        expected.insert(muts[which].breaks);
        done.insert(which);
        ++applied_total;
      }
    }
    std::set<Check> got;
    for (const auto& d : validate(p))
      if (d.severity == Severity::Error) got.insert(d.check);
    ASSERT_EQ(got, expected) << "trial " << trial;
  }
  EXPECT_GT(applied_total, 400);
}
