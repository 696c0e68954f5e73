#include <doctest.h>

#include "arcadian/engine.hpp"
#include "testutil.hpp"

using namespace arcadian;

namespace {
const char* kExample = "(forall x. P(x)) -> forall y. exists x. P(x)";
}

TEST_CASE("construction: dump_table lists the worked example's instructions") {
  Automaton aut = build_automaton(parse_formula(kExample));
  std::string table = dump_table(aut);
  CHECK(table.find("(1) qA@e: store 0, 1, qE@1") != std::string::npos);
  CHECK(table.find("(4) qA@0: new 0.0, qE@0.0") != std::string::npos);
  CHECK(table.find("(4) qA@1: new 1.0, qE@1.0") != std::string::npos);
  CHECK(table.find("(5) qA@1.0: instr 1.0.0, qE@1.0.0") != std::string::npos);
  CHECK(table.find("(10) qE@0.0: jmp 0, qH@0") != std::string::npos);
  CHECK(table.find("(10) qE@1.0.0: jmp 0, qH@0") != std::string::npos);
  CHECK(table.find("(13) qE@e: check e, e, qA@axiom") != std::string::npos);
  CHECK(table.find("(19)") != std::string::npos);
  CHECK(table.find("(20)") != std::string::npos);
  CHECK(dump_table(build_automaton(parse_formula(kExample))) == table);  // deterministic
}

TEST_CASE("construction: no bottom instructions without bottom; families for p -> p") {
  std::string t1 = dump_table(build_automaton(parse_formula("p -> q -> p")));
  CHECK(t1.find("(12)") == std::string::npos);
  CHECK(t1.find("(21)") == std::string::npos);

  std::string t2 = dump_table(build_automaton(parse_formula("bot -> bot")));
  CHECK(t2.find("(1) qA@e: store 0, 1, qE@1") != std::string::npos);
  CHECK(t2.find("(12)") != std::string::npos);
  CHECK(t2.find("(21)") != std::string::npos);
  CHECK(t2.find("(4)") == std::string::npos);
  CHECK(t2.find("(5)") == std::string::npos);
}

TEST_CASE("construction: every existential state retains its axiom check") {
  Automaton aut = build_automaton(parse_formula(kExample));
  for (auto& st : aut.states) {
    if (st.universal) continue;
    bool has_check = false;
    for (int ii : st.available)
      has_check |= aut.instructions[static_cast<size_t>(ii)].op == Op::Check;
    CHECK_MESSAGE(has_check, st.name);
  }
}

TEST_CASE("construction: initial_id and judgment_to_id") {
  Automaton aut = build_automaton(parse_formula(kExample));
  ID init = initial_id(aut);
  CHECK(aut.state(init.state).name == "qE@e");
  CHECK(init.node.empty());
  CHECK(init.w.map.empty());
  CHECK(init.store.empty());
  CHECK(init.V.empty());

  Context gamma{{{"x", parse_formula("forall x. P(x)")}}};
  ID id = judgment_to_id(aut, gamma, Formula::atom("P", {"X1"}));
  CHECK(aut.state(id.state).name == "qE@0.0");  // least of the two emergence nodes
  CHECK(id.node == NodeId{0, 0});
  CHECK(id.w.map == std::map<NodeId, std::string>{{{0}, "X1"}});
  CHECK(id.waux.map.empty());
  REQUIRE(id.store.size() == 1);
  CHECK(id.store[0].node == NodeId{0});
  CHECK(id.store[0].v.map.empty());
  CHECK(id.store[0].label == "x");
  CHECK(id.V == std::vector<std::string>{"X1"});

  CHECK(judgment_to_id(aut, {}, parse_formula(kExample)) == initial_id(aut));
  CHECK_THROWS_AS(judgment_to_id(aut, Context{{{"x", parse_formula("q")}}},
                                 Formula::atom("p")),
                  std::invalid_argument);
}

TEST_CASE("judgments of each proof rule map to accepting IDs") {
  // for each rule, a derivable judgment whose translated ID accepts
  struct Fixture {
    const char* root;
    std::vector<std::pair<const char*, const char*>> gamma;
    const char* goal;
  };
  std::vector<Fixture> fixtures = {
      {"p -> p", {{"x", "p"}}, "p"},                                      // axiom
      {"p /\\ q -> q /\\ p", {{"x", "p /\\ q"}}, "q /\\ p"},              // and-intro
      {"p /\\ q -> q", {{"x", "p /\\ q"}}, "q"},                          // and-elim
      {"p -> p \\/ q", {{"x", "p"}}, "p \\/ q"},                          // or-intro
      {"(p \\/ q) -> (q \\/ p)", {{"x", "p \\/ q"}}, "q \\/ p"},          // or-elim
      {"p -> q -> p", {}, "p -> q -> p"},                                 // imp-intro
      {"(p -> q) -> p -> q", {{"f", "p -> q"}, {"x", "p"}}, "q"},         // imp-elim
      {"p -> forall x. p", {{"x", "p"}}, "forall x. p"},                  // forall-intro
      {"(forall x. P(x)) -> forall y. P(y)",
       {{"x", "forall x. P(x)"}},
       "P(X1)"},                                                          // forall-elim
      {"(forall y. P(y)) -> exists x. P(x)",
       {{"x", "P(X1)"}},
       "exists x. P(x)"},                                                 // exists-intro
      {"(exists x. P(x)) -> exists y. P(y)",
       {{"z", "exists x. P(x)"}},
       "exists y. P(y)"},                                                 // exists-elim
      {"bot -> p", {{"z", "bot"}}, "p"},                                  // bottom-elim
  };
  for (auto& fx : fixtures) {
    CAPTURE(fx.root);
    CAPTURE(fx.goal);
    Automaton aut = build_automaton(parse_formula(fx.root));
    Context gamma;
    for (auto& [x, phi] : fx.gamma) gamma.items.emplace_back(x, parse_formula(phi));
    ID id = judgment_to_id(aut, gamma, parse_formula(fx.goal));
    CHECK(accepts(aut, id, {16, 3}).run);
  }
}

TEST_CASE("prove: worked example, identity, Peirce") {
  ProveResult r1 = prove(build_automaton(parse_formula(kExample)), {16, 2});
  REQUIRE(r1.outcome == ProveOutcome::Proved);
  CHECK(term_alpha_eq(r1.term,
                      parse_term("\\x:(forall x. P(x)). \\\\Y. pack (x @Y), Y to x. P(x)")));

  ProveResult r2 = prove(build_automaton(parse_formula("p -> p")), {8, 0});
  REQUIRE(r2.outcome == ProveOutcome::Proved);
  CHECK(term_alpha_eq(r2.term, parse_term("\\x:p. x")));

  ProveResult r3 = prove(build_automaton(parse_formula("((p -> q) -> p) -> p")), {20, 0});
  CHECK(r3.outcome != ProveOutcome::Proved);
}

TEST_CASE("extract: conjunction elimination run") {
  Automaton aut = build_automaton(parse_formula("p /\\ q -> q"));
  ProveResult r = prove(aut, {12, 0});
  REQUIRE(r.outcome == ProveOutcome::Proved);
  CHECK(term_alpha_eq(r.raw_term, parse_term("\\x1:p /\\ q. p2 x1")));
}

TEST_CASE("verify") {
  CHECK(verify(parse_formula("p -> p"), parse_term("\\x:p. x")));
  CHECK_FALSE(verify(parse_formula("p -> q"), parse_term("\\x:p. x")));
  ProveResult r = prove(build_automaton(parse_formula(kExample)), {16, 2});
  REQUIRE(r.outcome == ProveOutcome::Proved);
  CHECK(verify(parse_formula(kExample), r.term));
}

TEST_CASE("prove result invariant: verified long normal form, replayable run") {
  for (auto& s : testutil::provable_corpus()) {
    CAPTURE(s);
    FormulaPtr f = parse_formula(s);
    Automaton aut = build_automaton(f);
    ProveResult r = prove(aut, {24, 3});
    REQUIRE(r.outcome == ProveOutcome::Proved);
    CHECK(verify(f, r.term));
    CHECK(is_lnf({}, r.term, f));
    std::string err;
    CHECK_MESSAGE(replay_run(aut, r.run, &err), err);
    CHECK(check_emergence(aut, r.run));
  }
}

TEST_CASE("prove is deterministic") {
  Automaton aut = build_automaton(parse_formula(kExample));
  ProveResult a = prove(aut, {16, 2});
  ProveResult b = prove(aut, {16, 2});
  REQUIRE(a.outcome == ProveOutcome::Proved);
  CHECK(print_term(a.term) == print_term(b.term));
  CHECK(run_to_json(aut, a.run) == run_to_json(aut, b.run));
}
