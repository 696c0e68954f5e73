#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arcadian/formula.hpp"
#include "testutil.hpp"

using namespace arcadian;

namespace {
const char* kExample = "(forall x. P(x)) -> forall y. exists x. P(x)";
}

TEST_CASE("parse: worked example, bot, right associativity, negation sugar") {
  FormulaPtr f = parse_formula(kExample);
  REQUIRE(f->kind == Conn::Imp);
  CHECK(f->left->kind == Conn::Forall);
  CHECK(f->right->kind == Conn::Forall);
  CHECK(f->right->left->kind == Conn::Exists);

  CHECK(parse_formula("bot")->kind == Conn::Bottom);

  FormulaPtr g = parse_formula("p -> q -> p");
  REQUIRE(g->kind == Conn::Imp);
  CHECK(g->right->kind == Conn::Imp);
  CHECK(alpha_eq(g->left, Formula::atom("p")));

  CHECK(alpha_eq(parse_formula("~a"), parse_formula("a -> bot")));
}

TEST_CASE("parse: errors carry positions; arities are enforced") {
  CHECK_THROWS_AS(parse_formula("p ->"), ParseError);
  CHECK_THROWS_AS(parse_formula("forall . p"), ParseError);
  CHECK_THROWS_AS(parse_formula("P(x) /\\ P(x,y)"), ParseError);
}

TEST_CASE("print: bot, minimal parenthesization, worked example") {
  CHECK(print_formula(Formula::bottom()) == "bot");
  CHECK(print_formula(parse_formula("p -> q -> p")) == "p -> q -> p");
  CHECK(print_formula(parse_formula(kExample)) == kExample);
}

TEST_CASE("free_vars clauses") {
  CHECK(free_vars(Formula::atom("P", {"x", "y"})) == std::set<std::string>{"x", "y"});
  CHECK(free_vars(parse_formula("forall x. P(x)")).empty());
  CHECK(free_vars(Formula::exists("x", Formula::imp(Formula::bottom(),
                                                    Formula::atom("P", {"x"}))))
            .empty());
  CHECK(free_vars(Formula::conj(Formula::atom("P", {"x"}),
                                parse_formula("forall x. P(x)"))) ==
        std::set<std::string>{"x"});
}

TEST_CASE("index: worked example tree, trivial tree, closedness") {
  FormulaTree t = index_formula(parse_formula(kExample));
  REQUIRE(t.nodes.size() == 6);
  CHECK(t.at({}).kind == Conn::Imp);
  CHECK(t.at({0}).kind == Conn::Forall);
  CHECK(t.at({0, 0}).kind == Conn::Atom);
  CHECK(t.at({1}).kind == Conn::Forall);
  CHECK(t.at({1, 0}).kind == Conn::Exists);
  CHECK(t.at({1, 0, 0}).kind == Conn::Atom);
  CHECK(t.at({0, 0}).fv == std::set<NodeId>{{0}});
  CHECK(t.at({1, 0, 0}).fv == std::set<NodeId>{{1, 0}});
  for (auto& n : {NodeId{}, NodeId{0}, NodeId{1}, NodeId{1, 0}})
    CHECK(t.at(n).fv.empty());

  FormulaTree t2 = index_formula(parse_formula("bot -> bot"));
  CHECK(t2.nodes.size() == 3);
  for (auto& [id, nd] : t2.nodes) CHECK(nd.fv.empty());

  FormulaTree t3 = index_formula(parse_formula("bot -> exists X. (bot -> P(X))"));
  CHECK(t3.at({1, 0, 1}).fv == std::set<NodeId>{{1}});

  CHECK_THROWS_AS(index_formula(Formula::atom("P", {"x"})), NotClosed);
}

TEST_CASE("bind: closest binding quantifier ancestor") {
  FormulaTree t = index_formula(parse_formula(kExample));
  CHECK(bind_node(t, {1, 0, 0}, "x") == NodeId{1, 0});
  CHECK(bind_node(t, {0, 0}, "x") == NodeId{0});
  CHECK_THROWS_AS(bind_node(t, {0, 0}, "y"), std::invalid_argument);

  FormulaTree t3 = index_formula(parse_formula("bot -> exists X. (bot -> P(X))"));
  CHECK(bind_node(t3, {1, 0, 1}, "X") == NodeId{1});
}

TEST_CASE("instantiate") {
  FormulaTree t = index_formula(parse_formula(kExample));
  Binding w1;
  w1.map[{1, 0}] = "X1";
  CHECK(alpha_eq(instantiate(t, {1, 0, 0}, w1), Formula::atom("P", {"X1"})));
  CHECK(alpha_eq(instantiate(t, {0}, Binding{}), parse_formula("forall x. P(x)")));
  Binding w2;
  w2.map[{0}] = "X2";
  CHECK(alpha_eq(instantiate(t, {0, 0}, w2), Formula::atom("P", {"X2"})));
  CHECK_THROWS_AS(instantiate(t, {0, 0}, Binding{}), std::invalid_argument);
}

TEST_CASE("emerged_from: scan of the worked example") {
  FormulaTree t = index_formula(parse_formula(kExample));
  auto occ = emerged_from(Formula::atom("P", {"X1"}), t);
  REQUIRE(occ.size() == 2);
  CHECK(occ[0].first == NodeId{0, 0});
  CHECK(occ[0].second == Substitution{{"x", "X1"}});
  CHECK(occ[1].first == NodeId{1, 0, 0});
  CHECK(occ[1].second == Substitution{{"x", "X1"}});

  auto occ2 = emerged_from(parse_formula("forall x. P(x)"), t);
  REQUIRE(occ2.size() == 1);
  CHECK(occ2[0].first == NodeId{0});
  CHECK(occ2[0].second.empty());

  CHECK(emerged_from(Formula::bottom(), t).empty());
}

TEST_CASE("alpha_eq") {
  CHECK(alpha_eq(parse_formula("forall x. P(x)"), parse_formula("forall y. P(y)")));
  CHECK_FALSE(alpha_eq(parse_formula("forall x. P(x)"), parse_formula("exists x. P(x)")));
  CHECK(alpha_eq(parse_formula("forall x. forall y. R(x,y)"),
                 parse_formula("forall y. forall x. R(y,x)")));
  CHECK_FALSE(alpha_eq(parse_formula("forall x. forall y. R(x,y)"),
                       parse_formula("forall y. forall x. R(x,y)")));
}

TEST_CASE("property: parse/print round trip on random formulas") {
  std::mt19937 rng(20260824);
  for (int i = 0; i < 300; i++) {
    FormulaPtr f = testutil::random_formula(rng, 6);
    CAPTURE(print_formula(f));
    CHECK(alpha_eq(parse_formula(print_formula(f)), f));
  }
}

TEST_CASE("property: bind is the least binding ancestor; fv closure") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; i++) {
    FormulaPtr f = testutil::random_formula(rng, 5);
    if (!free_vars(f).empty()) continue;
    FormulaTree t = index_formula(f);
    for (auto& [id, nd] : t.nodes) {
      for (auto& x : nd.free) {
        NodeId b = bind_node(t, id, x);
        // b is a strict ancestor, a quantifier, and binds x; no closer
        // quantifier ancestor binds x
        CHECK(b.size() < id.size());
        CHECK(std::equal(b.begin(), b.end(), id.begin()));
        CHECK(t.is_quantifier(b));
        CHECK(t.at(b).formula->name == x);
        for (size_t cut = b.size() + 1; cut < id.size(); cut++) {
          NodeId mid(id.begin(), id.begin() + static_cast<long>(cut));
          if (t.is_quantifier(mid)) CHECK(t.at(mid).formula->name != x);
        }
      }
      // fv closure invariant (leaves are the base case of the definition)
      if (!nd.children.empty()) {
        std::set<NodeId> kids;
        for (auto& c : nd.children)
          for (auto& b : t.at(c).fv) kids.insert(b);
        if (t.is_quantifier(id)) kids.erase(id);
        CHECK(nd.fv == kids);
      }
    }
  }
}

TEST_CASE("property: instantiate ignores bindings outside fv") {
  FormulaTree t = index_formula(parse_formula(kExample));
  Binding w;
  w.map[{1, 0}] = "X1";
  Binding wide = w;
  wide.map[{0}] = "X2";
  wide.map[{1}] = "X3";
  CHECK(alpha_eq(instantiate(t, {1, 0, 0}, w), instantiate(t, {1, 0, 0}, wide)));
}

TEST_CASE("property: emerged_from is complete for direct instantiations") {
  FormulaTree t = index_formula(parse_formula(kExample));
  for (auto& [id, nd] : t.nodes) {
    Binding w;
    int k = 0;
    for (auto& b : nd.fv) w.map[b] = "X" + std::to_string(++k);
    FormulaPtr inst = instantiate(t, id, w);
    bool found = false;
    for (auto& [n, sigma] : emerged_from(inst, t))
      if (n == id) found = true;
    CHECK(found);
  }
}
