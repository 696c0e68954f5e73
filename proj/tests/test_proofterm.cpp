#include <doctest.h>

#include "arcadian/proofterm.hpp"
#include "testutil.hpp"

using namespace arcadian;

namespace {
FormulaPtr f(const std::string& s) { return parse_formula(s); }
TermPtr pt(const std::string& s) { return parse_term(s); }
}  // namespace

TEST_CASE("free_term_vars") {
  CHECK(free_term_vars(ProofTerm::mkvar("x")) == std::set<std::string>{"x"});
  CHECK(free_term_vars(pt("\\x:p. x")).empty());
  TermPtr c = ProofTerm::case_of(ProofTerm::mkvar("z"), "x", f("p"), ProofTerm::mkvar("x"),
                                 "y", f("q"), ProofTerm::mkvar("w"));
  CHECK(free_term_vars(c) == std::set<std::string>{"z", "w"});
}

TEST_CASE("free_fo_vars") {
  CHECK(free_fo_vars(ProofTerm::inl(f("P(x) \\/ q"), ProofTerm::mkvar("z"))) ==
        std::set<std::string>{"x"});
  CHECK(free_fo_vars(pt("\\\\X. f @X")).empty());
  CHECK(free_fo_vars(ProofTerm::tapp(ProofTerm::mkvar("f"), "Y")) ==
        std::set<std::string>{"Y"});
}

TEST_CASE("type_check: spec instances") {
  CHECK(type_check({}, pt("\\x:p. x"), f("p -> p")).ok());

  Context g{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  CHECK(type_check(g, pt("y x"), f("p \\/ q")).ok());

  Context h{{{"x", f("P(Y)")}}};
  CheckResult r = type_check(h, pt("\\\\Y. x"), f("forall Y. P(Y)"));
  CHECK(r.code == CheckResult::EigenvariableViolation);
}

TEST_CASE("type_check: per-rule positive and perturbed negative instances") {
  for (auto& c : testutil::checker_cases()) {
    std::string why;
    CAPTURE(c.name);
    CHECK_MESSAGE(testutil::run_checker_case(c, &why), why);
  }
}

TEST_CASE("type_check: weakening and alpha invariance") {
  Context g{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  Context gw = g.extended("z", f("bot"));
  CHECK(type_check(gw, pt("y x"), f("p \\/ q")).ok());

  CHECK(type_check({}, pt("\\\\X. \\x:P(X). x"), f("forall y. (P(y) -> P(y))")).ok());
  CHECK(type_check({}, pt("\\\\Z. \\w:P(Z). w"), f("forall y. (P(y) -> P(y))")).ok());
}

TEST_CASE("classify_nf") {
  CHECK(classify_nf(ProofTerm::mkvar("x")) == NFClass::ProperEliminator);
  CHECK(classify_nf(pt("(\\x:p. x) y")) == NFClass::NotNormal);
  CHECK(classify_nf(pt("abort[p] z")) == NFClass::ImproperEliminator);
  CHECK(classify_nf(pt("\\x:p. x")) == NFClass::Introduction);
  CHECK(classify_nf(pt("p1 ((\\x:p. x) y)")) == NFClass::NotNormal);
}

TEST_CASE("is_lnf: pseudo-atom spines; bare function spine needs its eta-long form") {
  Context g{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  CHECK(is_lnf(g, pt("y x"), f("p \\/ q")));
  CHECK_FALSE(is_lnf(g, pt("y"), f("r -> p \\/ q")));
  CHECK(is_lnf(g, pt("\\z:r. y z"), f("r -> p \\/ q")));
  CHECK(is_lnf({}, pt("\\x:p. x"), f("p -> p")));
  CHECK_THROWS_AS(is_lnf({}, pt("\\x:p. x"), f("p -> q")), std::invalid_argument);
}

TEST_CASE("is_lnf implies normal") {
  Context g{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  TermPtr m = pt("\\z:r. y z");
  REQUIRE(is_lnf(g, m, f("r -> p \\/ q")));
  CHECK(classify_nf(m) != NFClass::NotNormal);
}

TEST_CASE("eta_expand produces a verified long normal form") {
  Context g{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  TermPtr e = eta_expand(g, pt("y"), f("r -> p \\/ q"));
  CHECK(type_check(g, e, f("r -> p \\/ q")).ok());
  CHECK(is_lnf(g, e, f("r -> p \\/ q")));

  Context h{{{"u", f("p /\\ (q -> q)")}}};
  FormulaPtr phi = f("p /\\ (q -> q)");
  TermPtr e2 = eta_expand(h, pt("u"), phi);
  CHECK(type_check(h, e2, phi).ok());
  CHECK(is_lnf(h, e2, phi));

  Context k{{{"v", f("forall x. (P(x) -> P(x))")}}};
  FormulaPtr psi = f("forall x. (P(x) -> P(x))");
  TermPtr e3 = eta_expand(k, pt("v"), psi);
  CHECK(type_check(k, e3, psi).ok());
  CHECK(is_lnf(k, e3, psi));
}

TEST_CASE("term parse/print round trips") {
  for (const char* s :
       {"\\x:p. x", "<p1 u, p2 u>", "inl[p \\/ q] x", "case z of {x:p => f x | y:q => g y}",
        "\\\\X. x @X", "pack x, Y to v. P(v)", "let [X, x:P(X)] = z in (f @X) x",
        "abort[p] z", "y x"}) {
    TermPtr m = parse_term(s);
    CAPTURE(s);
    CHECK(term_alpha_eq(parse_term(print_term(m)), m));
  }
}

TEST_CASE("term_alpha_eq covers both binder sorts") {
  CHECK(term_alpha_eq(pt("\\x:p. x"), pt("\\y:p. y")));
  CHECK_FALSE(term_alpha_eq(pt("\\x:p. x"), pt("\\x:q. x")));
  CHECK(term_alpha_eq(pt("\\\\X. \\x:P(X). x"), pt("\\\\Y. \\z:P(Y). z")));
  CHECK_FALSE(term_alpha_eq(pt("\\\\X. \\x:P(X). x"), pt("\\\\Y. \\z:Q(Y). z")));
}
