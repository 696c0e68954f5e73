#pragma once

// Shared helpers for the unit and acceptance tests: the curated corpora, a
// seeded random formula generator, an exhaustive small-formula enumerator, a
// small-frame Kripke evaluator, and the per-rule checker suite.

#include <array>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "arcadian/engine.hpp"
#include "arcadian/oracle.hpp"
#include "arcadian/proofterm.hpp"

namespace testutil {

using namespace arcadian;

inline const std::vector<std::string>& provable_corpus() {
  static const std::vector<std::string> v = {
      "p -> p",
      "p -> q -> p",
      "(p -> q -> r) -> (p -> q) -> p -> r",
      "p /\\ q -> q /\\ p",
      "p -> p \\/ q",
      "(p \\/ q) -> (q \\/ p)",
      "bot -> p",
      "~~(p \\/ ~p)",
      "(forall x. P(x) -> Q(x)) -> (forall x. P(x)) -> forall x. Q(x)",
      "(forall x. P(x)) -> ~exists x. ~P(x)",
      "(exists x. P(x)) -> ~forall x. ~P(x)",
      "(exists x. forall y. R(x,y)) -> forall y. exists x. R(x,y)",
      "(forall x. P(x) /\\ Q(x)) -> (forall x. P(x)) /\\ (forall x. Q(x))",
      "(exists x. P(x) \\/ Q(x)) -> (exists x. P(x)) \\/ (exists x. Q(x))",
      "(forall x. P(x)) -> forall y. exists x. P(x)",
  };
  return v;
}

inline const std::vector<std::string>& nontheorem_corpus() {
  static const std::vector<std::string> v = {
      "((p -> q) -> p) -> p",
      "p \\/ ~p",
      "~~p -> p",
      "(forall y. exists x. R(x,y)) -> exists x. forall y. R(x,y)",
      "exists x. (P(x) -> forall y. P(y))",
  };
  return v;
}

// ---------------------------------------------------------------------------
// Random closed formulas (first-order; unary P/Q, binary R, atoms p/q/r, bot).
// ---------------------------------------------------------------------------

inline FormulaPtr random_formula(std::mt19937& rng, int depth,
                                 std::vector<std::string>& scope) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  if (depth <= 0 || pick(5) == 0) {
    if (!scope.empty() && pick(2) == 0) {
      const std::string& x = scope[static_cast<size_t>(pick(static_cast<int>(scope.size())))];
      if (scope.size() >= 2 && pick(3) == 0) {
        const std::string& y =
            scope[static_cast<size_t>(pick(static_cast<int>(scope.size())))];
        return Formula::atom("R", {x, y});
      }
      return Formula::atom(pick(2) ? "P" : "Q", {x});
    }
    switch (pick(4)) {
      case 0: return Formula::atom("p");
      case 1: return Formula::atom("q");
      case 2: return Formula::atom("r");
      default: return Formula::bottom();
    }
  }
  switch (pick(5)) {
    case 0:
      return Formula::conj(random_formula(rng, depth - 1, scope),
                           random_formula(rng, depth - 1, scope));
    case 1:
      return Formula::disj(random_formula(rng, depth - 1, scope),
                           random_formula(rng, depth - 1, scope));
    case 2:
      return Formula::imp(random_formula(rng, depth - 1, scope),
                          random_formula(rng, depth - 1, scope));
    default: {
      std::string x = "v" + std::to_string(scope.size() + 1);
      scope.push_back(x);
      FormulaPtr body = random_formula(rng, depth - 1, scope);
      scope.pop_back();
      return pick(2) ? Formula::forall(x, body) : Formula::exists(x, body);
    }
  }
}

inline FormulaPtr random_formula(std::mt19937& rng, int depth = 5) {
  std::vector<std::string> scope;
  return random_formula(rng, depth, scope);
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of propositional formulas over {p, q, bot}.
// ---------------------------------------------------------------------------

// All propositional formulas with exactly `size` AST nodes.
inline const std::vector<FormulaPtr>& prop_formulas_of_size(int size) {
  static std::map<int, std::vector<FormulaPtr>> cache;
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  std::vector<FormulaPtr> out;
  if (size == 1) {
    out = {Formula::atom("p"), Formula::atom("q"), Formula::bottom()};
  } else if (size >= 3) {
    for (int ls = 1; ls <= size - 2; ls++) {
      for (auto& l : prop_formulas_of_size(ls)) {
        for (auto& r : prop_formulas_of_size(size - 1 - ls)) {
          out.push_back(Formula::imp(l, r));
          out.push_back(Formula::conj(l, r));
          out.push_back(Formula::disj(l, r));
        }
      }
    }
  }
  return cache.emplace(size, std::move(out)).first->second;
}

inline std::vector<FormulaPtr> prop_formulas_up_to(int size) {
  std::vector<FormulaPtr> out;
  for (int s = 1; s <= size; s++)
    for (auto& f : prop_formulas_of_size(s)) out.push_back(f);
  return out;
}

// ---------------------------------------------------------------------------
// Kripke evaluation over all frames with up to `max_worlds` worlds.
// ---------------------------------------------------------------------------

struct KripkeModel {
  int n = 1;
  std::array<std::array<bool, 3>, 3> le{};           // le[u][v]: v reachable from u
  std::map<std::string, std::array<bool, 3>> val;    // monotone atom valuation
};

inline bool kripke_forces(const KripkeModel& k, int w, const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom: return k.val.at(f->name)[static_cast<size_t>(w)];
    case Conn::Bottom: return false;
    case Conn::And: return kripke_forces(k, w, f->left) && kripke_forces(k, w, f->right);
    case Conn::Or: return kripke_forces(k, w, f->left) || kripke_forces(k, w, f->right);
    case Conn::Imp:
      for (int u = 0; u < k.n; u++)
        if (k.le[static_cast<size_t>(w)][static_cast<size_t>(u)] &&
            kripke_forces(k, u, f->left) && !kripke_forces(k, u, f->right))
          return false;
      return true;
    default: throw std::invalid_argument("kripke_forces: quantifier");
  }
}

inline void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->kind == Conn::Atom) out.insert(f->name);
  if (f->left) collect_atoms(f->left, out);
  if (f->right) collect_atoms(f->right, out);
}

// True iff no Kripke countermodel with at most `max_worlds` worlds exists.
inline bool kripke_valid(const FormulaPtr& f, int max_worlds = 3) {
  std::set<std::string> atom_set;
  collect_atoms(f, atom_set);
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  for (int n = 1; n <= max_worlds; n++) {
    // enumerate reflexive transitive reachability relations on n worlds
    int offdiag = n * (n - 1);
    for (int bits = 0; bits < (1 << offdiag); bits++) {
      KripkeModel k;
      k.n = n;
      int b = 0;
      for (int u = 0; u < n; u++)
        for (int v = 0; v < n; v++)
          if (u == v)
            k.le[static_cast<size_t>(u)][static_cast<size_t>(v)] = true;
          else
            k.le[static_cast<size_t>(u)][static_cast<size_t>(v)] = (bits >> b++) & 1;
      bool transitive = true;
      for (int u = 0; u < n && transitive; u++)
        for (int v = 0; v < n && transitive; v++)
          for (int t = 0; t < n && transitive; t++)
            if (k.le[static_cast<size_t>(u)][static_cast<size_t>(v)] &&
                k.le[static_cast<size_t>(v)][static_cast<size_t>(t)] &&
                !k.le[static_cast<size_t>(u)][static_cast<size_t>(t)])
              transitive = false;
      if (!transitive) continue;
      // enumerate monotone valuations
      std::vector<std::array<bool, 3>> upsets;
      for (int m = 0; m < (1 << n); m++) {
        std::array<bool, 3> s{};
        for (int u = 0; u < n; u++) s[static_cast<size_t>(u)] = (m >> u) & 1;
        bool mono = true;
        for (int u = 0; u < n && mono; u++)
          for (int v = 0; v < n && mono; v++)
            if (k.le[static_cast<size_t>(u)][static_cast<size_t>(v)] &&
                s[static_cast<size_t>(u)] && !s[static_cast<size_t>(v)])
              mono = false;
        if (mono) upsets.push_back(s);
      }
      std::vector<size_t> pick(atoms.size(), 0);
      for (;;) {
        for (size_t i = 0; i < atoms.size(); i++) k.val[atoms[i]] = upsets[pick[i]];
        for (int w = 0; w < n; w++)
          if (!kripke_forces(k, w, f)) return false;
        size_t i = 0;
        while (i < pick.size() && ++pick[i] == upsets.size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Per-rule checker suite: a positive and a minimally perturbed negative
// instance for every natural-deduction rule, including the eigenvariable
// side conditions of universal introduction/elimination and existential
// elimination.
// ---------------------------------------------------------------------------

struct CheckerCase {
  std::string name;
  bool want_accept;
  Context ctx;
  std::string term;
  std::string formula;
  CheckResult::Code want_code = CheckResult::Accepted;
};

inline std::vector<CheckerCase> checker_cases() {
  auto f = [](const std::string& s) { return parse_formula(s); };
  Context var_ctx{{{"x", f("p")}}};
  Context app_ctx{{{"x", f("r")}, {"y", f("r -> p \\/ q")}}};
  Context case_ctx{{{"z", f("p \\/ q")}, {"f", f("p -> r")}, {"g", f("q -> r")}}};
  Context proj_ctx{{{"x", f("p /\\ q")}}};
  Context inl_ctx{{{"x", f("p")}}};
  Context tlam_ctx{{{"x", f("forall y. P(y)")}}};
  Context tlam_bad{{{"x", f("P(X)")}}};
  Context tapp_ctx{{{"x", f("forall u. exists v. R(u,v)")}}};
  Context pack_ctx{{{"x", f("P(Y)")}}};
  Context let_ctx{{{"z", f("exists v. P(v)")}, {"f", f("forall v. (P(v) -> q)")}}};
  Context let_bad{{{"z", f("exists v. P(v)")}}};
  Context abort_ctx{{{"z", f("bot")}}};
  Context abort_bad{{{"z", f("p")}}};

  return {
      {"var accept", true, var_ctx, "x", "p"},
      {"var unbound", false, var_ctx, "y", "p", CheckResult::UnboundVariable},
      {"var mismatch", false, var_ctx, "x", "q", CheckResult::RuleMismatch},
      {"and-intro accept", true, proj_ctx, "<p1 x, p2 x>", "p /\\ q"},
      {"and-intro swapped", false, proj_ctx, "<p1 x, p2 x>", "q /\\ p",
       CheckResult::RuleMismatch},
      {"and-elim accept", true, proj_ctx, "p2 x", "q"},
      {"and-elim wrong side", false, proj_ctx, "p2 x", "p", CheckResult::RuleMismatch},
      {"or-intro accept", true, inl_ctx, "inl[p \\/ q] x", "p \\/ q"},
      {"or-intro wrong disjunct", false, inl_ctx, "inr[p \\/ q] x", "p \\/ q",
       CheckResult::RuleMismatch},
      {"or-elim accept", true, case_ctx, "case z of {x:p => f x | y:q => g y}", "r"},
      {"or-elim swapped branches", false, case_ctx,
       "case z of {x:q => g x | y:p => f y}", "r", CheckResult::RuleMismatch},
      {"imp-intro accept", true, {}, "\\x:p. x", "p -> p"},
      {"imp-intro wrong annotation", false, {}, "\\x:q. x", "p -> p",
       CheckResult::RuleMismatch},
      {"imp-elim accept", true, app_ctx, "y x", "p \\/ q"},
      {"imp-elim non-function", false, app_ctx, "x y", "p \\/ q",
       CheckResult::RuleMismatch},
      {"forall-intro accept", true, tlam_ctx, "\\\\X. x @X", "forall z. P(z)"},
      {"forall-intro eigen violation", false, tlam_bad, "\\\\X. x", "forall X. P(X)",
       CheckResult::EigenvariableViolation},
      {"forall-elim accept", true, tlam_ctx, "x @Y", "P(Y)"},
      {"forall-elim capturing substitution", false, tapp_ctx, "x @v",
       "exists v. R(v,v)", CheckResult::EigenvariableViolation},
      {"exists-intro accept", true, pack_ctx, "pack x, Y to v. P(v)", "exists v. P(v)"},
      {"exists-intro wrong body", false, pack_ctx, "pack x, Y to v. Q(v)",
       "exists v. P(v)", CheckResult::RuleMismatch},
      {"exists-elim accept", true, let_ctx, "let [X, x:P(X)] = z in (f @X) x", "q"},
      {"exists-elim eigen violation", false, let_bad, "let [X, x:P(X)] = z in x",
       "P(X)", CheckResult::EigenvariableViolation},
      {"bottom-elim accept", true, abort_ctx, "abort[p] z", "p"},
      {"bottom-elim non-bottom major", false, abort_bad, "abort[p] z", "p",
       CheckResult::RuleMismatch},
  };
}

// Runs one checker case; true iff the observed result matches expectation.
inline bool run_checker_case(const CheckerCase& c, std::string* why = nullptr) {
  TermPtr m = parse_term(c.term);
  CheckResult r = type_check(c.ctx, m, parse_formula(c.formula));
  bool ok = c.want_accept ? r.ok() : (!r.ok() && r.code == c.want_code);
  if (!ok && why)
    *why = c.name + ": got code " + std::to_string(static_cast<int>(r.code)) + " " + r.detail;
  return ok;
}

// Instruction-kind sequence along a run that is a single path.
inline std::vector<Op> run_kind_path(const Automaton& aut, const RunPtr& run) {
  std::vector<Op> out;
  RunPtr cur = run;
  while (cur && !cur->edges.empty()) {
    if (cur->edges.size() != 1) throw std::logic_error("run is not a path");
    out.push_back(aut.instructions.at(cur->edges[0].instruction).op);
    cur = cur->edges[0].child;
  }
  return out;
}

}  // namespace testutil
