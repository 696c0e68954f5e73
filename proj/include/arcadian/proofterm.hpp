#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "arcadian/formula.hpp"

namespace arcadian {

// ---------------------------------------------------------------------------
// Proof terms of the natural-deduction system, the checker used as the
// independent soundness oracle, and the long-normal-form classifier.
// ---------------------------------------------------------------------------

enum class TermKind {
  Var, Pair, Proj, Inl, Inr, Case, Lam, App, TLam, TApp, Pack, Let, Abort
};

struct ProofTerm;
using TermPtr = std::shared_ptr<const ProofTerm>;

struct ProofTerm {
  TermKind kind;
  std::string var;   // Var name; Lam/TLam binder; Case first binder; Pack witness Y; Let proof binder x
  std::string var2;  // Case second binder; Pack bound variable X; Let first-order binder X
  int idx = 0;       // Proj index, 1 or 2
  FormulaPtr ann;    // Lam/Inl/Inr/Abort annotation; Case first branch; Pack body; Let body
  FormulaPtr ann2;   // Case second branch annotation
  TermPtr a, b, c;   // subterms (Case: a = major, b/c = branches; Let: a = M1, b = M2)

  static TermPtr mkvar(std::string x);
  static TermPtr pair(TermPtr m, TermPtr n);
  static TermPtr proj(int i, TermPtr m);
  static TermPtr inl(FormulaPtr disj, TermPtr m);
  static TermPtr inr(FormulaPtr disj, TermPtr m);
  static TermPtr case_of(TermPtr major, std::string x, FormulaPtr phi1, TermPtr n1,
                         std::string y, FormulaPtr phi2, TermPtr n2);
  static TermPtr lam(std::string x, FormulaPtr phi, TermPtr m);
  static TermPtr app(TermPtr m, TermPtr n);
  static TermPtr tlam(std::string X, TermPtr m);
  static TermPtr tapp(TermPtr m, std::string X);
  static TermPtr pack(TermPtr m, std::string witness, std::string boundvar, FormulaPtr phi);
  static TermPtr let_in(std::string x, FormulaPtr phi, TermPtr m1, std::string X, TermPtr m2);
  static TermPtr abort(FormulaPtr phi, TermPtr m);
};

// Typing context: proof variables to formulas, insertion-ordered.
struct Context {
  std::vector<std::pair<std::string, FormulaPtr>> items;

  const FormulaPtr* lookup(const std::string& x) const;
  Context extended(const std::string& x, FormulaPtr phi) const;  // later entries shadow
  std::set<std::string> free_fo_vars() const;
};

std::set<std::string> free_term_vars(const TermPtr& m);
std::set<std::string> free_fo_vars(const TermPtr& m);

struct CheckResult {
  enum Code { Accepted, UnboundVariable, RuleMismatch, EigenvariableViolation, NotSynthesizable };
  Code code = Accepted;
  std::string detail;

  bool ok() const { return code == Accepted; }
  static CheckResult accept() { return {}; }
  static CheckResult fail(Code c, std::string d) { return {c, std::move(d)}; }
};

// Bidirectional checker for the natural-deduction rules: eliminators
// synthesize, introductions check; case/let/abort synthesize their major
// premise.  Eigenvariable side conditions are enforced.
CheckResult type_check(const Context& ctx, const TermPtr& m, const FormulaPtr& phi);

// Synthesis for eliminator spines; fails on introductions.
std::variant<FormulaPtr, CheckResult> synthesize(const Context& ctx, const TermPtr& m);

enum class NFClass { Introduction, ProperEliminator, ImproperEliminator, NotNormal };
NFClass classify_nf(const TermPtr& m);

// Long-normal-form test.  Precondition: type_check(ctx, m, phi) accepted
// (throws std::invalid_argument otherwise).
bool is_lnf(const Context& ctx, const TermPtr& m, const FormulaPtr& phi);

// Eta-expands a well-typed term into long normal form.  Precondition:
// type_check(ctx, m, phi) accepted (throws std::invalid_argument otherwise).
TermPtr eta_expand(const Context& ctx, const TermPtr& m, const FormulaPtr& phi);

TermPtr parse_term(const std::string& text, Signature& sig);
TermPtr parse_term(const std::string& text);
std::string print_term(const TermPtr& m);

bool term_alpha_eq(const TermPtr& a, const TermPtr& b);

}  // namespace arcadian
