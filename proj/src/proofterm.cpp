#include "arcadian/proofterm.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace arcadian {

// --------------------------------------------------------------------------
// Constructors
// --------------------------------------------------------------------------

static TermPtr mk(ProofTerm t) { return std::make_shared<const ProofTerm>(std::move(t)); }

TermPtr ProofTerm::mkvar(std::string x) {
  ProofTerm t;
  t.kind = TermKind::Var;
  t.var = std::move(x);
  return mk(std::move(t));
}
TermPtr ProofTerm::pair(TermPtr m, TermPtr n) {
  ProofTerm t;
  t.kind = TermKind::Pair;
  t.a = std::move(m);
  t.b = std::move(n);
  return mk(std::move(t));
}
TermPtr ProofTerm::proj(int i, TermPtr m) {
  ProofTerm t;
  t.kind = TermKind::Proj;
  t.idx = i;
  t.a = std::move(m);
  return mk(std::move(t));
}
static TermPtr injection(TermKind k, FormulaPtr d, TermPtr m) {
  ProofTerm t;
  t.kind = k;
  t.ann = std::move(d);
  t.a = std::move(m);
  return mk(std::move(t));
}
TermPtr ProofTerm::inl(FormulaPtr d, TermPtr m) { return injection(TermKind::Inl, std::move(d), std::move(m)); }
TermPtr ProofTerm::inr(FormulaPtr d, TermPtr m) { return injection(TermKind::Inr, std::move(d), std::move(m)); }
TermPtr ProofTerm::case_of(TermPtr major, std::string x, FormulaPtr phi1, TermPtr n1,
                           std::string y, FormulaPtr phi2, TermPtr n2) {
  ProofTerm t;
  t.kind = TermKind::Case;
  t.a = std::move(major);
  t.var = std::move(x);
  t.ann = std::move(phi1);
  t.b = std::move(n1);
  t.var2 = std::move(y);
  t.ann2 = std::move(phi2);
  t.c = std::move(n2);
  return mk(std::move(t));
}
TermPtr ProofTerm::lam(std::string x, FormulaPtr phi, TermPtr m) {
  ProofTerm t;
  t.kind = TermKind::Lam;
  t.var = std::move(x);
  t.ann = std::move(phi);
  t.a = std::move(m);
  return mk(std::move(t));
}
TermPtr ProofTerm::app(TermPtr m, TermPtr n) {
  ProofTerm t;
  t.kind = TermKind::App;
  t.a = std::move(m);
  t.b = std::move(n);
  return mk(std::move(t));
}
TermPtr ProofTerm::tlam(std::string X, TermPtr m) {
  ProofTerm t;
  t.kind = TermKind::TLam;
  t.var = std::move(X);
  t.a = std::move(m);
  return mk(std::move(t));
}
TermPtr ProofTerm::tapp(TermPtr m, std::string X) {
  ProofTerm t;
  t.kind = TermKind::TApp;
  t.a = std::move(m);
  t.var = std::move(X);
  return mk(std::move(t));
}
TermPtr ProofTerm::pack(TermPtr m, std::string witness, std::string boundvar, FormulaPtr phi) {
  ProofTerm t;
  t.kind = TermKind::Pack;
  t.a = std::move(m);
  t.var = std::move(witness);
  t.var2 = std::move(boundvar);
  t.ann = std::move(phi);
  return mk(std::move(t));
}
TermPtr ProofTerm::let_in(std::string x, FormulaPtr phi, TermPtr m1, std::string X, TermPtr m2) {
  ProofTerm t;
  t.kind = TermKind::Let;
  t.var = std::move(x);
  t.ann = std::move(phi);
  t.a = std::move(m1);
  t.var2 = std::move(X);
  t.b = std::move(m2);
  return mk(std::move(t));
}
TermPtr ProofTerm::abort(FormulaPtr phi, TermPtr m) {
  ProofTerm t;
  t.kind = TermKind::Abort;
  t.ann = std::move(phi);
  t.a = std::move(m);
  return mk(std::move(t));
}

// --------------------------------------------------------------------------
// Contexts and free variables
// --------------------------------------------------------------------------

const FormulaPtr* Context::lookup(const std::string& x) const {
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

Context Context::extended(const std::string& x, FormulaPtr phi) const {
  Context out = *this;
  out.items.emplace_back(x, std::move(phi));
  return out;
}

std::set<std::string> Context::free_fo_vars() const {
  std::set<std::string> out;
  for (auto& [x, phi] : items)
    for (auto& v : free_vars(phi)) out.insert(v);
  return out;
}

std::set<std::string> free_term_vars(const TermPtr& m) {
  std::set<std::string> out;
  auto minus = [](std::set<std::string> s, const std::string& x) {
    s.erase(x);
    return s;
  };
  switch (m->kind) {
    case TermKind::Var: out.insert(m->var); break;
    case TermKind::Pair:
    case TermKind::App: {
      out = free_term_vars(m->a);
      for (auto& v : free_term_vars(m->b)) out.insert(v);
      break;
    }
    case TermKind::Proj:
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::TLam:
    case TermKind::TApp:
    case TermKind::Pack:
    case TermKind::Abort: out = free_term_vars(m->a); break;
    case TermKind::Case: {
      out = free_term_vars(m->a);
      for (auto& v : minus(free_term_vars(m->b), m->var)) out.insert(v);
      for (auto& v : minus(free_term_vars(m->c), m->var2)) out.insert(v);
      break;
    }
    case TermKind::Lam: out = minus(free_term_vars(m->a), m->var); break;
    case TermKind::Let: {
      out = free_term_vars(m->a);
      for (auto& v : minus(free_term_vars(m->b), m->var)) out.insert(v);
      break;
    }
  }
  return out;
}

std::set<std::string> free_fo_vars(const TermPtr& m) {
  std::set<std::string> out;
  auto add_formula = [&](const FormulaPtr& f) {
    if (f)
      for (auto& v : free_vars(f)) out.insert(v);
  };
  switch (m->kind) {
    case TermKind::Var: break;
    case TermKind::Pair:
    case TermKind::App:
      out = free_fo_vars(m->a);
      for (auto& v : free_fo_vars(m->b)) out.insert(v);
      break;
    case TermKind::Proj: out = free_fo_vars(m->a); break;
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Abort:
      out = free_fo_vars(m->a);
      add_formula(m->ann);
      break;
    case TermKind::Case:
      out = free_fo_vars(m->a);
      for (auto& v : free_fo_vars(m->b)) out.insert(v);
      for (auto& v : free_fo_vars(m->c)) out.insert(v);
      add_formula(m->ann);
      add_formula(m->ann2);
      break;
    case TermKind::Lam:
      out = free_fo_vars(m->a);
      add_formula(m->ann);
      break;
    case TermKind::TLam:
      out = free_fo_vars(m->a);
      out.erase(m->var);
      break;
    case TermKind::TApp:
      out = free_fo_vars(m->a);
      out.insert(m->var);
      break;
    case TermKind::Pack: {
      out = free_fo_vars(m->a);
      auto fv = free_vars(m->ann);
      fv.erase(m->var2);
      for (auto& v : fv) out.insert(v);
      out.insert(m->var);  // the witness
      break;
    }
    case TermKind::Let: {
      std::set<std::string> body = free_fo_vars(m->b);
      for (auto& v : free_vars(m->ann)) body.insert(v);
      body.erase(m->var2);  // X binds in phi and the body
      out = free_fo_vars(m->a);
      for (auto& v : body) out.insert(v);
      break;
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Type checking (Fig. 1, bidirectional)
// --------------------------------------------------------------------------

namespace {

CheckResult mismatch(const std::string& rule, const FormulaPtr& expected, const FormulaPtr& found) {
  return CheckResult::fail(CheckResult::RuleMismatch,
                           rule + ": expected " + print_formula(expected) + ", found " +
                               print_formula(found));
}

bool eigen_ok(const Context& ctx, const std::string& X, const FormulaPtr& goal) {
  if (ctx.free_fo_vars().count(X)) return false;
  if (goal && free_vars(goal).count(X)) return false;
  return true;
}

}  // namespace

std::variant<FormulaPtr, CheckResult> synthesize(const Context& ctx, const TermPtr& m) {
  switch (m->kind) {
    case TermKind::Var: {
      const FormulaPtr* f = ctx.lookup(m->var);
      if (!f)
        return CheckResult::fail(CheckResult::UnboundVariable, "unbound variable " + m->var);
      return *f;
    }
    case TermKind::App: {
      auto head = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(head)) return head;
      FormulaPtr f = std::get<FormulaPtr>(head);
      if (f->kind != Conn::Imp)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(->E): function part has type " + print_formula(f));
      CheckResult arg = type_check(ctx, m->b, f->left);
      if (!arg.ok()) return arg;
      return f->right;
    }
    case TermKind::Proj: {
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return major;
      FormulaPtr f = std::get<FormulaPtr>(major);
      if (f->kind != Conn::And)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(/\\E): projected term has type " + print_formula(f));
      return m->idx == 1 ? f->left : f->right;
    }
    case TermKind::TApp: {
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return major;
      FormulaPtr f = std::get<FormulaPtr>(major);
      if (f->kind != Conn::Forall)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(forall E): applied term has type " + print_formula(f));
      if (substitution_captures(f->left, f->name, m->var))
        return CheckResult::fail(CheckResult::EigenvariableViolation,
                                 "(forall E): variable " + m->var +
                                     " would be captured in " + print_formula(f));
      return substitute(f->left, {{f->name, m->var}});
    }
    case TermKind::Abort: {
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return major;
      FormulaPtr f = std::get<FormulaPtr>(major);
      if (f->kind != Conn::Bottom)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(botE): major premise has type " + print_formula(f));
      return m->ann;
    }
    default:
      return CheckResult::fail(CheckResult::NotSynthesizable,
                               "term is not an eliminator; type cannot be synthesized");
  }
}

CheckResult type_check(const Context& ctx, const TermPtr& m, const FormulaPtr& phi) {
  switch (m->kind) {
    case TermKind::Lam: {
      if (phi->kind != Conn::Imp)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(->I): goal is not an implication: " + print_formula(phi));
      if (!alpha_eq(m->ann, phi->left)) return mismatch("(->I) annotation", phi->left, m->ann);
      return type_check(ctx.extended(m->var, m->ann), m->a, phi->right);
    }
    case TermKind::Pair: {
      if (phi->kind != Conn::And)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(/\\I): goal is not a conjunction: " + print_formula(phi));
      CheckResult l = type_check(ctx, m->a, phi->left);
      if (!l.ok()) return l;
      return type_check(ctx, m->b, phi->right);
    }
    case TermKind::Inl:
    case TermKind::Inr: {
      if (phi->kind != Conn::Or)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(\\/I): goal is not a disjunction: " + print_formula(phi));
      if (!alpha_eq(m->ann, phi)) return mismatch("(\\/I) annotation", phi, m->ann);
      return type_check(ctx, m->a, m->kind == TermKind::Inl ? phi->left : phi->right);
    }
    case TermKind::TLam: {
      if (phi->kind != Conn::Forall)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(forall I): goal is not universal: " + print_formula(phi));
      if (!eigen_ok(ctx, m->var, nullptr) || (m->var != phi->name && free_vars(phi).count(m->var)))
        return CheckResult::fail(CheckResult::EigenvariableViolation,
                                 "(forall I): " + m->var + " occurs free in the context or goal");
      return type_check(ctx, m->a, substitute(phi->left, {{phi->name, m->var}}));
    }
    case TermKind::Pack: {
      if (phi->kind != Conn::Exists)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(exists I): goal is not existential: " + print_formula(phi));
      FormulaPtr annotated = Formula::exists(m->var2, m->ann);
      if (!alpha_eq(annotated, phi)) return mismatch("(exists I) annotation", phi, annotated);
      if (substitution_captures(m->ann, m->var2, m->var))
        return CheckResult::fail(CheckResult::EigenvariableViolation,
                                 "(exists I): witness " + m->var + " would be captured");
      return type_check(ctx, m->a, substitute(m->ann, {{m->var2, m->var}}));
    }
    case TermKind::Case: {
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return std::get<CheckResult>(major);
      FormulaPtr f = std::get<FormulaPtr>(major);
      FormulaPtr annotated = Formula::disj(m->ann, m->ann2);
      if (f->kind != Conn::Or || !alpha_eq(f, annotated))
        return mismatch("(\\/E) major premise", annotated, f);
      CheckResult l = type_check(ctx.extended(m->var, m->ann), m->b, phi);
      if (!l.ok()) return l;
      return type_check(ctx.extended(m->var2, m->ann2), m->c, phi);
    }
    case TermKind::Let: {
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return std::get<CheckResult>(major);
      FormulaPtr f = std::get<FormulaPtr>(major);
      FormulaPtr annotated = Formula::exists(m->var2, m->ann);
      if (f->kind != Conn::Exists || !alpha_eq(f, annotated))
        return mismatch("(exists E) major premise", annotated, f);
      if (!eigen_ok(ctx, m->var2, phi))
        return CheckResult::fail(CheckResult::EigenvariableViolation,
                                 "(exists E): " + m->var2 + " occurs free in the context or goal");
      return type_check(ctx.extended(m->var, m->ann), m->b, phi);
    }
    case TermKind::Abort: {
      if (!alpha_eq(m->ann, phi)) return mismatch("(botE) annotation", phi, m->ann);
      auto major = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(major)) return std::get<CheckResult>(major);
      FormulaPtr f = std::get<FormulaPtr>(major);
      if (f->kind != Conn::Bottom)
        return CheckResult::fail(CheckResult::RuleMismatch,
                                 "(botE): major premise has type " + print_formula(f));
      return CheckResult::accept();
    }
    default: {  // eliminator spine in checking position
      auto syn = synthesize(ctx, m);
      if (std::holds_alternative<CheckResult>(syn)) return std::get<CheckResult>(syn);
      FormulaPtr f = std::get<FormulaPtr>(syn);
      if (!alpha_eq(f, phi)) return mismatch("synthesized type", phi, f);
      return CheckResult::accept();
    }
  }
}

// --------------------------------------------------------------------------
// Normal forms
// --------------------------------------------------------------------------

static bool is_normal(const TermPtr& m) { return classify_nf(m) != NFClass::NotNormal; }

NFClass classify_nf(const TermPtr& m) {
  switch (m->kind) {
    case TermKind::Var: return NFClass::ProperEliminator;
    case TermKind::Lam:
    case TermKind::TLam:
      return is_normal(m->a) ? NFClass::Introduction : NFClass::NotNormal;
    case TermKind::Pair:
      return is_normal(m->a) && is_normal(m->b) ? NFClass::Introduction : NFClass::NotNormal;
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Pack:
      return is_normal(m->a) ? NFClass::Introduction : NFClass::NotNormal;
    case TermKind::App:
      return classify_nf(m->a) == NFClass::ProperEliminator && is_normal(m->b)
                 ? NFClass::ProperEliminator
                 : NFClass::NotNormal;
    case TermKind::Proj:
    case TermKind::TApp:
      return classify_nf(m->a) == NFClass::ProperEliminator ? NFClass::ProperEliminator
                                                            : NFClass::NotNormal;
    case TermKind::Abort:
      return classify_nf(m->a) == NFClass::ProperEliminator ? NFClass::ImproperEliminator
                                                            : NFClass::NotNormal;
    case TermKind::Case:
      return classify_nf(m->a) == NFClass::ProperEliminator && is_normal(m->b) && is_normal(m->c)
                 ? NFClass::ImproperEliminator
                 : NFClass::NotNormal;
    case TermKind::Let:
      return classify_nf(m->a) == NFClass::ProperEliminator && is_normal(m->b)
                 ? NFClass::ImproperEliminator
                 : NFClass::NotNormal;
  }
  return NFClass::NotNormal;
}

namespace {

bool lnf_rec(const Context& ctx, const TermPtr& m, const FormulaPtr& phi);

// A quasi-long proper eliminator: a head-variable spine whose term arguments
// are all long normal forms.
bool quasi_long(const Context& ctx, const TermPtr& m) {
  switch (m->kind) {
    case TermKind::Var: return true;
    case TermKind::Proj:
    case TermKind::TApp: return quasi_long(ctx, m->a);
    case TermKind::App: {
      if (!quasi_long(ctx, m->a)) return false;
      auto head = synthesize(ctx, m->a);
      if (std::holds_alternative<CheckResult>(head)) return false;
      FormulaPtr f = std::get<FormulaPtr>(head);
      if (f->kind != Conn::Imp) return false;
      return lnf_rec(ctx, m->b, f->left);
    }
    default: return false;
  }
}

bool lnf_rec(const Context& ctx, const TermPtr& m, const FormulaPtr& phi) {
  switch (m->kind) {
    case TermKind::Lam:
      return phi->kind == Conn::Imp && lnf_rec(ctx.extended(m->var, m->ann), m->a, phi->right);
    case TermKind::Pair:
      return phi->kind == Conn::And && lnf_rec(ctx, m->a, phi->left) &&
             lnf_rec(ctx, m->b, phi->right);
    case TermKind::Inl:
      return phi->kind == Conn::Or && lnf_rec(ctx, m->a, phi->left);
    case TermKind::Inr:
      return phi->kind == Conn::Or && lnf_rec(ctx, m->a, phi->right);
    case TermKind::TLam:
      return phi->kind == Conn::Forall &&
             lnf_rec(ctx, m->a, substitute(phi->left, {{phi->name, m->var}}));
    case TermKind::Pack:
      return phi->kind == Conn::Exists &&
             lnf_rec(ctx, m->a, substitute(m->ann, {{m->var2, m->var}}));
    case TermKind::Var:
    case TermKind::App:
    case TermKind::Proj:
    case TermKind::TApp: {
      // a spine is a complete lnf only at pseudo-atom or bottom type
      if (!(is_pseudo_atom(phi) || phi->kind == Conn::Bottom)) return false;
      return quasi_long(ctx, m);
    }
    case TermKind::Case:
      return quasi_long(ctx, m->a) && lnf_rec(ctx.extended(m->var, m->ann), m->b, phi) &&
             lnf_rec(ctx.extended(m->var2, m->ann2), m->c, phi);
    case TermKind::Let:
      return quasi_long(ctx, m->a) && lnf_rec(ctx.extended(m->var, m->ann), m->b, phi);
    case TermKind::Abort:
      return quasi_long(ctx, m->a);
  }
  return false;
}

}  // namespace

bool is_lnf(const Context& ctx, const TermPtr& m, const FormulaPtr& phi) {
  CheckResult r = type_check(ctx, m, phi);
  if (!r.ok()) throw std::invalid_argument("is_lnf precondition: ill-typed term: " + r.detail);
  return lnf_rec(ctx, m, phi);
}

// --------------------------------------------------------------------------
// Eta-expansion to long normal form
// --------------------------------------------------------------------------

namespace {

struct EtaNames {
  std::set<std::string> used_proof, used_fo;

  std::string fresh_proof() {
    for (int k = 1;; k++) {
      std::string c = "e" + std::to_string(k);
      if (used_proof.insert(c).second) return c;
    }
  }
  std::string fresh_fo() {
    for (int k = 1;; k++) {
      std::string c = "Y" + std::to_string(k);
      if (used_fo.insert(c).second) return c;
    }
  }
};

void collect_names(const TermPtr& m, EtaNames& names) {
  if (!m) return;
  if (!m->var.empty())
    (m->kind == TermKind::TLam || m->kind == TermKind::TApp || m->kind == TermKind::Pack
         ? names.used_fo
         : names.used_proof)
        .insert(m->var);
  if (!m->var2.empty()) {
    if (m->kind == TermKind::Case)
      names.used_proof.insert(m->var2);
    else
      names.used_fo.insert(m->var2);
  }
  for (auto& ann : {m->ann, m->ann2})
    if (ann)
      for (auto& v : free_vars(ann)) names.used_fo.insert(v);
  collect_names(m->a, names);
  collect_names(m->b, names);
  collect_names(m->c, names);
}

TermPtr eta_rec(const Context& ctx, const TermPtr& m, const FormulaPtr& phi, EtaNames& names);

TermPtr eta_spine(const Context& ctx, const TermPtr& m, EtaNames& names) {
  switch (m->kind) {
    case TermKind::Var: return m;
    case TermKind::Proj: return ProofTerm::proj(m->idx, eta_spine(ctx, m->a, names));
    case TermKind::TApp: return ProofTerm::tapp(eta_spine(ctx, m->a, names), m->var);
    case TermKind::App: {
      auto head = synthesize(ctx, m->a);
      FormulaPtr f = std::get<FormulaPtr>(head);
      return ProofTerm::app(eta_spine(ctx, m->a, names), eta_rec(ctx, m->b, f->left, names));
    }
    default: throw std::logic_error("eta_spine: not an eliminator spine");
  }
}

TermPtr eta_rec(const Context& ctx, const TermPtr& m, const FormulaPtr& phi, EtaNames& names) {
  switch (m->kind) {
    case TermKind::Lam:
      return ProofTerm::lam(m->var, m->ann,
                            eta_rec(ctx.extended(m->var, m->ann), m->a, phi->right, names));
    case TermKind::Pair:
      return ProofTerm::pair(eta_rec(ctx, m->a, phi->left, names),
                             eta_rec(ctx, m->b, phi->right, names));
    case TermKind::Inl:
      return ProofTerm::inl(m->ann, eta_rec(ctx, m->a, phi->left, names));
    case TermKind::Inr:
      return ProofTerm::inr(m->ann, eta_rec(ctx, m->a, phi->right, names));
    case TermKind::TLam:
      return ProofTerm::tlam(
          m->var, eta_rec(ctx, m->a, substitute(phi->left, {{phi->name, m->var}}), names));
    case TermKind::Pack:
      return ProofTerm::pack(
          eta_rec(ctx, m->a, substitute(m->ann, {{m->var2, m->var}}), names), m->var, m->var2,
          m->ann);
    case TermKind::Case:
      return ProofTerm::case_of(eta_spine(ctx, m->a, names), m->var, m->ann,
                                eta_rec(ctx.extended(m->var, m->ann), m->b, phi, names), m->var2,
                                m->ann2,
                                eta_rec(ctx.extended(m->var2, m->ann2), m->c, phi, names));
    case TermKind::Let:
      return ProofTerm::let_in(m->var, m->ann, eta_spine(ctx, m->a, names), m->var2,
                               eta_rec(ctx.extended(m->var, m->ann), m->b, phi, names));
    case TermKind::Abort:
      return ProofTerm::abort(m->ann, eta_spine(ctx, m->a, names));
    default: {  // eliminator spine: expand until the type is pseudo-atomic
      if (is_pseudo_atom(phi) || phi->kind == Conn::Bottom) return eta_spine(ctx, m, names);
      switch (phi->kind) {
        case Conn::Imp: {
          std::string x = names.fresh_proof();
          return ProofTerm::lam(
              x, phi->left,
              eta_rec(ctx.extended(x, phi->left), ProofTerm::app(m, ProofTerm::mkvar(x)),
                      phi->right, names));
        }
        case Conn::And:
          return ProofTerm::pair(eta_rec(ctx, ProofTerm::proj(1, m), phi->left, names),
                                 eta_rec(ctx, ProofTerm::proj(2, m), phi->right, names));
        case Conn::Forall: {
          std::string X = names.fresh_fo();
          return ProofTerm::tlam(
              X, eta_rec(ctx, ProofTerm::tapp(m, X), substitute(phi->left, {{phi->name, X}}),
                         names));
        }
        default: throw std::logic_error("eta_rec: unexpected goal shape");
      }
    }
  }
}

}  // namespace

TermPtr eta_expand(const Context& ctx, const TermPtr& m, const FormulaPtr& phi) {
  CheckResult r = type_check(ctx, m, phi);
  if (!r.ok())
    throw std::invalid_argument("eta_expand precondition: ill-typed term: " + r.detail);
  EtaNames names;
  collect_names(m, names);
  for (auto& [x, f] : ctx.items) {
    names.used_proof.insert(x);
    for (auto& v : free_vars(f)) names.used_fo.insert(v);
  }
  for (auto& v : free_vars(phi)) names.used_fo.insert(v);
  return eta_rec(ctx, m, phi, names);
}

// --------------------------------------------------------------------------
// Alpha equivalence of terms (proof variables and first-order binders)
// --------------------------------------------------------------------------

namespace {

struct AlphaEnv {
  std::map<std::string, int> pa, pb;  // proof variables
  std::map<std::string, int> fa, fb;  // first-order variables
  int depth = 0;
};

FormulaPtr canon_formula(const FormulaPtr& f, const std::map<std::string, int>& env) {
  std::map<std::string, std::string> sub;
  for (auto& v : free_vars(f)) {
    auto it = env.find(v);
    if (it != env.end()) sub[v] = "#" + std::to_string(it->second);
  }
  return substitute(f, sub);
}

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b, const AlphaEnv& e) {
  if (!a || !b) return !a && !b;
  return alpha_eq(canon_formula(a, e.fa), canon_formula(b, e.fb));
}

bool fo_var_eq(const std::string& a, const std::string& b, const AlphaEnv& e) {
  auto ia = e.fa.find(a);
  auto ib = e.fb.find(b);
  if ((ia == e.fa.end()) != (ib == e.fb.end())) return false;
  if (ia != e.fa.end()) return ia->second == ib->second;
  return a == b;
}

template <typename F>
bool with_pvar(AlphaEnv& e, const std::string& a, const std::string& b, F f) {
  auto sa = e.pa.count(a) ? std::optional<int>(e.pa[a]) : std::nullopt;
  auto sb = e.pb.count(b) ? std::optional<int>(e.pb[b]) : std::nullopt;
  e.pa[a] = e.depth;
  e.pb[b] = e.depth;
  e.depth++;
  bool ok = f();
  e.depth--;
  if (sa) e.pa[a] = *sa; else e.pa.erase(a);
  if (sb) e.pb[b] = *sb; else e.pb.erase(b);
  return ok;
}

template <typename F>
bool with_fvar(AlphaEnv& e, const std::string& a, const std::string& b, F f) {
  auto sa = e.fa.count(a) ? std::optional<int>(e.fa[a]) : std::nullopt;
  auto sb = e.fb.count(b) ? std::optional<int>(e.fb[b]) : std::nullopt;
  e.fa[a] = e.depth;
  e.fb[b] = e.depth;
  e.depth++;
  bool ok = f();
  e.depth--;
  if (sa) e.fa[a] = *sa; else e.fa.erase(a);
  if (sb) e.fb[b] = *sb; else e.fb.erase(b);
  return ok;
}

bool term_alpha_rec(const TermPtr& a, const TermPtr& b, AlphaEnv& e) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var: {
      auto ia = e.pa.find(a->var);
      auto ib = e.pb.find(b->var);
      if ((ia == e.pa.end()) != (ib == e.pb.end())) return false;
      if (ia != e.pa.end()) return ia->second == ib->second;
      return a->var == b->var;
    }
    case TermKind::Pair:
    case TermKind::App:
      return term_alpha_rec(a->a, b->a, e) && term_alpha_rec(a->b, b->b, e);
    case TermKind::Proj:
      return a->idx == b->idx && term_alpha_rec(a->a, b->a, e);
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Abort:
      return formula_eq(a->ann, b->ann, e) && term_alpha_rec(a->a, b->a, e);
    case TermKind::Lam:
      return formula_eq(a->ann, b->ann, e) &&
             with_pvar(e, a->var, b->var, [&] { return term_alpha_rec(a->a, b->a, e); });
    case TermKind::TLam:
      return with_fvar(e, a->var, b->var, [&] { return term_alpha_rec(a->a, b->a, e); });
    case TermKind::TApp:
      return fo_var_eq(a->var, b->var, e) && term_alpha_rec(a->a, b->a, e);
    case TermKind::Pack: {
      if (!fo_var_eq(a->var, b->var, e)) return false;
      bool ann_ok = with_fvar(e, a->var2, b->var2, [&] { return formula_eq(a->ann, b->ann, e); });
      return ann_ok && term_alpha_rec(a->a, b->a, e);
    }
    case TermKind::Case: {
      if (!term_alpha_rec(a->a, b->a, e)) return false;
      if (!formula_eq(a->ann, b->ann, e) || !formula_eq(a->ann2, b->ann2, e)) return false;
      return with_pvar(e, a->var, b->var, [&] { return term_alpha_rec(a->b, b->b, e); }) &&
             with_pvar(e, a->var2, b->var2, [&] { return term_alpha_rec(a->c, b->c, e); });
    }
    case TermKind::Let: {
      if (!term_alpha_rec(a->a, b->a, e)) return false;
      return with_fvar(e, a->var2, b->var2, [&] {
        return formula_eq(a->ann, b->ann, e) &&
               with_pvar(e, a->var, b->var, [&] { return term_alpha_rec(a->b, b->b, e); });
      });
    }
  }
  return false;
}

}  // namespace

bool term_alpha_eq(const TermPtr& a, const TermPtr& b) {
  AlphaEnv e;
  return term_alpha_rec(a, b, e);
}

// --------------------------------------------------------------------------
// Parsing
// --------------------------------------------------------------------------

namespace {

const std::set<std::string> kTermKeywords = {"case", "of",  "let",    "in", "pack", "to",
                                             "p1",   "p2",  "inl",    "inr", "abort"};

struct TermParser {
  const std::string& s;
  size_t pos = 0;
  Signature& sig;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  bool peek_sym(const std::string& sym) {
    skip_ws();
    return s.compare(pos, sym.size(), sym) == 0;
  }
  bool eat_sym(const std::string& sym) {
    if (!peek_sym(sym)) return false;
    pos += sym.size();
    return true;
  }
  void expect_sym(const std::string& sym) {
    if (!eat_sym(sym)) throw ParseError("expected '" + sym + "'", pos);
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::optional<std::string> peek_ident() {
    skip_ws();
    if (pos >= s.size() || !ident_start(s[pos])) return std::nullopt;
    size_t e = pos;
    while (e < s.size() && ident_char(s[e])) e++;
    return s.substr(pos, e - pos);
  }
  bool eat_keyword(const std::string& kw) {
    auto id = peek_ident();
    if (!id || *id != kw) return false;
    pos += kw.size();
    return true;
  }
  void expect_keyword(const std::string& kw) {
    if (!eat_keyword(kw)) throw ParseError("expected '" + kw + "'", pos);
  }
  std::string expect_var(const char* what) {
    auto id = peek_ident();
    if (!id || kTermKeywords.count(*id))
      throw ParseError(std::string("expected ") + what, pos);
    pos += id->size();
    return *id;
  }
  FormulaPtr formula() { return parse_formula_prefix(s, pos, sig); }
  FormulaPtr bracketed_formula() {
    expect_sym("[");
    FormulaPtr f = formula();
    expect_sym("]");
    return f;
  }

  TermPtr term() {
    skip_ws();
    if (eat_sym("\\\\")) {
      std::string X = expect_var("variable");
      expect_sym(".");
      return ProofTerm::tlam(X, term());
    }
    if (eat_sym("\\")) {
      std::string x = expect_var("variable");
      expect_sym(":");
      FormulaPtr phi = formula();
      expect_sym(".");
      return ProofTerm::lam(x, phi, term());
    }
    if (eat_keyword("case")) {
      TermPtr major = term();
      expect_keyword("of");
      expect_sym("{");
      std::string x = expect_var("variable");
      expect_sym(":");
      FormulaPtr phi1 = formula();
      expect_sym("=>");
      TermPtr n1 = term();
      expect_sym("|");
      std::string y = expect_var("variable");
      expect_sym(":");
      FormulaPtr phi2 = formula();
      expect_sym("=>");
      TermPtr n2 = term();
      expect_sym("}");
      return ProofTerm::case_of(major, x, phi1, n1, y, phi2, n2);
    }
    if (eat_keyword("let")) {
      expect_sym("[");
      std::string X = expect_var("variable");
      expect_sym(",");
      std::string x = expect_var("variable");
      expect_sym(":");
      FormulaPtr phi = formula();
      expect_sym("]");
      expect_sym("=");
      TermPtr m1 = term();
      expect_keyword("in");
      return ProofTerm::let_in(x, phi, m1, X, term());
    }
    if (eat_keyword("pack")) {
      TermPtr m = appterm();
      expect_sym(",");
      std::string Y = expect_var("variable");
      expect_keyword("to");
      std::string X = expect_var("variable");
      expect_sym(".");
      return ProofTerm::pack(m, Y, X, formula());
    }
    return appterm();
  }

  TermPtr appterm() {
    TermPtr t = prefixterm();
    for (;;) {
      if (eat_sym("@")) {
        t = ProofTerm::tapp(t, expect_var("variable"));
        continue;
      }
      skip_ws();
      if (peek_sym("(") || peek_sym("<")) {
        t = ProofTerm::app(t, atomterm());
        continue;
      }
      auto id = peek_ident();
      if (id && !kTermKeywords.count(*id)) {
        t = ProofTerm::app(t, atomterm());
        continue;
      }
      return t;
    }
  }

  TermPtr prefixterm() {
    if (eat_keyword("p1")) return ProofTerm::proj(1, prefixterm());
    if (eat_keyword("p2")) return ProofTerm::proj(2, prefixterm());
    if (eat_keyword("inl")) {
      FormulaPtr d = bracketed_formula();
      return ProofTerm::inl(d, prefixterm());
    }
    if (eat_keyword("inr")) {
      FormulaPtr d = bracketed_formula();
      return ProofTerm::inr(d, prefixterm());
    }
    if (eat_keyword("abort")) {
      FormulaPtr phi = bracketed_formula();
      return ProofTerm::abort(phi, prefixterm());
    }
    return atomterm();
  }

  TermPtr atomterm() {
    if (eat_sym("(")) {
      TermPtr t = term();
      expect_sym(")");
      return t;
    }
    if (eat_sym("<")) {
      TermPtr a = term();
      expect_sym(",");
      TermPtr b = term();
      expect_sym(">");
      return ProofTerm::pair(a, b);
    }
    auto id = peek_ident();
    if (!id || kTermKeywords.count(*id)) throw ParseError("expected term", pos);
    pos += id->size();
    return ProofTerm::mkvar(*id);
  }
};

}  // namespace

TermPtr parse_term(const std::string& text, Signature& sig) {
  TermParser p{text, 0, sig};
  TermPtr t = p.term();
  if (!p.eof()) throw ParseError("unexpected trailing input", p.pos);
  return t;
}

TermPtr parse_term(const std::string& text) {
  Signature sig;
  return parse_term(text, sig);
}

// --------------------------------------------------------------------------
// Printing
// --------------------------------------------------------------------------

namespace {

// 0 = term, 1 = application head / major premise, 2 = prefix-operator operand,
// 3 = application argument
void print_rec(std::ostream& os, const TermPtr& m, int level) {
  bool parens = false;
  switch (m->kind) {
    case TermKind::Lam:
    case TermKind::TLam:
    case TermKind::Case:
    case TermKind::Let:
    case TermKind::Pack: parens = level >= 1; break;
    case TermKind::App:
    case TermKind::TApp: parens = level >= 2; break;
    case TermKind::Inl:
    case TermKind::Inr:
    case TermKind::Abort:
    case TermKind::Proj: parens = level >= 3; break;
    default: break;
  }
  if (parens) os << "(";
  switch (m->kind) {
    case TermKind::Var: os << m->var; break;
    case TermKind::Pair:
      os << "<";
      print_rec(os, m->a, 0);
      os << ", ";
      print_rec(os, m->b, 0);
      os << ">";
      break;
    case TermKind::Proj:
      os << (m->idx == 1 ? "p1 " : "p2 ");
      print_rec(os, m->a, 2);
      break;
    case TermKind::Inl:
    case TermKind::Inr:
      os << (m->kind == TermKind::Inl ? "inl[" : "inr[") << print_formula(m->ann) << "] ";
      print_rec(os, m->a, 2);
      break;
    case TermKind::Case:
      os << "case ";
      print_rec(os, m->a, 1);
      os << " of {" << m->var << ":" << print_formula(m->ann) << " => ";
      print_rec(os, m->b, 0);
      os << " | " << m->var2 << ":" << print_formula(m->ann2) << " => ";
      print_rec(os, m->c, 0);
      os << "}";
      break;
    case TermKind::Lam:
      os << "\\" << m->var << ":" << print_formula(m->ann) << ". ";
      print_rec(os, m->a, 0);
      break;
    case TermKind::App:
      print_rec(os, m->a, 1);
      os << " ";
      print_rec(os, m->b, 3);
      break;
    case TermKind::TLam:
      os << "\\\\" << m->var << ". ";
      print_rec(os, m->a, 0);
      break;
    case TermKind::TApp:
      print_rec(os, m->a, 1);
      os << " @" << m->var;
      break;
    case TermKind::Pack:
      os << "pack ";
      print_rec(os, m->a, 1);
      os << ", " << m->var << " to " << m->var2 << ". " << print_formula(m->ann);
      break;
    case TermKind::Let:
      os << "let [" << m->var2 << ", " << m->var << ":" << print_formula(m->ann) << "] = ";
      print_rec(os, m->a, 1);
      os << " in ";
      print_rec(os, m->b, 0);
      break;
    case TermKind::Abort:
      os << "abort[" << print_formula(m->ann) << "] ";
      print_rec(os, m->a, 2);
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string print_term(const TermPtr& m) {
  std::ostringstream os;
  print_rec(os, m, 0);
  return os.str();
}

}  // namespace arcadian
