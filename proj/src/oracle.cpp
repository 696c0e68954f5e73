#include "arcadian/oracle.hpp"

#include <vector>

namespace arcadian {

namespace {

void require_prop(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
      if (!f->args.empty()) throw NotPropositional("atom with arguments: " + print_formula(f));
      return;
    case Conn::Bottom: return;
    case Conn::Forall:
    case Conn::Exists: throw NotPropositional("quantifier: " + print_formula(f));
    default:
      require_prop(f->left);
      require_prop(f->right);
  }
}

bool feq(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Conn::Atom: return a->name == b->name;
    case Conn::Bottom: return true;
    default: return feq(a->left, b->left) && feq(a->right, b->right);
  }
}

using Ctx = std::vector<FormulaPtr>;

Ctx without(const Ctx& g, size_t i) {
  Ctx out = g;
  out.erase(out.begin() + static_cast<long>(i));
  return out;
}

// Contraction-free goal-directed search (invertible rules first, then the
// disjunction split on the right and the four-way implication split on the
// left); depth strictly decreases on a multiset ordering, so it terminates.
bool ljt(Ctx g, FormulaPtr goal) {
  // right-invertible rules
  while (true) {
    if (goal->kind == Conn::Imp) {
      g.push_back(goal->left);
      goal = goal->right;
      continue;
    }
    if (goal->kind == Conn::And)
      return ljt(g, goal->left) && ljt(g, goal->right);
    break;
  }
  // left-invertible rules, applied to saturation
  for (size_t i = 0; i < g.size(); i++) {
    const FormulaPtr& f = g[i];
    switch (f->kind) {
      case Conn::Bottom: return true;
      case Conn::Atom:
        if (goal->kind == Conn::Atom && feq(f, goal)) return true;
        break;
      case Conn::And: {
        Ctx h = without(g, i);
        h.push_back(f->left);
        h.push_back(f->right);
        return ljt(std::move(h), goal);
      }
      case Conn::Or: {
        Ctx h = without(g, i);
        Ctx h2 = h;
        h.push_back(f->left);
        h2.push_back(f->right);
        return ljt(std::move(h), goal) && ljt(std::move(h2), goal);
      }
      case Conn::Imp: {
        const FormulaPtr& c = f->left;
        if (c->kind == Conn::Bottom)
          return ljt(without(g, i), goal);
        if (c->kind == Conn::And) {
          Ctx h = without(g, i);
          h.push_back(Formula::imp(c->left, Formula::imp(c->right, f->right)));
          return ljt(std::move(h), goal);
        }
        if (c->kind == Conn::Or) {
          Ctx h = without(g, i);
          h.push_back(Formula::imp(c->left, f->right));
          h.push_back(Formula::imp(c->right, f->right));
          return ljt(std::move(h), goal);
        }
        if (c->kind == Conn::Atom) {
          bool present = false;
          for (auto& o : g)
            if (o->kind == Conn::Atom && feq(o, c)) present = true;
          if (present) {
            Ctx h = without(g, i);
            h.push_back(f->right);
            return ljt(std::move(h), goal);
          }
        }
        break;  // implication-antecedent implications are non-invertible
      }
      default: break;
    }
  }
  // non-invertible choices
  if (goal->kind == Conn::Or) {
    if (ljt(g, goal->left) || ljt(g, goal->right)) return true;
  }
  for (size_t i = 0; i < g.size(); i++) {
    const FormulaPtr& f = g[i];
    if (f->kind != Conn::Imp || f->left->kind != Conn::Imp) continue;
    const FormulaPtr& c = f->left->left;
    const FormulaPtr& d = f->left->right;
    Ctx h1 = without(g, i);
    h1.push_back(Formula::imp(d, f->right));
    Ctx h2 = without(g, i);
    h2.push_back(f->right);
    if (ljt(std::move(h1), Formula::imp(c, d)) && ljt(std::move(h2), goal)) return true;
  }
  return false;
}

}  // namespace

bool decide_prop(const FormulaPtr& phi) {
  require_prop(phi);
  return ljt({}, phi);
}

}  // namespace arcadian
