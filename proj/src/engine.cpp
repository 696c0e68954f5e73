#include "arcadian/engine.hpp"

#include <stdexcept>

namespace arcadian {

namespace {

const RunEdge& edge_by_pattern(const Automaton& aut, const RunPtr& node, int pattern) {
  for (auto& e : node->edges)
    if (aut.instructions.at(e.instruction).pattern == pattern) return e;
  throw std::logic_error("run node lacks an edge for pattern " + std::to_string(pattern));
}

FormulaPtr stored_formula(const FormulaTree& t, const ID& id, const std::string& label) {
  for (auto& e : id.store)
    if (e.label == label) return instantiate(t, e.node, e.v);
  throw std::logic_error("no store entry labelled " + label);
}

TermPtr extract_rec(const Automaton& aut, const RunPtr& node) {
  const FormulaTree& t = aut.tree;
  const ID& id = node->id;
  const StateInfo& st = aut.state(id.state);

  if (st.universal) {
    // structural introduction at the node's connective
    if (node->edges.empty())
      throw std::logic_error("extraction reached a bare accepting node");
    const Instruction& first = aut.instructions.at(node->edges.front().instruction);
    switch (first.pattern) {
      case 1: {  // implication: assume the premise
        const RunEdge& e = node->edges.front();
        FormulaPtr ann = stored_formula(t, e.child->id, e.choice.label);
        return ProofTerm::lam(e.choice.label, ann, extract_rec(aut, e.child));
      }
      case 2: {  // conjunction: one edge per conjunct
        const NodeId& left = t.at(id.node).children.at(0);
        const RunEdge* el = nullptr;
        const RunEdge* er = nullptr;
        for (auto& e : node->edges)
          (aut.instructions.at(e.instruction).a == left ? el : er) = &e;
        if (!el || !er) throw std::logic_error("ill-formed conjunction node");
        return ProofTerm::pair(extract_rec(aut, el->child), extract_rec(aut, er->child));
      }
      case 4: {  // universal: fresh eigenvariable
        const RunEdge& e = node->edges.front();
        return ProofTerm::tlam(e.choice.eigen, extract_rec(aut, e.child));
      }
      case 5: {  // existential: chosen witness
        const RunEdge& e = node->edges.front();
        FormulaPtr g = instantiate(t, id.node, id.w);
        return ProofTerm::pack(extract_rec(aut, e.child), e.choice.witness, g->name, g->left);
      }
      default:
        throw std::logic_error("unexpected universal pattern " + std::to_string(first.pattern));
    }
  }

  if (node->edges.size() != 1)
    throw std::logic_error("existential node must have exactly one edge");
  const RunEdge& e = node->edges.front();
  const Instruction& ins = aut.instructions.at(e.instruction);
  switch (ins.pattern) {
    case 13:  // axiom: use the matching assumption
      return ProofTerm::mkvar(e.choice.label);
    case 3: {  // disjunction introduction
      FormulaPtr g = instantiate(t, id.node, id.w);
      bool left = ins.a == t.at(id.node).children.at(0);
      TermPtr sub = extract_rec(aut, e.child);
      return left ? ProofTerm::inl(g, sub) : ProofTerm::inr(g, sub);
    }
    case 6:  // hand over to the structural introduction
      return extract_rec(aut, e.child);
    case 7:  // conjunction elimination
      return ProofTerm::proj(ins.proj_index, extract_rec(aut, e.child));
    case 10:  // universal elimination
      return ProofTerm::tapp(extract_rec(aut, e.child), e.choice.witness);
    case 9: {  // implication elimination
      const RunEdge& ef = edge_by_pattern(aut, e.child, 17);
      const RunEdge& ea = edge_by_pattern(aut, e.child, 18);
      return ProofTerm::app(extract_rec(aut, ef.child), extract_rec(aut, ea.child));
    }
    case 8: {  // disjunction elimination
      const RunEdge& em = edge_by_pattern(aut, e.child, 14);
      const RunEdge& e1 = edge_by_pattern(aut, e.child, 15);
      const RunEdge& e2 = edge_by_pattern(aut, e.child, 16);
      FormulaPtr a1 = stored_formula(t, e1.child->id, e1.choice.label);
      FormulaPtr a2 = stored_formula(t, e2.child->id, e2.choice.label);
      return ProofTerm::case_of(extract_rec(aut, em.child), e1.choice.label, a1,
                                extract_rec(aut, e1.child), e2.choice.label, a2,
                                extract_rec(aut, e2.child));
    }
    case 11: {  // existential elimination
      const RunEdge& em = edge_by_pattern(aut, e.child, 19);
      const RunEdge& eo = edge_by_pattern(aut, e.child, 20);
      FormulaPtr phi = stored_formula(t, eo.child->id, eo.choice.label);
      return ProofTerm::let_in(eo.choice.label, phi, extract_rec(aut, em.child),
                               eo.choice.eigen, extract_rec(aut, eo.child));
    }
    case 12: {  // falsity elimination
      const RunEdge& eb = edge_by_pattern(aut, e.child, 21);
      FormulaPtr g = instantiate(t, id.node, id.w);
      return ProofTerm::abort(g, extract_rec(aut, eb.child));
    }
    default:
      throw std::logic_error("unexpected existential pattern " + std::to_string(ins.pattern));
  }
}

bool emergence_rec(const Automaton& aut, const RunPtr& node) {
  const FormulaTree& t = aut.tree;
  FormulaPtr goal = instantiate(t, node->id.node, node->id.w);
  if (emerged_from(goal, t).empty()) return false;
  for (auto& e : node->id.store)
    if (emerged_from(instantiate(t, e.node, e.v), t).empty()) return false;
  for (auto& e : node->edges)
    if (!emergence_rec(aut, e.child)) return false;
  return true;
}

}  // namespace

TermPtr extract(const Automaton& aut, const RunPtr& run) {
  if (!run) throw std::invalid_argument("extract: null run");
  return extract_rec(aut, run);
}

bool verify(const FormulaPtr& phi, const TermPtr& m) {
  return type_check(Context{}, m, phi).ok();
}

bool check_emergence(const Automaton& aut, const RunPtr& run) {
  if (!run) return false;
  return emergence_rec(aut, run);
}

ProveResult prove(const Automaton& aut, const Budget& budget) {
  ProveResult res;
  FormulaPtr goal = aut.tree.root;
  for (int d = 1; d <= budget.max_depth; d++) {
    AcceptResult ar = accepts(aut, initial_id(aut), {d, budget.max_eigen});
    res.stats.expanded += ar.stats.expanded;
    res.stats.memo_hits += ar.stats.memo_hits;
    res.stats.loop_cuts += ar.stats.loop_cuts;
    if (ar.run) {
      res.outcome = ProveOutcome::Proved;
      res.run = ar.run;
      res.depth_used = d;
      res.raw_term = extract(aut, ar.run);
      if (!verify(goal, res.raw_term))
        throw std::logic_error("extracted term failed verification: " +
                               print_term(res.raw_term));
      res.term = eta_expand(Context{}, res.raw_term, goal);
      if (!verify(goal, res.term) || !is_lnf(Context{}, res.term, goal))
        throw std::logic_error("eta-expanded term is not a verified long normal form: " +
                               print_term(res.term));
      return res;
    }
    if (ar.exhausted) {
      res.outcome = ProveOutcome::Exhausted;
      res.depth_used = d;
      return res;
    }
  }
  res.outcome = ProveOutcome::NotFoundWithinFuel;
  res.depth_used = budget.max_depth;
  return res;
}

}  // namespace arcadian
