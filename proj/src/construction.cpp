#include "arcadian/construction.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace arcadian {

namespace {

// Flavors of universal elimination states, indexed by the eliminated node so
// that each state carries exactly its correlated instruction group.
enum class Flavor { Exist, Head, Univ, OrElim, ImpElim, ExElim, BotElim, Axiom };

struct StateKey {
  Flavor flavor;
  NodeId node;
  NodeId elim;

  bool operator<(const StateKey& o) const {
    return std::tie(flavor, node, elim) < std::tie(o.flavor, o.node, o.elim);
  }
};

std::string state_display(const StateKey& k) {
  switch (k.flavor) {
    case Flavor::Exist: return "qE@" + node_name(k.node);
    case Flavor::Head: return "qH@" + node_name(k.node);
    case Flavor::Univ: return "qA@" + node_name(k.node);
    case Flavor::OrElim: return "qA@" + node_name(k.node) + ",or:" + node_name(k.elim);
    case Flavor::ImpElim: return "qA@" + node_name(k.node) + ",imp:" + node_name(k.elim);
    case Flavor::ExElim: return "qA@" + node_name(k.node) + ",ex:" + node_name(k.elim);
    case Flavor::BotElim: return "qA@" + node_name(k.node) + ",bot";
    case Flavor::Axiom: return "qA@axiom";
  }
  return "?";
}

struct Builder {
  Automaton aut;
  std::map<StateKey, int> ids;

  int state(const StateKey& k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    int q = static_cast<int>(aut.states.size());
      bool universal = k.flavor != Flavor::Exist && k.flavor != Flavor::Head;
    aut.states.push_back({state_display(k), universal, k.node, {}});
    ids.emplace(k, q);
    return q;
  }

  void add(Instruction ins) {
    int idx = static_cast<int>(aut.instructions.size());
    aut.states[ins.state].available.push_back(idx);
    aut.instructions.push_back(std::move(ins));
  }

  Instruction make(Op op, int pattern, int q, int target, NodeId a, NodeId b = {}) {
    Instruction ins;
    ins.op = op;
    ins.pattern = pattern;
    ins.state = q;
    ins.target = target;
    ins.a = std::move(a);
    ins.b = std::move(b);
    return ins;
  }
};

NodeId child(const FormulaTree& t, const NodeId& n, int i) { return t.at(n).children.at(i); }

}  // namespace

Automaton build_automaton(const FormulaPtr& formula) {
  Builder b;
  b.aut.tree = index_formula(formula);
  const FormulaTree& t = b.aut.tree;

  std::vector<NodeId> nodes;
  std::vector<NodeId> and_nodes, or_nodes, imp_nodes, forall_nodes, exists_nodes;
  for (auto& [id, nd] : t.nodes) {
    nodes.push_back(id);
    switch (nd.kind) {
      case Conn::And: and_nodes.push_back(id); break;
      case Conn::Or: or_nodes.push_back(id); break;
      case Conn::Imp: imp_nodes.push_back(id); break;
      case Conn::Forall: forall_nodes.push_back(id); break;
      case Conn::Exists: exists_nodes.push_back(id); break;
      default: break;
    }
  }

  int axiom = b.state({Flavor::Axiom, {}, {}});

  // structural decomposition at universal states
  for (auto& m : imp_nodes) {
    int q = b.state({Flavor::Univ, m, {}});
    b.add(b.make(Op::Store, 1, q, b.state({Flavor::Exist, child(t, m, 1), {}}), child(t, m, 0),
                 child(t, m, 1)));
  }
  for (auto& m : and_nodes) {
    int q = b.state({Flavor::Univ, m, {}});
    for (int i = 0; i < 2; i++)
      b.add(b.make(Op::Jmp, 2, q, b.state({Flavor::Exist, child(t, m, i), {}}), child(t, m, i)));
  }
  for (auto& m : forall_nodes) {
    int q = b.state({Flavor::Univ, m, {}});
    b.add(b.make(Op::New, 4, q, b.state({Flavor::Exist, child(t, m, 0), {}}), child(t, m, 0)));
  }
  for (auto& m : exists_nodes) {
    int q = b.state({Flavor::Univ, m, {}});
    b.add(b.make(Op::InstR, 5, q, b.state({Flavor::Exist, child(t, m, 0), {}}), child(t, m, 0)));
  }

  // Each node gets two existential states: the general state qE and the
  // spine state qH entered in eliminator-major position.  The spine state
  // only offers the proper-eliminator patterns (13, 7, 9, 10), so extracted
  // case/let/abort majors and application heads always synthesize; this is
  // the run-side image of the long-normal-form restriction that the major
  // premise of an elimination is an eliminator spine.
  for (bool head : {false, true}) {
    Flavor fl = head ? Flavor::Head : Flavor::Exist;
    for (auto& m : nodes) {
      int q = b.state({fl, m, {}});
      Conn kind = t.at(m).kind;

      b.add(b.make(Op::Check, 13, q, axiom, m, m));

      if (!head) {
        if (kind == Conn::Or) {
          for (int i = 0; i < 2; i++)
            b.add(b.make(Op::Jmp, 3, q, b.state({Flavor::Exist, child(t, m, i), {}}),
                         child(t, m, i)));
        } else if (kind == Conn::Imp || kind == Conn::And || kind == Conn::Forall ||
                   kind == Conn::Exists) {
          b.add(b.make(Op::Jmp, 6, q, b.state({Flavor::Univ, m, {}}), m));
        }
      }

      for (auto& d : and_nodes) {
        for (int i = 0; i < 2; i++) {
          if (!nodes_compatible(t, m, child(t, d, i))) continue;
          Instruction ins = b.make(Op::Jmp, 7, q, b.state({Flavor::Head, d, {}}), d);
          ins.guard = GuardSpec{child(t, d, i), d};
          ins.proj_index = i + 1;
          b.add(std::move(ins));
        }
      }
      for (auto& d : imp_nodes) {
        if (!nodes_compatible(t, m, child(t, d, 1))) continue;
        Instruction ins = b.make(Op::Jmp, 9, q, b.state({Flavor::ImpElim, m, d}), m);
        ins.guard = GuardSpec{child(t, d, 1), d};
        ins.elim = d;
        b.add(std::move(ins));
      }
      for (auto& d : forall_nodes) {
        if (!nodes_compatible(t, m, child(t, d, 0))) continue;
        Instruction ins = b.make(Op::Jmp, 10, q, b.state({Flavor::Head, d, {}}), d);
        ins.guard = GuardSpec{child(t, d, 0), d};
        b.add(std::move(ins));
      }
      if (!head) {
        for (auto& d : or_nodes) {
          Instruction ins = b.make(Op::Load, 8, q, b.state({Flavor::OrElim, m, d}), m);
          ins.elim = d;
          b.add(std::move(ins));
        }
        for (auto& e : exists_nodes) {
          Instruction ins = b.make(Op::Load, 11, q, b.state({Flavor::ExElim, m, e}), m);
          ins.elim = e;
          b.add(std::move(ins));
        }
        if (t.bottom_node)
          b.add(b.make(Op::Jmp, 12, q, b.state({Flavor::BotElim, m, {}}), m));
      }
    }
  }

  // correlated elimination groups at flavored states
  for (auto& [key, q] : b.ids) {
    switch (key.flavor) {
      case Flavor::OrElim: {
        const NodeId& d = key.elim;
        b.add(b.make(Op::Jmp, 14, q, b.state({Flavor::Head, d, {}}), d));
        b.add(b.make(Op::Store, 15, q, b.state({Flavor::Exist, key.node, {}}), child(t, d, 0),
                     key.node));
        b.add(b.make(Op::Store, 16, q, b.state({Flavor::Exist, key.node, {}}), child(t, d, 1),
                     key.node));
        break;
      }
      case Flavor::ImpElim: {
        const NodeId& d = key.elim;
        b.add(b.make(Op::Jmp, 17, q, b.state({Flavor::Head, d, {}}), d));
        b.add(b.make(Op::Jmp, 18, q, b.state({Flavor::Exist, child(t, d, 0), {}}), child(t, d, 0)));
        break;
      }
      case Flavor::ExElim: {
        const NodeId& e = key.elim;
        b.add(b.make(Op::Jmp, 19, q, b.state({Flavor::Head, e, {}}), e));
        Instruction ins = b.make(Op::InstL, 20, q, b.state({Flavor::Exist, key.node, {}}),
                                 child(t, e, 0), key.node);
        ins.elim = e;
        b.add(std::move(ins));
        break;
      }
      case Flavor::BotElim: {
        const NodeId& bot = *t.bottom_node;
        b.add(b.make(Op::Jmp, 21, q, b.state({Flavor::Head, bot, {}}), bot));
        break;
      }
      default: break;
    }
  }

  b.aut.initial_state = b.state({Flavor::Exist, {}, {}});
  b.aut.initial_node = {};
  return b.aut;
}

ID initial_id(const Automaton& aut) {
  ID id;
  id.state = aut.initial_state;
  id.node = aut.initial_node;
  return id;
}

namespace {

int find_existential_state(const Automaton& aut, const NodeId& n) {
  std::string name = "qE@" + node_name(n);
  for (size_t q = 0; q < aut.states.size(); q++)
    if (aut.states[q].name == name) return static_cast<int>(q);
  throw std::invalid_argument("no existential state for node " + node_name(n));
}

// Least-node emergence of psi, as a (node, binding) pair.
std::pair<NodeId, Binding> emergence_binding(const Automaton& aut, const FormulaPtr& psi) {
  auto occ = emerged_from(psi, aut.tree);
  if (occ.empty())
    throw std::invalid_argument("formula did not emerge from the root: " + print_formula(psi));
  auto& [node, sigma] = occ.front();
  Binding w;
  for (auto& [x, y] : sigma) w.map[bind_node(aut.tree, node, x)] = y;
  return {node, w};
}

}  // namespace

ID judgment_to_id(const Automaton& aut, const Context& gamma, const FormulaPtr& psi) {
  auto [node, w] = emergence_binding(aut, psi);
  ID id;
  id.state = find_existential_state(aut, node);
  id.node = node;
  id.w = w;
  std::set<std::string> eigens = free_vars(psi);
  for (auto& [x, xi] : gamma.items) {
    auto [n, v] = emergence_binding(aut, xi);
    id.store.push_back({n, v, x});
    for (auto& y : free_vars(xi)) eigens.insert(y);
  }
  id.V.assign(eigens.begin(), eigens.end());
  return id;
}

std::string dump_table(const Automaton& aut) {
  std::vector<std::pair<std::tuple<int, std::string, NodeId>, std::string>> lines;
  for (auto& ins : aut.instructions) {
    std::ostringstream os;
    os << "(" << ins.pattern << ") " << aut.state(ins.state).name << ": " << op_name(ins.op)
       << " " << node_name(ins.a);
    if (ins.op == Op::Store || ins.op == Op::InstL || ins.op == Op::Check)
      os << ", " << node_name(ins.b);
    os << ", " << aut.state(ins.target).name;
    lines.push_back({{ins.pattern, aut.state(ins.state).name, ins.a}, os.str()});
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream os;
  for (auto& [k, s] : lines) os << s << "\n";
  return os.str();
}

}  // namespace arcadian
