#include "arcadian/machine.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace arcadian {

std::string op_name(Op op) {
  switch (op) {
    case Op::Store: return "store";
    case Op::Jmp: return "jmp";
    case Op::New: return "new";
    case Op::Check: return "check";
    case Op::InstL: return "instl";
    case Op::InstR: return "instr";
    case Op::Load: return "load";
  }
  return "?";
}

// --------------------------------------------------------------------------
// Step relation
// --------------------------------------------------------------------------

namespace {

std::string fresh_eigen(const std::vector<std::string>& V) {
  for (int k = 1;; k++) {
    std::string c = "X" + std::to_string(k);
    if (std::find(V.begin(), V.end(), c) == V.end()) return c;
  }
}

std::string fresh_label(const std::vector<StoreEntry>& store) {
  for (int k = 1;; k++) {
    std::string c = "x" + std::to_string(k);
    bool taken = false;
    for (auto& e : store)
      if (e.label == c) taken = true;
    if (!taken) return c;
  }
}

// All total extensions of `base` to `dom`, missing positions ranging over V.
std::vector<Binding> extensions(const Binding& base, const std::set<NodeId>& dom,
                                const std::vector<std::string>& V) {
  std::vector<NodeId> missing;
  for (auto& n : dom)
    if (!base.map.count(n)) missing.push_back(n);
  std::vector<Binding> out;
  if (missing.empty()) {
    out.push_back(base);
    return out;
  }
  if (V.empty()) return out;
  std::vector<size_t> pick(missing.size(), 0);
  for (;;) {
    Binding b = base;
    for (size_t i = 0; i < missing.size(); i++) b.map[missing[i]] = V[pick[i]];
    out.push_back(std::move(b));
    size_t i = 0;
    while (i < pick.size() && ++pick[i] == V.size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return out;
}

// Solves a guard: matches the pattern at guard.match_node against the goal
// instance and converts the substitution into a binding on the binder nodes
// of fv(match_node); extends to fv(solve_node) over V.
std::vector<Binding> guard_solutions(const FormulaTree& t, const GuardSpec& g,
                                     const FormulaPtr& goal,
                                     const std::vector<std::string>& V) {
  auto sigma = match_at(t, g.match_node, goal);
  if (!sigma) return {};
  Binding base;
  for (auto& [x, y] : *sigma) base.map[bind_node(t, g.match_node, x)] = y;
  return extensions(base, t.at(g.solve_node).fv, V);
}

}  // namespace

namespace {

// The store behaves as a set: adding an already-present fact is a no-op and
// reuses the existing label.
void push_store(ID& s, const NodeId& node, Binding v, StepChoice& c) {
  for (auto& e : s.store) {
    if (e.node == node && e.v == v) {
      c.label = e.label;
      return;
    }
  }
  c.label = fresh_label(s.store);
  s.store.push_back({node, std::move(v), c.label});
}

}  // namespace

std::vector<std::pair<ID, StepChoice>> successors(const Automaton& aut,
                                                  const Instruction& ins, const ID& id) {
  const FormulaTree& t = aut.tree;
  std::vector<std::pair<ID, StepChoice>> out;
  auto restricted_to = [&](const Binding& b, const NodeId& n) {
    return b.restricted(t.at(n).fv);
  };
  auto base_succ = [&]() {
    ID s = id;
    s.state = ins.target;
    s.waux = Binding{};
    return s;
  };

  switch (ins.pattern) {
    case 1:    // qA at ->: store the premise, goal becomes the conclusion
    case 15:
    case 16: {  // assume one disjunct, keep the goal
      ID s = base_succ();
      StepChoice c;
      push_store(s, ins.a, restricted_to(Binding::overlay(id.waux, id.w), ins.a), c);
      s.node = ins.b;
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 2:   // qA at /\: move to a conjunct
    case 3: {  // qE at \/: move to a disjunct
      ID s = base_succ();
      s.node = ins.a;
      s.w = restricted_to(id.w, ins.a);
      StepChoice c;
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 4: {  // qA at forall: fresh eigenvariable
      ID s = base_succ();
      StepChoice c;
      c.eigen = fresh_eigen(id.V);
      s.w.map[id.node] = c.eigen;
      s.node = ins.a;
      s.V.push_back(c.eigen);
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 5: {  // qA at exists: pick a witness from V
      for (auto& y : id.V) {
        ID s = base_succ();
        StepChoice c;
        c.witness = y;
        s.w = restricted_to(id.w, ins.a);
        s.w.map.erase(id.node);
        s.w.map[id.node] = y;
        s.node = ins.a;
        c.new_w = s.w;
        out.emplace_back(std::move(s), std::move(c));
      }
      break;
    }
    case 6:   // qE -> qA on the same node
    case 12: {  // qE -> bottom-elimination state, same node
      ID s = base_succ();
      s.w = restricted_to(id.w, id.node);
      StepChoice c;
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 7:   // conjunction elimination: jump to the /\ node
    case 10: {  // universal elimination: jump to the forall node
      FormulaPtr goal = instantiate(t, id.node, id.w);
      for (auto& b : guard_solutions(t, *ins.guard, goal, id.V)) {
        ID s = base_succ();
        StepChoice c;
        if (ins.pattern == 10) {
          auto it = b.map.find(ins.a);
          if (it != b.map.end()) c.witness = it->second;
        }
        s.node = ins.a;
        s.w = restricted_to(b, ins.a);
        c.new_w = s.w;
        if (ins.pattern == 10 && c.witness.empty()) {
          // vacuous quantifier: any element of V serves as the witness
          for (auto& y : id.V) {
            StepChoice cy = c;
            cy.witness = y;
            out.emplace_back(s, std::move(cy));
          }
        } else {
          out.emplace_back(std::move(s), std::move(c));
        }
      }
      break;
    }
    case 9: {  // implication elimination: solve the conclusion against the goal
      FormulaPtr goal = instantiate(t, id.node, id.w);
      for (auto& b : guard_solutions(t, *ins.guard, goal, id.V)) {
        ID s = base_succ();
        s.waux = b;
        StepChoice c;
        c.loaded = b;
        c.new_w = s.w;
        out.emplace_back(std::move(s), std::move(c));
      }
      break;
    }
    case 8:   // disjunction elimination: load a binding of the \/ node
    case 11: {  // existential elimination: load a binding of the exists node
      Binding empty;
      for (auto& v : extensions(empty, t.at(ins.elim).fv, id.V)) {
        ID s = base_succ();
        s.waux = v;
        StepChoice c;
        c.new_w = s.w;
        c.loaded = v;
        out.emplace_back(std::move(s), std::move(c));
      }
      break;
    }
    case 13: {  // axiom: goal instance present in the store
      FormulaPtr goal = instantiate(t, id.node, id.w);
      for (size_t i = 0; i < id.store.size(); i++) {
        const StoreEntry& e = id.store[i];
        if (!alpha_eq(instantiate(t, e.node, e.v), goal)) continue;
        ID s = base_succ();
        StepChoice c;
        c.new_w = s.w;
        c.label = e.label;
        c.store_index = static_cast<int>(i);
        out.emplace_back(std::move(s), std::move(c));
      }
      break;
    }
    case 14:  // prove the eliminated disjunction
    case 17:  // prove the solved implication
    case 18:  // prove its premise
    case 19: {  // prove the eliminated existential
      ID s = base_succ();
      s.node = ins.a;
      s.w = restricted_to(Binding::overlay(id.waux, id.w), ins.a);
      StepChoice c;
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 20: {  // open the existential with a fresh eigenvariable
      ID s = base_succ();
      StepChoice c;
      c.eigen = fresh_eigen(id.V);
      Binding w2 = id.waux;
      w2.map[ins.elim] = c.eigen;
      w2 = Binding::overlay(w2, id.w);
      push_store(s, ins.a, restricted_to(w2, ins.a), c);
      s.node = ins.b;
      s.V.push_back(c.eigen);
      c.new_w = s.w;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    case 21: {  // goal becomes bottom
      ID s = base_succ();
      s.node = ins.a;
      s.w = Binding{};
      StepChoice c;
      out.emplace_back(std::move(s), std::move(c));
      break;
    }
    default: break;
  }
  return out;
}

// --------------------------------------------------------------------------
// Canonical keys
// --------------------------------------------------------------------------

ID canonicalize(const ID& id) {
  // first-use order: w (by node), then waux, then V creation order; this makes
  // the renaming independent of the store and hence idempotent
  std::map<std::string, std::string> ren;
  auto assign = [&](const std::string& v) {
    if (!ren.count(v)) ren.emplace(v, "X" + std::to_string(ren.size() + 1));
  };
  for (auto& [n, v] : id.w.map) assign(v);
  for (auto& [n, v] : id.waux.map) assign(v);
  for (auto& v : id.V) assign(v);
  auto rename = [&](const Binding& b) {
    Binding out;
    for (auto& [n, v] : b.map) out.map[n] = ren.at(v);
    return out;
  };
  ID c;
  c.state = id.state;
  c.node = id.node;
  c.w = rename(id.w);
  c.waux = rename(id.waux);
  for (auto& e : id.store) c.store.push_back({e.node, rename(e.v), ""});
  std::sort(c.store.begin(), c.store.end(),
            [](const StoreEntry& a, const StoreEntry& b) {
              return std::tie(a.node, a.v) < std::tie(b.node, b.v);
            });
  for (auto& v : id.V) c.V.push_back(ren.at(v));
  std::sort(c.V.begin(), c.V.end());
  return c;
}

std::string canonical_key(const ID& id) {
  ID c = canonicalize(id);
  std::ostringstream os;
  os << c.state << ";" << node_name(c.node) << ";w{";
  for (auto& [n, v] : c.w.map) os << node_name(n) << ":" << v << ",";
  os << "};u{";
  for (auto& [n, v] : c.waux.map) os << node_name(n) << ":" << v << ",";
  os << "};s{";
  for (auto& e : c.store) {
    os << node_name(e.node) << "[";
    for (auto& [n, v] : e.v.map) os << node_name(n) << ":" << v << ",";
    os << "],";
  }
  os << "};V" << c.V.size();
  return os.str();
}

std::vector<std::string> well_formed(const Automaton& aut) {
  std::vector<std::string> out;
  std::map<int, int> owner;
  for (size_t q = 0; q < aut.states.size(); q++) {
    for (int ii : aut.states[q].available) {
      if (ii < 0 || ii >= static_cast<int>(aut.instructions.size())) {
        out.push_back("DanglingInstruction: state " + aut.states[q].name);
        continue;
      }
      auto [it, inserted] = owner.emplace(ii, static_cast<int>(q));
      if (!inserted)
        out.push_back("DuplicateOwnership: instruction " + std::to_string(ii) +
                      " owned by " + aut.states[it->second].name + " and " + aut.states[q].name);
      if (aut.instructions[ii].state != static_cast<int>(q))
        out.push_back("OwnershipMismatch: instruction " + std::to_string(ii));
    }
  }
  for (size_t ii = 0; ii < aut.instructions.size(); ii++) {
    const Instruction& ins = aut.instructions[ii];
    if (!owner.count(static_cast<int>(ii)))
      out.push_back("OrphanInstruction: " + std::to_string(ii));
    bool uses_b = ins.op == Op::Store || ins.op == Op::InstL || ins.op == Op::Check;
    if (!aut.tree.has(ins.a) || (uses_b && !aut.tree.has(ins.b)))
      out.push_back("DanglingNode: instruction " + std::to_string(ii));
    if (ins.target < 0 || ins.target >= static_cast<int>(aut.states.size()))
      out.push_back("DanglingState: instruction " + std::to_string(ii));
  }
  return out;
}

// --------------------------------------------------------------------------
// Search
// --------------------------------------------------------------------------

namespace {

struct Searcher {
  const Automaton& aut;
  Budget budget;
  SearchStats stats;
  std::unordered_map<std::string, int> on_path;
  struct MemoEntry {
    bool definite = false;
    int fail_remaining = -1;
  };
  std::unordered_map<std::string, MemoEntry> memo;

  struct Outcome {
    RunPtr run;
    int min_dep = INT_MAX;
    bool cutoff = false;
  };

  bool blocked(const Instruction& ins, const ID& id) const {
    return (ins.op == Op::New || ins.op == Op::InstL) &&
           static_cast<int>(id.V.size()) >= budget.max_eigen;
  }

  Outcome search(const ID& id, int remaining, int depth) {
    const StateInfo& st = aut.state(id.state);
    if (st.universal && st.available.empty())
      return {std::make_shared<RunNode>(RunNode{id, {}}), INT_MAX, false};

    std::string key = canonical_key(id);
    if (auto it = on_path.find(key); it != on_path.end()) {
      stats.loop_cuts++;
      return {nullptr, it->second, false};
    }
    if (auto it = memo.find(key); it != memo.end()) {
      if (it->second.definite) {
        stats.memo_hits++;
        return {nullptr, INT_MAX, false};
      }
      if (it->second.fail_remaining >= remaining) {
        stats.memo_hits++;
        return {nullptr, INT_MAX, true};
      }
    }
    if (remaining <= 0) return {nullptr, INT_MAX, true};

    stats.expanded++;
    on_path.emplace(key, depth);
    Outcome fail;
    RunPtr result;

    if (!st.universal) {
      for (int ii : st.available) {
        const Instruction& ins = aut.instructions[ii];
        if (blocked(ins, id)) {
          fail.cutoff = true;
          continue;
        }
        for (auto& [succ, choice] : successors(aut, ins, id)) {
          Outcome r = search(succ, remaining - 1, depth + 1);
          if (r.run) {
            result = std::make_shared<RunNode>(RunNode{id, {{ii, choice, r.run}}});
            break;
          }
          fail.min_dep = std::min(fail.min_dep, r.min_dep);
          fail.cutoff |= r.cutoff;
        }
        if (result) break;
      }
    } else {
      std::vector<RunEdge> edges;
      bool ok = true;
      for (int ii : st.available) {
        const Instruction& ins = aut.instructions[ii];
        if (blocked(ins, id)) {
          fail.cutoff = true;
          ok = false;
          break;
        }
        bool found = false;
        for (auto& [succ, choice] : successors(aut, ins, id)) {
          Outcome r = search(succ, remaining - 1, depth + 1);
          if (r.run) {
            edges.push_back({ii, choice, r.run});
            found = true;
            break;
          }
          fail.min_dep = std::min(fail.min_dep, r.min_dep);
          fail.cutoff |= r.cutoff;
        }
        if (!found) {
          ok = false;
          break;
        }
      }
      if (ok) result = std::make_shared<RunNode>(RunNode{id, std::move(edges)});
    }

    on_path.erase(key);
    if (result) return {result, INT_MAX, false};
    if (fail.min_dep >= depth) {
      MemoEntry& e = memo[key];
      if (!fail.cutoff)
        e.definite = true;
      else if (!e.definite)
        e.fail_remaining = std::max(e.fail_remaining, remaining);
    }
    return fail;
  }
};

}  // namespace

AcceptResult accepts(const Automaton& aut, const ID& start, const Budget& budget) {
  Searcher s{aut, budget};
  auto out = s.search(start, budget.max_depth, 0);
  AcceptResult res;
  res.run = out.run;
  res.exhausted = !out.run && !out.cutoff;
  res.stats = s.stats;
  return res;
}

// --------------------------------------------------------------------------
// Replay
// --------------------------------------------------------------------------

namespace {

bool choice_eq(const StepChoice& a, const StepChoice& b) {
  return a.new_w == b.new_w && a.loaded == b.loaded && a.eigen == b.eigen &&
         a.witness == b.witness && a.label == b.label && a.store_index == b.store_index;
}

bool replay_rec(const Automaton& aut, const RunNode& n, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  const StateInfo& st = aut.state(n.id.state);
  if (st.universal) {
    std::vector<int> used;
    for (auto& e : n.edges) used.push_back(e.instruction);
    std::vector<int> want = st.available;
    std::sort(used.begin(), used.end());
    std::sort(want.begin(), want.end());
    if (used != want)
      return fail("universal node at state " + st.name +
                  " does not carry one edge per available instruction");
  } else {
    if (n.edges.size() != 1)
      return fail("existential node at state " + st.name + " must carry exactly one edge");
    int ii = n.edges[0].instruction;
    if (std::find(st.available.begin(), st.available.end(), ii) == st.available.end())
      return fail("edge instruction not available in state " + st.name);
  }
  for (auto& e : n.edges) {
    if (!e.child) return fail("missing child node");
    bool matched = false;
    for (auto& [succ, choice] : successors(aut, aut.instructions[e.instruction], n.id)) {
      if (succ == e.child->id && choice_eq(choice, e.choice)) {
        matched = true;
        break;
      }
    }
    if (!matched)
      return fail("edge from state " + st.name + " does not replay as a legal step");
    if (!replay_rec(aut, *e.child, error)) return false;
  }
  return true;
}

}  // namespace

bool replay_run(const Automaton& aut, const RunPtr& run, std::string* error) {
  if (!run) {
    if (error) *error = "null run";
    return false;
  }
  return replay_rec(aut, *run, error);
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

namespace {

using nlohmann::json;

json binding_to_json(const Binding& b) {
  json j = json::object();
  for (auto& [n, v] : b.map) j[node_name(n)] = v;
  return j;
}

Binding binding_from_json(const json& j) {
  Binding b;
  for (auto it = j.begin(); it != j.end(); ++it)
    b.map[node_from_name(it.key())] = it.value().get<std::string>();
  return b;
}

json id_to_json(const ID& id) {
  json j;
  j["state"] = id.state;
  j["node"] = node_name(id.node);
  j["w"] = binding_to_json(id.w);
  j["waux"] = binding_to_json(id.waux);
  json store = json::array();
  for (auto& e : id.store)
    store.push_back({{"node", node_name(e.node)}, {"v", binding_to_json(e.v)}, {"label", e.label}});
  j["store"] = store;
  j["V"] = id.V;
  return j;
}

ID id_from_json(const json& j) {
  ID id;
  id.state = j.at("state").get<int>();
  id.node = node_from_name(j.at("node").get<std::string>());
  id.w = binding_from_json(j.at("w"));
  id.waux = binding_from_json(j.at("waux"));
  for (auto& e : j.at("store"))
    id.store.push_back({node_from_name(e.at("node").get<std::string>()),
                        binding_from_json(e.at("v")), e.at("label").get<std::string>()});
  id.V = j.at("V").get<std::vector<std::string>>();
  return id;
}

json choice_to_json(const StepChoice& c) {
  json j;
  j["new_w"] = binding_to_json(c.new_w);
  j["loaded"] = binding_to_json(c.loaded);
  j["eigen"] = c.eigen;
  j["witness"] = c.witness;
  j["label"] = c.label;
  j["store_index"] = c.store_index;
  return j;
}

StepChoice choice_from_json(const json& j) {
  StepChoice c;
  c.new_w = binding_from_json(j.at("new_w"));
  c.loaded = binding_from_json(j.at("loaded"));
  c.eigen = j.at("eigen").get<std::string>();
  c.witness = j.at("witness").get<std::string>();
  c.label = j.at("label").get<std::string>();
  c.store_index = j.at("store_index").get<int>();
  return c;
}

json run_to_json_rec(const RunNode& n) {
  json j;
  j["id"] = id_to_json(n.id);
  json edges = json::array();
  for (auto& e : n.edges)
    edges.push_back(
        {{"instruction", e.instruction}, {"choice", choice_to_json(e.choice)},
         {"child", run_to_json_rec(*e.child)}});
  j["edges"] = edges;
  return j;
}

RunPtr run_from_json_rec(const json& j) {
  RunNode n;
  n.id = id_from_json(j.at("id"));
  for (auto& e : j.at("edges"))
    n.edges.push_back({e.at("instruction").get<int>(), choice_from_json(e.at("choice")),
                       run_from_json_rec(e.at("child"))});
  return std::make_shared<RunNode>(std::move(n));
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string run_to_json(const Automaton& aut, const RunPtr& run) {
  (void)aut;
  return run_to_json_rec(*run).dump(2);
}

RunPtr run_from_json(const Automaton& aut, const std::string& text) {
  (void)aut;
  json j = json::parse(text);
  return run_from_json_rec(j);
}

std::string automaton_to_dot(const Automaton& aut) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=LR;\n";
  for (size_t q = 0; q < aut.states.size(); q++) {
    const StateInfo& st = aut.states[q];
    os << "  q" << q << " [label=\"" << dot_escape(st.name) << "\", shape="
       << (st.universal ? "box" : "ellipse") << "];\n";
  }
  for (auto& ins : aut.instructions) {
    os << "  q" << ins.state << " -> q" << ins.target << " [label=\"(" << ins.pattern << ") "
       << op_name(ins.op) << " " << node_name(ins.a) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string run_to_dot(const Automaton& aut, const RunPtr& run) {
  std::ostringstream os;
  os << "digraph run {\n";
  int counter = 0;
  std::function<int(const RunNode&)> emit = [&](const RunNode& n) -> int {
    int me = counter++;
    const StateInfo& st = aut.state(n.id.state);
    std::string goal = print_formula(instantiate(aut.tree, n.id.node, n.id.w));
    os << "  n" << me << " [label=\"" << dot_escape(st.name) << "\\n" << dot_escape(goal)
       << "\", shape=" << (st.universal ? "box" : "ellipse") << "];\n";
    for (auto& e : n.edges) {
      int ch = emit(*e.child);
      const Instruction& ins = aut.instructions[e.instruction];
      os << "  n" << me << " -> n" << ch << " [label=\"(" << ins.pattern << ") "
         << op_name(ins.op) << "\"];\n";
    }
    return me;
  };
  emit(*run);
  os << "}\n";
  return os.str();
}

}  // namespace arcadian
