#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcadian {

// ---------------------------------------------------------------------------
// First-order formulas over a relational signature (variables only, no
// function symbols).  Values are immutable and shared.
// ---------------------------------------------------------------------------

enum class Conn { Atom, And, Or, Imp, Forall, Exists, Bottom };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Conn kind;
  std::string name;               // predicate name (Atom) or bound variable (Forall/Exists)
  std::vector<std::string> args;  // atom arguments
  FormulaPtr left, right;         // binary children; quantifier body lives in `left`

  static FormulaPtr atom(std::string pred, std::vector<std::string> args = {});
  static FormulaPtr bottom();
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr imp(FormulaPtr a, FormulaPtr b);
  static FormulaPtr forall(std::string x, FormulaPtr body);
  static FormulaPtr exists(std::string x, FormulaPtr body);
};

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& msg, size_t p) : std::runtime_error(msg), pos(p) {}
};

// Predicate arities, inferred from first use and enforced afterwards.
struct Signature {
  std::map<std::string, int> arity;
  void note(const std::string& pred, int n, size_t pos);
};

FormulaPtr parse_formula(const std::string& text);
FormulaPtr parse_formula(const std::string& text, Signature& sig);
// Parses the longest formula starting at `pos` and advances `pos` past it.
FormulaPtr parse_formula_prefix(const std::string& text, size_t& pos, Signature& sig);
std::string print_formula(const FormulaPtr& f);

std::set<std::string> free_vars(const FormulaPtr& f);
bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b);

// Capture-avoiding renaming of free variables.
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, std::string>& sub);
// Capture check for the literal substitution f[x:=y]: true iff some free
// occurrence of x sits under a binder for y.
bool substitution_captures(const FormulaPtr& f, const std::string& x, const std::string& y);

int formula_size(const FormulaPtr& f);  // number of AST nodes
FormulaPtr universal_closure(const FormulaPtr& f);
bool is_pseudo_atom(const FormulaPtr& f);  // atom, existential or disjunction
bool is_propositional(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Indexed syntax tree of a closed formula.  Nodes are addressed by
// child-index paths from the root.
// ---------------------------------------------------------------------------

using NodeId = std::vector<int>;
std::string node_name(const NodeId& n);           // "e" for the root, else "0.1.0"
NodeId node_from_name(const std::string& s);

struct NotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormulaTree {
  struct Node {
    NodeId id;
    FormulaPtr formula;
    Conn kind = Conn::Bottom;
    std::vector<NodeId> children;
    std::optional<NodeId> parent;
    std::set<std::string> free;  // FV of the formula at this node
    std::set<NodeId> fv;         // binder nodes: { bind(id, X) | X in free }
  };

  FormulaPtr root;
  std::map<NodeId, Node> nodes;
  std::optional<NodeId> bottom_node;  // canonical (lexicographically least) bot node

  const Node& at(const NodeId& n) const;
  bool has(const NodeId& n) const { return nodes.count(n) != 0; }
  bool is_quantifier(const NodeId& n) const;
};

FormulaTree index_formula(const FormulaPtr& f);  // throws NotClosed

// Closest quantifier ancestor of `n` binding `x`; throws std::invalid_argument
// when x is not free at n.
NodeId bind_node(const FormulaTree& t, const NodeId& n, const std::string& x);

// Partial map from quantifier nodes to eigenvariables.
struct Binding {
  std::map<NodeId, std::string> map;

  bool covers(const std::set<NodeId>& dom) const;
  Binding restricted(const std::set<NodeId>& dom) const;
  bool operator==(const Binding& o) const { return map == o.map; }
  bool operator<(const Binding& o) const { return map < o.map; }
  // a + entries of b outside dom(a); realizes "a oplus b".
  static Binding overlay(const Binding& a, const Binding& b);
};

// Formula at `n` with every free occurrence of X replaced by w(bind(n, X)).
// Throws std::invalid_argument (incomplete binding) when fv(n) !<= dom(w).
FormulaPtr instantiate(const FormulaTree& t, const NodeId& n, const Binding& w);

using Substitution = std::map<std::string, std::string>;

// Match the subformula at `n` (free-at-n variables acting as pattern
// variables) against a concrete formula; yields the unique substitution or
// nothing.  Pattern variables may only map to variables free in `target`.
std::optional<Substitution> match_at(const FormulaTree& t, const NodeId& n,
                                     const FormulaPtr& target);

// All (node, substitution) pairs witnessing that `psi` emerged from the root
// formula of `t`.
std::vector<std::pair<NodeId, Substitution>> emerged_from(const FormulaPtr& psi,
                                                          const FormulaTree& t);

// Static matchability of the subformulas at `a` and `b`: true iff some pair
// of instantiations of the two nodes can be alpha-equal.
bool nodes_compatible(const FormulaTree& t, const NodeId& a, const NodeId& b);

}  // namespace arcadian
