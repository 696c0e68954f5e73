#include "arcadian/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace arcadian {

// --------------------------------------------------------------------------
// Constructors
// --------------------------------------------------------------------------

static FormulaPtr mk(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr Formula::atom(std::string pred, std::vector<std::string> args) {
  Formula f;
  f.kind = Conn::Atom;
  f.name = std::move(pred);
  f.args = std::move(args);
  return mk(std::move(f));
}
FormulaPtr Formula::bottom() {
  Formula f;
  f.kind = Conn::Bottom;
  return mk(std::move(f));
}
static FormulaPtr binop(Conn k, FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = k;
  f.left = std::move(a);
  f.right = std::move(b);
  return mk(std::move(f));
}
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) { return binop(Conn::And, std::move(a), std::move(b)); }
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) { return binop(Conn::Or, std::move(a), std::move(b)); }
FormulaPtr Formula::imp(FormulaPtr a, FormulaPtr b) { return binop(Conn::Imp, std::move(a), std::move(b)); }
static FormulaPtr quant(Conn k, std::string x, FormulaPtr body) {
  Formula f;
  f.kind = k;
  f.name = std::move(x);
  f.left = std::move(body);
  return mk(std::move(f));
}
FormulaPtr Formula::forall(std::string x, FormulaPtr body) { return quant(Conn::Forall, std::move(x), std::move(body)); }
FormulaPtr Formula::exists(std::string x, FormulaPtr body) { return quant(Conn::Exists, std::move(x), std::move(body)); }

// --------------------------------------------------------------------------
// Parsing
// --------------------------------------------------------------------------

void Signature::note(const std::string& pred, int n, size_t pos) {
  auto it = arity.find(pred);
  if (it == arity.end()) {
    arity[pred] = n;
  } else if (it->second != n) {
    throw ParseError("predicate '" + pred + "' used with arity " + std::to_string(n) +
                         " but previously with arity " + std::to_string(it->second),
                     pos);
  }
}

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  explicit Lexer(const std::string& text) : s(text) {}

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
  std::string expect_ident(const char* what) {
    auto id = peek_ident();
    if (!id) throw ParseError(std::string("expected ") + what, pos);
    pos += id->size();
    return *id;
  }
  void expect_sym(const std::string& sym) {
    if (!eat_sym(sym)) throw ParseError("expected '" + sym + "'", pos);
  }
};

struct FormulaParser {
  Lexer& lx;
  Signature& sig;

  bool at_quantifier() {
    auto id = lx.peek_ident();
    return id && (*id == "forall" || *id == "exists");
  }

  FormulaPtr parse() {
    if (at_quantifier()) {
      std::string q = lx.expect_ident("quantifier");
      std::string var = lx.expect_ident("variable");
      lx.expect_sym(".");
      FormulaPtr body = parse();
      return q == "forall" ? Formula::forall(var, body) : Formula::exists(var, body);
    }
    return parse_imp();
  }

  FormulaPtr parse_imp() {
    FormulaPtr l = parse_or();
    if (lx.eat_sym("->")) return Formula::imp(l, parse());  // right-assoc, quantifier rhs ok
    return l;
  }

  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    while (lx.peek_sym("\\/")) {
      lx.eat_sym("\\/");
      if (at_quantifier()) return Formula::disj(l, parse());  // scope extends maximally right
      l = Formula::disj(l, parse_and());
    }
    return l;
  }

  FormulaPtr parse_and() {
    FormulaPtr l = parse_neg();
    while (lx.peek_sym("/\\")) {
      lx.eat_sym("/\\");
      if (at_quantifier()) return Formula::conj(l, parse());
      l = Formula::conj(l, parse_neg());
    }
    return l;
  }

  FormulaPtr parse_neg() {
    if (lx.eat_sym("~")) {
      if (at_quantifier()) return Formula::imp(parse(), Formula::bottom());
      return Formula::imp(parse_neg(), Formula::bottom());
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    if (lx.eat_sym("(")) {
      FormulaPtr f = parse();
      lx.expect_sym(")");
      return f;
    }
    size_t at = lx.pos;
    auto id = lx.peek_ident();
    if (!id) throw ParseError("expected formula", lx.pos);
    if (*id == "forall" || *id == "exists")
      throw ParseError("quantifier not allowed here; parenthesize", lx.pos);
    lx.pos += id->size();
    if (*id == "bot") return Formula::bottom();
    std::vector<std::string> args;
    if (lx.eat_sym("(")) {
      args.push_back(lx.expect_ident("variable"));
      while (lx.eat_sym(",")) args.push_back(lx.expect_ident("variable"));
      lx.expect_sym(")");
    }
    sig.note(*id, static_cast<int>(args.size()), at);
    return Formula::atom(*id, std::move(args));
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, Signature& sig) {
  Lexer lx(text);
  FormulaParser p{lx, sig};
  FormulaPtr f = p.parse();
  if (!lx.eof()) throw ParseError("unexpected trailing input", lx.pos);
  return f;
}

FormulaPtr parse_formula(const std::string& text) {
  Signature sig;
  return parse_formula(text, sig);
}

FormulaPtr parse_formula_prefix(const std::string& text, size_t& pos, Signature& sig) {
  Lexer lx(text);
  lx.pos = pos;
  FormulaParser p{lx, sig};
  FormulaPtr f = p.parse();
  pos = lx.pos;
  return f;
}

// --------------------------------------------------------------------------
// Printing (minimal parenthesization)
// --------------------------------------------------------------------------

namespace {

// precedence levels: 0 formula (quantifiers), 1 ->, 2 \/, 3 /\, 4 atom
int level_of(Conn k) {
  switch (k) {
    case Conn::Forall:
    case Conn::Exists: return 0;
    case Conn::Imp: return 1;
    case Conn::Or: return 2;
    case Conn::And: return 3;
    default: return 4;
  }
}

void print_rec(std::ostream& os, const FormulaPtr& f, int min_level) {
  int lv = level_of(f->kind);
  bool parens = lv < min_level;
  if (parens) os << "(";
  switch (f->kind) {
    case Conn::Bottom: os << "bot"; break;
    case Conn::Atom:
      os << f->name;
      if (!f->args.empty()) {
        os << "(";
        for (size_t i = 0; i < f->args.size(); i++) {
          if (i) os << ",";
          os << f->args[i];
        }
        os << ")";
      }
      break;
    case Conn::Forall:
    case Conn::Exists:
      os << (f->kind == Conn::Forall ? "forall " : "exists ") << f->name << ". ";
      print_rec(os, f->left, 0);
      break;
    case Conn::Imp:
      print_rec(os, f->left, 2);
      os << " -> ";
      print_rec(os, f->right, 0);  // right-assoc; quantifiers legal after ->
      break;
    case Conn::Or:
      print_rec(os, f->left, 2);
      os << " \\/ ";
      print_rec(os, f->right, 3);
      break;
    case Conn::And:
      print_rec(os, f->left, 3);
      os << " /\\ ";
      print_rec(os, f->right, 4);
      break;
  }
  if (parens) os << ")";
}

}  // namespace

std::string print_formula(const FormulaPtr& f) {
  std::ostringstream os;
  print_rec(os, f, 0);
  return os.str();
}

// --------------------------------------------------------------------------
// Free variables, alpha equivalence, substitution
// --------------------------------------------------------------------------

static void free_vars_rec(const FormulaPtr& f, std::set<std::string>& bound,
                          std::set<std::string>& out) {
  switch (f->kind) {
    case Conn::Bottom: break;
    case Conn::Atom:
      for (auto& a : f->args)
        if (!bound.count(a)) out.insert(a);
      break;
    case Conn::Forall:
    case Conn::Exists: {
      bool was = bound.count(f->name) != 0;
      bound.insert(f->name);
      free_vars_rec(f->left, bound, out);
      if (!was) bound.erase(f->name);
      break;
    }
    default:
      free_vars_rec(f->left, bound, out);
      free_vars_rec(f->right, bound, out);
  }
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

namespace {

bool alpha_rec(const FormulaPtr& a, const FormulaPtr& b,
               std::map<std::string, int>& la, std::map<std::string, int>& lb, int depth) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Conn::Bottom: return true;
    case Conn::Atom: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); i++) {
        auto ia = la.find(a->args[i]);
        auto ib = lb.find(b->args[i]);
        if ((ia == la.end()) != (ib == lb.end())) return false;
        if (ia != la.end()) {
          if (ia->second != ib->second) return false;
        } else if (a->args[i] != b->args[i]) {
          return false;  // both free: compare by name
        }
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      auto sa = la.find(a->name) != la.end() ? std::optional<int>(la[a->name]) : std::nullopt;
      auto sb = lb.find(b->name) != lb.end() ? std::optional<int>(lb[b->name]) : std::nullopt;
      la[a->name] = depth;
      lb[b->name] = depth;
      bool ok = alpha_rec(a->left, b->left, la, lb, depth + 1);
      if (sa) la[a->name] = *sa; else la.erase(a->name);
      if (sb) lb[b->name] = *sb; else lb.erase(b->name);
      return ok;
    }
    default:
      return alpha_rec(a->left, b->left, la, lb, depth) &&
             alpha_rec(a->right, b->right, la, lb, depth);
  }
}

}  // namespace

bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
  std::map<std::string, int> la, lb;
  return alpha_rec(a, b, la, lb, 0);
}

static std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string cand = base + "'";
  while (avoid.count(cand)) cand += "'";
  return cand;
}

static FormulaPtr subst_rec(const FormulaPtr& f, std::map<std::string, std::string> sub) {
  switch (f->kind) {
    case Conn::Bottom: return f;
    case Conn::Atom: {
      std::vector<std::string> args;
      for (auto& a : f->args) {
        auto it = sub.find(a);
        args.push_back(it != sub.end() ? it->second : a);
      }
      return Formula::atom(f->name, std::move(args));
    }
    case Conn::Forall:
    case Conn::Exists: {
      std::map<std::string, std::string> inner = sub;
      inner.erase(f->name);
      // rename the binder when it would capture a substituted value
      std::set<std::string> incoming;
      for (auto& [k, v] : inner) incoming.insert(v);
      std::string binder = f->name;
      FormulaPtr body = f->left;
      if (incoming.count(binder)) {
        std::set<std::string> avoid = incoming;
        for (auto& v : free_vars(body)) avoid.insert(v);
        std::string nb = fresh_name(binder, avoid);
        std::map<std::string, std::string> ren{{binder, nb}};
        body = subst_rec(body, ren);
        binder = nb;
      }
      body = subst_rec(body, inner);
      return f->kind == Conn::Forall ? Formula::forall(binder, body)
                                     : Formula::exists(binder, body);
    }
    default: {
      FormulaPtr l = subst_rec(f->left, sub);
      FormulaPtr r = subst_rec(f->right, sub);
      return binop(f->kind, l, r);
    }
  }
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, std::string>& sub) {
  if (sub.empty()) return f;
  return subst_rec(f, sub);
}

static bool captures_rec(const FormulaPtr& f, const std::string& x, const std::string& y,
                         bool under_y) {
  switch (f->kind) {
    case Conn::Bottom: return false;
    case Conn::Atom:
      if (!under_y) return false;
      return std::find(f->args.begin(), f->args.end(), x) != f->args.end();
    case Conn::Forall:
    case Conn::Exists:
      if (f->name == x) return false;  // x no longer free below
      return captures_rec(f->left, x, y, under_y || f->name == y);
    default:
      return captures_rec(f->left, x, y, under_y) || captures_rec(f->right, x, y, under_y);
  }
}

bool substitution_captures(const FormulaPtr& f, const std::string& x, const std::string& y) {
  if (x == y) return false;
  return captures_rec(f, x, y, false);
}

int formula_size(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Bottom:
    case Conn::Atom: return 1;
    case Conn::Forall:
    case Conn::Exists: return 1 + formula_size(f->left);
    default: return 1 + formula_size(f->left) + formula_size(f->right);
  }
}

FormulaPtr universal_closure(const FormulaPtr& f) {
  auto fv = free_vars(f);
  FormulaPtr out = f;
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = Formula::forall(*it, out);
  return out;
}

bool is_pseudo_atom(const FormulaPtr& f) {
  return f->kind == Conn::Atom || f->kind == Conn::Exists || f->kind == Conn::Or;
}

bool is_propositional(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Bottom: return true;
    case Conn::Atom: return f->args.empty();
    case Conn::Forall:
    case Conn::Exists: return false;
    default: return is_propositional(f->left) && is_propositional(f->right);
  }
}

// --------------------------------------------------------------------------
// Formula trees
// --------------------------------------------------------------------------

std::string node_name(const NodeId& n) {
  if (n.empty()) return "e";
  std::ostringstream os;
  for (size_t i = 0; i < n.size(); i++) {
    if (i) os << ".";
    os << n[i];
  }
  return os.str();
}

NodeId node_from_name(const std::string& s) {
  if (s == "e" || s.empty()) return {};
  NodeId out;
  std::istringstream is(s);
  std::string part;
  while (std::getline(is, part, '.')) out.push_back(std::stoi(part));
  return out;
}

const FormulaTree::Node& FormulaTree::at(const NodeId& n) const {
  auto it = nodes.find(n);
  if (it == nodes.end()) throw std::invalid_argument("unknown node " + node_name(n));
  return it->second;
}

bool FormulaTree::is_quantifier(const NodeId& n) const {
  Conn k = at(n).kind;
  return k == Conn::Forall || k == Conn::Exists;
}

static void index_rec(FormulaTree& t, const FormulaPtr& f, NodeId id,
                      std::optional<NodeId> parent) {
  FormulaTree::Node nd;
  nd.id = id;
  nd.formula = f;
  nd.kind = f->kind;
  nd.parent = parent;
  nd.free = free_vars(f);
  t.nodes[id] = std::move(nd);
  auto child = [&](int i, const FormulaPtr& c) {
    NodeId cid = id;
    cid.push_back(i);
    t.nodes[id].children.push_back(cid);
    index_rec(t, c, cid, id);
  };
  switch (f->kind) {
    case Conn::Bottom:
      if (!t.bottom_node || id < *t.bottom_node) t.bottom_node = id;
      break;
    case Conn::Atom: break;
    case Conn::Forall:
    case Conn::Exists: child(0, f->left); break;
    default:
      child(0, f->left);
      child(1, f->right);
  }
}

NodeId bind_node(const FormulaTree& t, const NodeId& n, const std::string& x) {
  const auto& nd = t.at(n);
  if (!nd.free.count(x))
    throw std::invalid_argument("variable '" + x + "' not free at node " + node_name(n));
  std::optional<NodeId> cur = nd.parent;
  while (cur) {
    const auto& a = t.at(*cur);
    if ((a.kind == Conn::Forall || a.kind == Conn::Exists) && a.formula->name == x) return *cur;
    cur = a.parent;
  }
  throw std::invalid_argument("no binder for '" + x + "' above node " + node_name(n));
}

FormulaTree index_formula(const FormulaPtr& f) {
  if (!free_vars(f).empty())
    throw NotClosed("formula has free variables: " + print_formula(f));
  FormulaTree t;
  t.root = f;
  index_rec(t, f, {}, std::nullopt);
  for (auto& [id, nd] : t.nodes)
    for (auto& x : nd.free) nd.fv.insert(bind_node(t, id, x));
  return t;
}

bool Binding::covers(const std::set<NodeId>& dom) const {
  for (auto& n : dom)
    if (!map.count(n)) return false;
  return true;
}

Binding Binding::restricted(const std::set<NodeId>& dom) const {
  Binding out;
  for (auto& n : dom) {
    auto it = map.find(n);
    if (it != map.end()) out.map[n] = it->second;
  }
  return out;
}

Binding Binding::overlay(const Binding& a, const Binding& b) {
  Binding out = a;
  for (auto& [k, v] : b.map) out.map.emplace(k, v);
  return out;
}

FormulaPtr instantiate(const FormulaTree& t, const NodeId& n, const Binding& w) {
  const auto& nd = t.at(n);
  std::map<std::string, std::string> sub;
  for (auto& x : nd.free) {
    NodeId b = bind_node(t, n, x);
    auto it = w.map.find(b);
    if (it == w.map.end())
      throw std::invalid_argument("incomplete binding: node " + node_name(b) +
                                  " unbound when instantiating " + node_name(n));
    sub[x] = it->second;
  }
  return substitute(nd.formula, sub);
}

// --------------------------------------------------------------------------
// Matching and emergence
// --------------------------------------------------------------------------

namespace {

bool match_rec(const FormulaPtr& p, const FormulaPtr& q, std::map<std::string, int>& lp,
               std::map<std::string, int>& lq, int depth, Substitution& sigma) {
  if (p->kind != q->kind) return false;
  switch (p->kind) {
    case Conn::Bottom: return true;
    case Conn::Atom: {
      if (p->name != q->name || p->args.size() != q->args.size()) return false;
      for (size_t i = 0; i < p->args.size(); i++) {
        const std::string& a = p->args[i];
        const std::string& b = q->args[i];
        bool ba = lp.count(a), bb = lq.count(b);
        if (ba != bb) return false;
        if (ba) {
          if (lp[a] != lq[b]) return false;
        } else {
          auto it = sigma.find(a);
          if (it == sigma.end())
            sigma[a] = b;
          else if (it->second != b)
            return false;
        }
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      auto sa = lp.count(p->name) ? std::optional<int>(lp[p->name]) : std::nullopt;
      auto sb = lq.count(q->name) ? std::optional<int>(lq[q->name]) : std::nullopt;
      lp[p->name] = depth;
      lq[q->name] = depth;
      bool ok = match_rec(p->left, q->left, lp, lq, depth + 1, sigma);
      if (sa) lp[p->name] = *sa; else lp.erase(p->name);
      if (sb) lq[q->name] = *sb; else lq.erase(q->name);
      return ok;
    }
    default:
      return match_rec(p->left, q->left, lp, lq, depth, sigma) &&
             match_rec(p->right, q->right, lp, lq, depth, sigma);
  }
}

}  // namespace

std::optional<Substitution> match_at(const FormulaTree& t, const NodeId& n,
                                     const FormulaPtr& target) {
  Substitution sigma;
  std::map<std::string, int> lp, lq;
  if (!match_rec(t.at(n).formula, target, lp, lq, 0, sigma)) return std::nullopt;
  return sigma;
}

std::vector<std::pair<NodeId, Substitution>> emerged_from(const FormulaPtr& psi,
                                                          const FormulaTree& t) {
  std::vector<std::pair<NodeId, Substitution>> out;
  for (auto& [id, nd] : t.nodes)
    if (auto sigma = match_at(t, id, psi)) out.emplace_back(id, *sigma);
  return out;
}

namespace {

bool compat_rec(const FormulaPtr& p, const FormulaPtr& q, std::map<std::string, int>& lp,
                std::map<std::string, int>& lq, int depth) {
  if (p->kind != q->kind) return false;
  switch (p->kind) {
    case Conn::Bottom: return true;
    case Conn::Atom: {
      if (p->name != q->name || p->args.size() != q->args.size()) return false;
      for (size_t i = 0; i < p->args.size(); i++) {
        bool ba = lp.count(p->args[i]), bb = lq.count(q->args[i]);
        if (ba != bb) return false;               // bound cannot match an eigenvariable
        if (ba && lp[p->args[i]] != lq[q->args[i]]) return false;
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      auto sa = lp.count(p->name) ? std::optional<int>(lp[p->name]) : std::nullopt;
      auto sb = lq.count(q->name) ? std::optional<int>(lq[q->name]) : std::nullopt;
      lp[p->name] = depth;
      lq[q->name] = depth;
      bool ok = compat_rec(p->left, q->left, lp, lq, depth + 1);
      if (sa) lp[p->name] = *sa; else lp.erase(p->name);
      if (sb) lq[q->name] = *sb; else lq.erase(q->name);
      return ok;
    }
    default:
      return compat_rec(p->left, q->left, lp, lq, depth) &&
             compat_rec(p->right, q->right, lp, lq, depth);
  }
}

}  // namespace

bool nodes_compatible(const FormulaTree& t, const NodeId& a, const NodeId& b) {
  std::map<std::string, int> lp, lq;
  return compat_rec(t.at(a).formula, t.at(b).formula, lp, lq, 0);
}

}  // namespace arcadian
