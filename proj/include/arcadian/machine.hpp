#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcadian/formula.hpp"

namespace arcadian {

// ---------------------------------------------------------------------------
// The automaton built from a closed formula: states over the syntax tree,
// seven instruction kinds, alternating (AND/OR) acceptance.
// ---------------------------------------------------------------------------

enum class Op { Store, Jmp, New, Check, InstL, InstR, Load };

std::string op_name(Op op);

// For elimination instructions that must agree with the current goal: the
// subformula at `match_node` is matched as a pattern against the goal
// instance; the resulting values (positions of fv(match_node)) seed the
// binding of the eliminated node, and any remaining positions of
// fv(solve_node) are enumerated over V.
struct GuardSpec {
  NodeId match_node;
  NodeId solve_node;
};

struct Instruction {
  Op op = Op::Jmp;
  int pattern = 0;  // 1..21, the instruction-pattern number of the construction
  int state = -1;   // owning state
  int target = -1;  // successor state
  NodeId a, b;      // operands: Store stores `a` and moves to `b`; Jmp/New/InstR
                    // move to `a`; Check compares at `a`; InstL stores `a` and
                    // moves to `b`; Load keeps the current node `a`
  std::optional<GuardSpec> guard;  // patterns 7, 9, 10
  NodeId elim;                     // eliminated node for patterns 8, 9, 11
  int proj_index = 0;              // pattern 7: which conjunct the goal is
};

struct StateInfo {
  std::string name;
  bool universal = false;
  NodeId node;                  // tree node the state belongs to
  std::vector<int> available;   // indices into Automaton::instructions
};

struct Automaton {
  FormulaTree tree;
  std::vector<StateInfo> states;
  std::vector<Instruction> instructions;
  int initial_state = -1;
  NodeId initial_node;

  const StateInfo& state(int q) const { return states.at(q); }
};

// ---------------------------------------------------------------------------
// Instantaneous descriptions and the step relation.
// ---------------------------------------------------------------------------

struct StoreEntry {
  NodeId node;
  Binding v;
  std::string label;  // proof-variable name used when the entry is consumed

  bool operator==(const StoreEntry& o) const = default;
};

struct ID {
  int state = -1;
  NodeId node;
  Binding w;
  Binding waux;                  // auxiliary register (load)
  std::vector<StoreEntry> store;
  std::vector<std::string> V;    // working domain, in creation order

  bool operator==(const ID& o) const = default;
};

// The data resolved when an instruction fires; enough to replay the step and
// to extract a proof term from a run.
struct StepChoice {
  Binding new_w;        // binding of the successor ID
  Binding loaded;       // Load: the auxiliary binding chosen
  std::string eigen;    // New/InstL: fresh variable added to V
  std::string witness;  // InstR / pattern 10: element of V used
  std::string label;    // Store/InstL: label of the new store entry
  int store_index = -1; // Check: which entry matched
};

// All IDs reachable by firing `ins` from `id` (empty when not applicable).
std::vector<std::pair<ID, StepChoice>> successors(const Automaton& aut,
                                                  const Instruction& ins, const ID& id);

// Renames eigenvariables to X1..Xn in first-use order (w, then waux, then V),
// erases store labels and sorts the store.  Idempotent; two IDs equal after
// canonicalization are interchangeable for acceptance.
ID canonicalize(const ID& id);

// Stable key identifying an ID up to renaming of eigenvariables and store
// labels; used for loop detection and failure memoization.
std::string canonical_key(const ID& id);

// Structural invariants of the automaton; empty when well formed.
std::vector<std::string> well_formed(const Automaton& aut);

// ---------------------------------------------------------------------------
// Bounded emptiness search.
// ---------------------------------------------------------------------------

struct RunNode;
using RunPtr = std::shared_ptr<const RunNode>;

struct RunEdge {
  int instruction = -1;
  StepChoice choice;
  RunPtr child;
};

// Accepting run: existential nodes carry exactly one edge, universal nodes
// one edge per available instruction (none at accepting states).
struct RunNode {
  ID id;
  std::vector<RunEdge> edges;
};

struct Budget {
  int max_depth = 24;
  int max_eigen = 3;
};

struct SearchStats {
  std::uint64_t expanded = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t loop_cuts = 0;
};

struct AcceptResult {
  RunPtr run;             // null when not accepting within the budget
  bool exhausted = false; // failure is definite: no budget would help
  SearchStats stats;
};

AcceptResult accepts(const Automaton& aut, const ID& start, const Budget& budget);

// Check that `run` is a well-formed accepting run from its root ID: every
// edge replays as a legal successor and the AND/OR shape is respected.
bool replay_run(const Automaton& aut, const RunPtr& run, std::string* error = nullptr);

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

std::string run_to_json(const Automaton& aut, const RunPtr& run);
RunPtr run_from_json(const Automaton& aut, const std::string& text);  // throws std::runtime_error

std::string automaton_to_dot(const Automaton& aut);
std::string run_to_dot(const Automaton& aut, const RunPtr& run);

}  // namespace arcadian
