#pragma once

#include <string>
#include <vector>

#include "arcadian/machine.hpp"
#include "arcadian/proofterm.hpp"

namespace arcadian {

// Builds the automaton of a closed formula: one existential state per tree
// node, universal decomposition states for ->, /\, forall and exists nodes,
// one elimination state per (goal node, eliminated node) pair, a bottom
// state per node when the formula mentions bot, and a single accepting
// axiom state.  Throws NotClosed on formulas with free variables.
Automaton build_automaton(const FormulaPtr& formula);

// The initial ID <q0, root, empty, empty, empty, empty>.
ID initial_id(const Automaton& aut);

// Translates a derivability question Gamma |- ? : psi into an ID.  Every
// formula of the judgment must have emerged from the root formula of the
// automaton; throws std::invalid_argument otherwise.
ID judgment_to_id(const Automaton& aut, const Context& gamma, const FormulaPtr& psi);

// Human-readable instruction table, one line per instruction, in pattern
// order: "(6) qE@e: jmp e, qA@e".
std::string dump_table(const Automaton& aut);

}  // namespace arcadian
