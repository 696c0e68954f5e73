#pragma once

#include <string>

#include "arcadian/construction.hpp"
#include "arcadian/machine.hpp"
#include "arcadian/proofterm.hpp"

namespace arcadian {

enum class ProveOutcome { Proved, NotFoundWithinFuel, Exhausted };

struct ProveResult {
  ProveOutcome outcome = ProveOutcome::NotFoundWithinFuel;
  RunPtr run;        // set when Proved
  TermPtr term;      // eta-long proof term, verified by the checker
  TermPtr raw_term;  // direct extraction output before eta-expansion
  int depth_used = 0;
  SearchStats stats;
};

// Full pipeline: bounded emptiness search (iterative deepening on depth, the
// eigenvariable cap fixed), proof-term extraction, eta-expansion to long
// normal form, and verification with the independent checker.  Throws
// std::logic_error if an extracted term fails verification.
ProveResult prove(const Automaton& aut, const Budget& budget);

// Structural extraction of a proof term from an accepting run.
TermPtr extract(const Automaton& aut, const RunPtr& run);

// Checks |- m : phi with the independent natural-deduction checker.
bool verify(const FormulaPtr& phi, const TermPtr& m);

// Emergence invariant: the goal instance of every ID in the run and every
// store-entry instance emerged from the root formula.
bool check_emergence(const Automaton& aut, const RunPtr& run);

}  // namespace arcadian
