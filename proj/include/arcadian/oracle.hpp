#pragma once

#include <stdexcept>

#include "arcadian/formula.hpp"

namespace arcadian {

struct NotPropositional : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Decides intuitionistic provability of a closed propositional formula with a
// contraction-free sequent calculus; terminates without fuel.  Throws
// NotPropositional on quantifiers or non-0-ary atoms.
bool decide_prop(const FormulaPtr& phi);

}  // namespace arcadian
