/*
 * Copyright (c) 2026, the sdn-evb authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SDNEVB_LTL_HPP_
#define SDNEVB_LTL_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sdnevb/state.hpp"

namespace sdnevb {

// Linear-time formulas over runs of the machine. Two kinds of atoms:
//   e(name)   the step taken from the current position is event `name`
//   {name}    the named state predicate holds in the current position
// Connectives: ! && || =>, temporal X F G U R, literals true/false.
//
// A finite maximal run is read as an infinite word stuttering at its last
// state: event atoms are all false there, state predicates keep their final
// values.
enum class LtlOp {
  True,
  False,
  Event,
  Pred,
  Not,
  And,
  Or,
  Implies,
  Next,
  Future,
  Globally,
  Until,
  Release,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  LtlOp op = LtlOp::True;
  std::string name;      // Event, Pred
  FormulaPtr lhs, rhs;   // unary operators use lhs only
};

FormulaPtr ltl_true();
FormulaPtr ltl_false();
FormulaPtr ltl_event(std::string name);
FormulaPtr ltl_pred(std::string name);
FormulaPtr ltl_not(FormulaPtr f);
FormulaPtr ltl_and(FormulaPtr a, FormulaPtr b);
FormulaPtr ltl_or(FormulaPtr a, FormulaPtr b);
FormulaPtr ltl_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr ltl_next(FormulaPtr f);
FormulaPtr ltl_future(FormulaPtr f);
FormulaPtr ltl_globally(FormulaPtr f);
FormulaPtr ltl_until(FormulaPtr a, FormulaPtr b);
FormulaPtr ltl_release(FormulaPtr a, FormulaPtr b);

bool ltl_equal(const FormulaPtr& a, const FormulaPtr& b);

struct LtlParseError : std::runtime_error {
  LtlParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position(position) {}
  std::size_t position;  // 0-based offset into the input
};

// Precedence, loosest first: =>  ||  &&  U/R  (! X F G)  atoms.
// => and U/R associate to the right.
FormulaPtr parse_ltl(std::string_view text);

// Prints a formula that parse_ltl reads back to an equal tree.
std::string print_ltl(const FormulaPtr& f);

// Negation normal form: negations pushed to atoms, F/G/=> rewritten into
// U, R, || and &&.
FormulaPtr nnf(const FormulaPtr& f);

std::set<std::string> event_atoms(const FormulaPtr& f);
std::set<std::string> pred_atoms(const FormulaPtr& f);

// Named state predicates the {name} atoms resolve against.
using PredMap =
    std::map<std::string, std::function<bool(const GlobalState&)>>;

// One position of a run: the state, and the event taken from it (absent at
// the end of a finite maximal run).
struct Letter {
  const GlobalState* state = nullptr;
  std::optional<std::string> event;
};

// A transition of the formula automaton fires on letters satisfying all four
// literal sets.
struct BuchiEdge {
  int target = 0;
  std::set<std::string> eventsTrue;   // letter's event must be each of these
  std::set<std::string> eventsFalse;  // letter's event must be none of these
  std::set<std::string> predsTrue;
  std::set<std::string> predsFalse;

  bool satisfies(const Letter& letter, const PredMap& preds) const;
};

struct BuchiState {
  std::vector<BuchiEdge> edges;
  bool accepting = false;
};

// Nondeterministic Büchi automaton accepting exactly the runs of the formula
// it was built from. State 0 is the sole initial state and reads no letter.
struct BuchiAutomaton {
  std::vector<BuchiState> states;
};

// Tableau construction over the NNF of `f`, then degeneralization.
BuchiAutomaton to_buchi(const FormulaPtr& f);

}  // namespace sdnevb

#endif  // SDNEVB_LTL_HPP_
