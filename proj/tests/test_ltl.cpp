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

#include <deque>
#include <tuple>

#include "doctest.h"
#include "sdnevb/checker.hpp"
#include "sdnevb/events.hpp"
#include "sdnevb/ltl.hpp"
#include "sdnevb/scenario.hpp"

namespace sdnevb {
namespace {

// A tiny graph: node i carries marker packet p(i+1) so state predicates can
// tell nodes apart; labels are bare event names.
StateGraph make_graph(int n,
                      const std::vector<std::tuple<int, std::string, int>>& es,
                      std::set<int> truncated = {}) {
  StateGraph g;
  g.states.resize(n);
  g.outEdges.resize(n);
  for (int i = 0; i < n; ++i) {
    g.states[i].pools.packets.insert(PacketId{std::uint32_t(i + 1)});
    g.digests.push_back("n" + std::to_string(i));
  }
  for (const auto& [from, label, to] : es) {
    g.outEdges[from].push_back(int(g.edges.size()));
    g.edges.push_back({from, EventInstance{label, {}}, to});
  }
  g.depth.assign(n, -1);
  g.parent.assign(n, -1);
  g.parentEdge.assign(n, -1);
  g.depth[0] = 0;
  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    for (int e : g.outEdges[node]) {
      const int next = g.edges[e].to;
      if (next != 0 && g.depth[next] < 0) {
        g.depth[next] = g.depth[node] + 1;
        g.parent[next] = node;
        g.parentEdge[next] = e;
        frontier.push_back(next);
      }
    }
  }
  g.truncated = std::move(truncated);
  for (int i = 0; i < n; ++i) {
    if (g.outEdges[i].empty() && g.truncated.count(i) == 0) {
      g.deadlocks.push_back(i);
    }
  }
  return g;
}

// at1, at2, ... name the marker of the node the run currently sits on.
PredMap marker_preds(int n) {
  PredMap preds;
  for (int i = 0; i < n; ++i) {
    preds["at" + std::to_string(i + 1)] = [i](const GlobalState& s) {
      return s.pools.packets.count(PacketId{std::uint32_t(i + 1)}) > 0;
    };
  }
  return preds;
}

void check_lasso_shape(const LtlResult& result) {
  REQUIRE(result.counterexample.has_value());
  const LtlLasso& lasso = *result.counterexample;
  REQUIRE_FALSE(lasso.prefix.empty());
  REQUIRE_FALSE(lasso.cycle.empty());
  CHECK(lasso.prefixEvents.size() == lasso.prefix.size() - 1);
  CHECK(lasso.cycleEvents.size() == lasso.cycle.size() - 1);
  CHECK(lasso.cycle.front() == lasso.prefix.back());
  CHECK(lasso.cycle.back() == lasso.cycle.front());
}

TEST_CASE("formulas print back to what was parsed") {
  for (const std::string text : {
           "e(a)",
           "{ready}",
           "!e(a)",
           "G(e(a) => F(e(b)))",
           "e(a) U ({p} && e(b))",
           "{p} R {q}",
           "X(X(e(a)))",
           "true",
           "false || e(a)",
           "G(e(ctl_emitPkt) => X(e(sw_rcv_machingPkt)))",
       }) {
    const FormulaPtr f = parse_ltl(text);
    CHECK_MESSAGE(ltl_equal(parse_ltl(print_ltl(f)), f), text);
  }
}

TEST_CASE("the grammar binds implication loosest, unary tightest") {
  CHECK(ltl_equal(
      parse_ltl("e(a) => e(b) || e(c) && e(d)"),
      ltl_implies(ltl_event("a"),
                  ltl_or(ltl_event("b"),
                         ltl_and(ltl_event("c"), ltl_event("d"))))));
  CHECK(ltl_equal(parse_ltl("e(a) U e(b) U e(c)"),
                  ltl_until(ltl_event("a"),
                            ltl_until(ltl_event("b"), ltl_event("c")))));
  CHECK(ltl_equal(parse_ltl("e(a) => e(b) => e(c)"),
                  ltl_implies(ltl_event("a"),
                              ltl_implies(ltl_event("b"), ltl_event("c")))));
  CHECK(ltl_equal(parse_ltl("!e(a) U e(b)"),
                  ltl_until(ltl_not(ltl_event("a")), ltl_event("b"))));
  CHECK(ltl_equal(parse_ltl("G e(a) => e(b)"),
                  ltl_implies(ltl_globally(ltl_event("a")), ltl_event("b"))));
  CHECK(ltl_equal(parse_ltl("e(a) U e(b) || e(c)"),
                  ltl_or(ltl_until(ltl_event("a"), ltl_event("b")),
                         ltl_event("c"))));
}

TEST_CASE("parse errors carry a position inside the input") {
  for (const std::string text :
       {"e(", "G", "{never-closed", "e(a) &&", "e(a))", "U e(a)", ""}) {
    try {
      parse_ltl(text);
      FAIL_CHECK("expected a parse error: " << text);
    } catch (const LtlParseError& err) {
      CHECK(err.position <= text.size());
    }
  }
}

TEST_CASE("negation normal form pushes negations onto atoms") {
  std::function<bool(const FormulaPtr&)> normal = [&](const FormulaPtr& f) {
    switch (f->op) {
      case LtlOp::Not:
        return f->lhs->op == LtlOp::Event || f->lhs->op == LtlOp::Pred;
      case LtlOp::Future:
      case LtlOp::Globally:
      case LtlOp::Implies:
        return false;
      default:
        return (!f->lhs || normal(f->lhs)) && (!f->rhs || normal(f->rhs));
    }
  };
  for (const std::string text : {
           "!(e(a) U e(b))",
           "!G(e(a))",
           "!F({p})",
           "!(e(a) => e(b))",
           "!!e(a)",
           "!X(e(a))",
           "G(e(a) => F(e(b)))",
       }) {
    const FormulaPtr converted = nnf(parse_ltl(text));
    CHECK_MESSAGE(normal(converted), text << " -> " << print_ltl(converted));
    // Idempotent.
    CHECK(ltl_equal(nnf(converted), converted));
  }
  CHECK(ltl_equal(nnf(parse_ltl("!(e(a) U e(b))")),
                  ltl_release(ltl_not(ltl_event("a")),
                              ltl_not(ltl_event("b")))));
  CHECK(ltl_equal(nnf(parse_ltl("!!e(a)")), ltl_event("a")));
}

TEST_CASE("atom harvesting sees through the whole tree") {
  const FormulaPtr f = parse_ltl("G({busy} => (e(a) U {idle}) || X(e(b)))");
  CHECK(event_atoms(f) == std::set<std::string>{"a", "b"});
  CHECK(pred_atoms(f) == std::set<std::string>{"busy", "idle"});
}

TEST_CASE("a deadlocked node stutters: no events, frozen predicates") {
  const StateGraph g = make_graph(1, {});
  const PredMap preds = marker_preds(1);
  CHECK(check_ltl(g, parse_ltl("G({at1})"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("G(!e(a))"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("X(X({at1}))"), preds).verdict ==
        LtlVerdict::Holds);
  const LtlResult fails = check_ltl(g, parse_ltl("F(e(a))"), preds);
  CHECK(fails.verdict == LtlVerdict::Fails);
  check_lasso_shape(fails);
  for (const auto& ev : fails.counterexample->cycleEvents) {
    CHECK_FALSE(ev.has_value());
  }
}

TEST_CASE("a finite chain satisfies eventualities reached before its end") {
  const StateGraph g = make_graph(3, {{0, "a", 1}, {1, "b", 2}});
  const PredMap preds = marker_preds(3);
  CHECK(check_ltl(g, parse_ltl("F(e(b))"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("G(e(a) => X(e(b)))"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("{at1} U e(b)"), preds).verdict ==
        LtlVerdict::Holds);
  // at2 already fails at the first position, where only e(a) is taken.
  CHECK(check_ltl(g, parse_ltl("{at2} U e(b)"), preds).verdict ==
        LtlVerdict::Fails);
  CHECK(check_ltl(g, parse_ltl("({at1} || {at2}) U {at3}"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("F({at3} && G(!e(a) && !e(b)))"), preds)
            .verdict == LtlVerdict::Holds);

  const LtlResult fails = check_ltl(g, parse_ltl("F(e(c))"), preds);
  CHECK(fails.verdict == LtlVerdict::Fails);
  check_lasso_shape(fails);
  const LtlLasso& lasso = *fails.counterexample;
  CHECK(lasso.prefix.front() == 0);
  CHECK(lasso.cycle.front() == 2);
  for (const auto& ev : lasso.prefixEvents) CHECK(ev.has_value());
}

TEST_CASE("a loop falsifies an eventuality by circling forever") {
  const StateGraph g = make_graph(2, {{0, "a", 1}, {1, "b", 0}});
  const PredMap preds = marker_preds(2);
  CHECK(check_ltl(g, parse_ltl("G(e(a) || e(b))"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("G(F(e(a)))"), preds).verdict ==
        LtlVerdict::Holds);
  const LtlResult fails = check_ltl(g, parse_ltl("F(e(c))"), preds);
  CHECK(fails.verdict == LtlVerdict::Fails);
  check_lasso_shape(fails);
  // The violating run really circles: its cycle steps carry events.
  for (const auto& ev : fails.counterexample->cycleEvents) {
    CHECK(ev.has_value());
  }

  const LtlResult notAlwaysA = check_ltl(g, parse_ltl("G(e(a))"), preds);
  CHECK(notAlwaysA.verdict == LtlVerdict::Fails);
  bool sawB = false;
  check_lasso_shape(notAlwaysA);
  for (const auto& ev : notAlwaysA.counterexample->cycleEvents) {
    if (ev.has_value() && ev->eventName == "b") sawB = true;
  }
  for (const auto& ev : notAlwaysA.counterexample->prefixEvents) {
    if (ev.has_value() && ev->eventName == "b") sawB = true;
  }
  CHECK(sawB);
}

TEST_CASE("release holds when nothing ever releases") {
  const StateGraph g = make_graph(2, {{0, "a", 1}, {1, "a", 0}});
  const PredMap preds = marker_preds(2);
  CHECK(check_ltl(g, parse_ltl("false R ({at1} || {at2})"), preds).verdict ==
        LtlVerdict::Holds);
  CHECK(check_ltl(g, parse_ltl("false R {at1}"), preds).verdict ==
        LtlVerdict::Fails);
}

TEST_CASE("branching: every maximal run must satisfy the formula") {
  // 0 -a-> 1 (deadlock), 0 -b-> 2 (deadlock).
  const StateGraph g = make_graph(3, {{0, "a", 1}, {0, "b", 2}});
  const PredMap preds = marker_preds(3);
  CHECK(check_ltl(g, parse_ltl("F(e(a)) || F(e(b))"), preds).verdict ==
        LtlVerdict::Holds);
  // The b-branch violates F(e(a)).
  const LtlResult fails = check_ltl(g, parse_ltl("F(e(a))"), preds);
  CHECK(fails.verdict == LtlVerdict::Fails);
  check_lasso_shape(fails);
  CHECK(fails.counterexample->cycle.front() == 2);
}

TEST_CASE("a truncated graph downgrades holds to bound-exceeded") {
  // Node 1 was cut off by a bound: runs through it prove nothing.
  const StateGraph cut = make_graph(3, {{0, "a", 1}, {0, "b", 2}}, {1});
  const PredMap preds = marker_preds(3);
  CHECK(check_ltl(cut, parse_ltl("G(!e(c))"), preds).verdict ==
        LtlVerdict::BoundExceeded);
  CHECK(check_ltl(cut, parse_ltl("F(e(b))"), preds).verdict ==
        LtlVerdict::BoundExceeded);
  // A complete run that violates is still a hard verdict.
  const LtlResult fails = check_ltl(cut, parse_ltl("F(e(a))"), preds);
  CHECK(fails.verdict == LtlVerdict::Fails);
  check_lasso_shape(fails);
  for (int node : fails.counterexample->prefix) CHECK(node != 1);
  for (int node : fails.counterexample->cycle) CHECK(node != 1);
}

TEST_CASE("an unmapped predicate is an error, not a silent false") {
  const StateGraph g = make_graph(1, {});
  CHECK_THROWS_AS(check_ltl(g, parse_ltl("F({nosuch})"), marker_preds(1)),
                  UnknownPredicate);
}

TEST_CASE("the deadlock predicate reads the catalogue") {
  const Scenario scenario = find_scenario("s1");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  const PredMap preds = standard_preds(defs);
  CHECK_FALSE(preds.at("deadlock")(scenario.initial));
  CHECK(preds.at("deadlock")(GlobalState{}));
}

TEST_CASE("verdicts have printable names") {
  CHECK(to_string(LtlVerdict::Holds) == "holds");
  CHECK(to_string(LtlVerdict::Fails) == "fails");
  CHECK(to_string(LtlVerdict::BoundExceeded) == "bound-exceeded");
}

}  // namespace
}  // namespace sdnevb
