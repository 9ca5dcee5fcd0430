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

#include "sdnevb/runner.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "sdnevb/decomposer.hpp"
#include "sdnevb/events.hpp"
#include "sdnevb/ltl.hpp"
#include "sdnevb/refinement.hpp"
#include "sdnevb/scenario.hpp"
#include "sdnevb/scheduler.hpp"

namespace sdnevb {

namespace {

std::string trim_copy(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace

std::vector<FormulaSpec> parse_formula_file(const std::string& text) {
  std::vector<FormulaSpec> specs;
  std::istringstream lines(text);
  std::string raw;
  int lineNo = 0;
  while (std::getline(lines, raw)) {
    ++lineNo;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    std::string line = trim_copy(raw);
    if (line.empty()) continue;
    const std::string where = "formula line " + std::to_string(lineNo) + ": ";

    FormulaSpec spec;
    if (line.rfind("policy ", 0) == 0) {
      spec.policyOnly = true;
      line = trim_copy(line.substr(7));
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw FormulaFileError(where + "expected 'name: formula'");
    }
    spec.name = trim_copy(line.substr(0, colon));
    spec.text = trim_copy(line.substr(colon + 1));
    if (spec.name.empty() || spec.text.empty()) {
      throw FormulaFileError(where + "expected 'name: formula'");
    }
    try {
      parse_ltl(spec.text);
    } catch (const LtlParseError& error) {
      throw FormulaFileError(where + error.what());
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<FormulaSpec> load_formulas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormulaFileError("cannot read formula file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_formula_file(text.str());
}

namespace {

std::optional<SchedulingPolicy> parse_policy(const std::string& name,
                                             std::uint64_t seed) {
  if (name == "exhaustive") return SchedulingPolicy{Exhaustive{}};
  if (name == "seeded-random") return SchedulingPolicy{SeededRandom{seed}};
  if (name == "priority-then-seed") {
    return SchedulingPolicy{PriorityThenSeed{seed}};
  }
  return std::nullopt;
}

void print_trace(std::ostream& out, const std::string& indent,
                 const Trace& trace) {
  out << indent << "start " << state_digest(trace.initial) << "\n";
  int n = 0;
  for (const auto& step : trace.steps) {
    out << indent << "step " << ++n << " " << to_string(step.instance)
        << " -> " << state_digest(step.after) << "\n";
  }
}

void print_lasso(std::ostream& out, const StateGraph& graph,
                 const LtlLasso& lasso) {
  auto leg = [&](const std::vector<int>& nodes,
                 const std::vector<std::optional<EventInstance>>& events,
                 const std::string& label) {
    out << "    " << label << ": start " << graph.digests[nodes.front()]
        << "\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
      out << "    " << label << ": "
          << (events[i] ? to_string(*events[i]) : "(end)") << " -> "
          << graph.digests[nodes[i + 1]] << "\n";
    }
  };
  leg(lasso.prefix, lasso.prefixEvents, "prefix");
  leg(lasso.cycle, lasso.cycleEvents, "cycle");
}

struct SimulationRun {
  Trace trace;
  bool deadlocked = false;
};

SimulationRun simulate_run(const Scenario& scenario, Level level,
                           SchedulingPolicy policy, int steps) {
  const auto defs = event_defs(event_catalog(level, scenario.ctx));
  Scheduler scheduler(policy);
  SimulationRun run;
  run.trace.initial = scenario.initial;
  GlobalState state = scenario.initial;
  const int budget = std::max(steps, 0);
  for (int n = 0; n < budget && !run.deadlocked; ++n) {
    const auto enabled = enabled_instances(state, defs);
    if (enabled.empty()) {
      run.deadlocked = true;
      break;
    }
    const auto choice = scheduler.pick(enabled, state);
    state = apply(state, *choice, defs);
    run.trace.steps.push_back({*choice, state});
  }
  // A run that spends its budget on a final deadlock still ended for real.
  if (!run.deadlocked) {
    run.deadlocked = enabled_instances(state, defs).empty();
  }
  return run;
}

// A simulated run viewed as a graph: one node per position, so the LTL
// checker can replay the same verdict machinery on a single path.
StateGraph linear_graph(const SimulationRun& run) {
  StateGraph g;
  g.states.push_back(run.trace.initial);
  for (const auto& step : run.trace.steps) g.states.push_back(step.after);
  const int n = static_cast<int>(g.states.size());
  g.outEdges.resize(n);
  for (int i = 0; i < n; ++i) {
    g.digests.push_back(state_digest(g.states[i]));
    g.depth.push_back(i);
    g.parent.push_back(i - 1);
    g.parentEdge.push_back(i - 1);
  }
  for (int i = 0; i + 1 < n; ++i) {
    g.outEdges[i].push_back(static_cast<int>(g.edges.size()));
    g.edges.push_back({i, run.trace.steps[i].instance, i + 1});
  }
  if (run.deadlocked) {
    g.deadlocks.push_back(n - 1);
  } else {
    g.truncated.insert(n - 1);
  }
  return g;
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const std::exception& error) {
    err << "error: " << error.what() << "\n";
    return kExitUsage;
  }
}

std::string policy_name(const RunnerOptions& options) {
  return options.policy.value_or("priority-then-seed");
}

}  // namespace

int run_simulate(const RunnerOptions& options, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = find_scenario(options.scenario);
    const auto policy = parse_policy(policy_name(options), options.seed);
    if (!policy) {
      err << "error: unknown policy: " << policy_name(options) << "\n";
      return kExitUsage;
    }
    if (std::holds_alternative<Exhaustive>(*policy)) {
      err << "error: simulate needs a seeded policy\n";
      return kExitUsage;
    }
    const auto run =
        simulate_run(scenario, options.level, *policy, options.steps);

    out << "sdn-evb-trace 1\n";
    out << "scenario " << scenario.name << "\n";
    out << "level " << to_string(options.level) << "\n";
    out << "policy " << policy_name(options) << " seed " << options.seed
        << "\n";
    print_trace(out, "", run.trace);
    out << "end " << (run.deadlocked ? "deadlock" : "step-limit")
        << " steps=" << run.trace.steps.size() << "\n";

    const auto defs =
        event_defs(event_catalog(options.level, scenario.ctx));
    if (!validate_trace(run.trace, defs)) {
      err << "error: produced trace does not replay\n";
      return kExitUsage;
    }
    return kExitOk;
  });
}

int run_explore(const RunnerOptions& options, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = find_scenario(options.scenario);
    const auto defs =
        event_defs(event_catalog(options.level, scenario.ctx));
    const StateGraph graph = explore(scenario.initial, defs, options.bounds);
    out << "sdn-evb-explore 1\n";
    out << "scenario " << scenario.name << "\n";
    out << "level " << to_string(options.level) << "\n";
    out << "states " << graph.states.size() << "\n";
    out << "edges " << graph.edges.size() << "\n";
    out << "deadlocks " << graph.deadlocks.size() << "\n";
    out << "truncated " << graph.truncated.size() << "\n";
    out << "complete " << (graph.complete() ? "yes" : "no") << "\n";
    out << "initial " << graph.digests.front() << "\n";
    return kExitOk;
  });
}

int run_check(const RunnerOptions& options, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = find_scenario(options.scenario);
    const auto catalogue = event_catalog(options.level, scenario.ctx);
    const auto defs = event_defs(catalogue);
    const StateGraph graph = explore(scenario.initial, defs, options.bounds);
    out << "checked states=" << graph.states.size()
        << " edges=" << graph.edges.size()
        << " complete=" << (graph.complete() ? "yes" : "no") << "\n";

    bool failed = false;
    for (const auto& result :
         check_invariants(graph, safety_suite(options.level))) {
      out << "safety " << result.invariant << ": ";
      if (result.holds) {
        out << (result.boundedOnly ? "holds (bounded)" : "holds") << "\n";
        continue;
      }
      failed = true;
      out << "fails";
      if (result.detail) out << " (" << *result.detail << ")";
      out << "\n";
      if (result.counterexample) {
        print_trace(out, "    ", *result.counterexample);
      }
    }

    std::vector<FormulaSpec> specs;
    if (options.formulasPath) specs = load_formulas(*options.formulasPath);
    const PredMap preds = standard_preds(defs);
    for (const auto& spec : specs) {
      if (spec.policyOnly) continue;
      const auto result = check_ltl(graph, parse_ltl(spec.text), preds);
      out << "ltl " << spec.name << ": " << to_string(result.verdict) << "\n";
      if (result.verdict == LtlVerdict::Fails) {
        failed = true;
        print_lasso(out, graph, *result.counterexample);
      }
    }

    if (options.policy && !specs.empty()) {
      const auto policy = parse_policy(*options.policy, options.seed);
      if (!policy) {
        err << "error: unknown policy: " << *options.policy << "\n";
        return kExitUsage;
      }
      if (std::holds_alternative<Exhaustive>(*policy)) {
        err << "error: the policy report needs a seeded policy\n";
        return kExitUsage;
      }
      const auto run =
          simulate_run(scenario, options.level, *policy, options.steps);
      const StateGraph path = linear_graph(run);
      out << "policy run " << *options.policy << " seed=" << options.seed
          << " steps=" << run.trace.steps.size()
          << (run.deadlocked ? " (deadlock)" : " (step-limit)") << "\n";
      // Informational: a verdict about one scheduled run, not the machine.
      for (const auto& spec : specs) {
        const auto result = check_ltl(path, parse_ltl(spec.text), preds);
        out << "policy " << spec.name << ": " << to_string(result.verdict)
            << "\n";
        if (result.verdict == LtlVerdict::Fails) {
          print_lasso(out, path, *result.counterexample);
        }
      }
    }

    return failed ? kExitPropertyFailure : kExitOk;
  });
}

int run_refine_check(const RunnerOptions& options, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    if (options.level == Level::L0) {
      err << "error: refine-check needs a level above L0\n";
      return kExitUsage;
    }
    const Scenario scenario = find_scenario(options.scenario);
    const auto defs =
        event_defs(event_catalog(options.level, scenario.ctx));
    const StateGraph graph = explore(scenario.initial, defs, options.bounds);
    const RefinementReport report =
        check_refinement(graph, options.level, scenario.ctx);
    out << "refinement " << to_string(report.from) << " -> "
        << to_string(report.to) << ": " << (report.ok ? "ok" : "fails")
        << " states=" << report.checkedStates
        << " edges=" << report.checkedEdges << "\n";
    const std::size_t shown = std::min<std::size_t>(report.issues.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& issue = report.issues[i];
      out << "    " << issue.kind << " at " << to_string(issue.instance)
          << ": " << issue.detail << "\n";
    }
    if (report.issues.size() > shown) {
      out << "    ... and " << report.issues.size() - shown << " more\n";
    }
    return report.ok ? kExitOk : kExitPropertyFailure;
  });
}

namespace {

ExternalUniverse scenario_universe(const Scenario& scenario) {
  ExternalUniverse universe;
  universe.headers = scenario.headerUniverse;
  universe.ports = scenario.portUniverse;
  std::set<EntryId> ids;
  for (const auto& [sw, state] : scenario.initial.switches) {
    for (const auto& [id, entry] : state.flowTable) ids.insert(id);
  }
  for (const auto& order : scenario.initial.controller.pendingOrders) {
    ids.insert(order.entry.id);
  }
  for (const auto& [id, message] : scenario.initial.messageStore) {
    if (message.entryPayload) ids.insert(message.entryPayload->id);
  }
  ids.insert(scenario.initial.pools.entries.begin(),
             scenario.initial.pools.entries.end());
  universe.entryIds.assign(ids.begin(), ids.end());
  return universe;
}

}  // namespace

int run_decompose_check(const RunnerOptions& options, std::ostream& out,
                        std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scenario = find_scenario(options.scenario);
    const Decomposition parts = decompose(options.level, scenario.ctx,
                                          scenario_universe(scenario));
    const RecompositionReport report = check_recomposition(
        parts, options.level, scenario.ctx, scenario.initial, options.bounds);
    out << "decomposition at " << to_string(options.level) << ": "
        << (report.ok ? "ok" : "fails") << "\n";
    out << "    composed=" << report.composedStates
        << " recomposed=" << report.recomposedStates
        << " controller=" << report.controllerStates
        << " switches=" << report.switchesStates << "\n";
    for (const auto& issue : report.issues) out << "    " << issue << "\n";
    return report.ok ? kExitOk : kExitPropertyFailure;
  });
}

int run_mode(const std::string& mode, const RunnerOptions& options,
             std::ostream& out, std::ostream& err) {
  if (mode == "simulate") return run_simulate(options, out, err);
  if (mode == "explore") return run_explore(options, out, err);
  if (mode == "check") return run_check(options, out, err);
  if (mode == "refine-check") return run_refine_check(options, out, err);
  if (mode == "decompose-check") return run_decompose_check(options, out, err);
  err << "error: unknown mode: " << mode << "\n";
  return kExitUsage;
}

}  // namespace sdnevb
