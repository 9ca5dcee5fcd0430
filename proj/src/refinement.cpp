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

#include "sdnevb/refinement.hpp"

namespace sdnevb {

namespace {

Level level_below(Level from) {
  switch (from) {
    case Level::L1:
      return Level::L0;
    case Level::L2:
      return Level::L1;
    case Level::L3:
      return Level::L2;
    case Level::L0:
      break;
  }
  throw LevelError("L0 has no level below it");
}

GlobalState collapse_queues(GlobalState s, const Context& ctx) {
  for (auto& [id, sw] : s.switches) {
    for (const auto& [port, queue] : sw.actionsQueues) {
      auto wired = ctx.portToSwitch.find(port);
      if (wired == ctx.portToSwitch.end()) continue;
      for (PacketId pkt : queue) sw.swOPk[pkt].insert(wired->second);
    }
    sw.actionsQueues.clear();
  }
  return s;
}

GlobalState strip_priorities(GlobalState s) {
  for (auto& [id, msg] : s.messageStore) msg.priority.reset();
  return s;
}

}  // namespace

ProjectionMap projection(Level from, const Context& ctx) {
  ProjectionMap pi;
  pi.from = from;
  pi.to = level_below(from);
  pi.events = refines_map(from);
  switch (from) {
    case Level::L1:
      pi.state = [ctx](const GlobalState& s) {
        return collapse_queues(s, ctx);
      };
      break;
    case Level::L2:
      pi.state = [](const GlobalState& s) { return strip_priorities(s); };
      break;
    default:
      pi.state = [](const GlobalState& s) { return s; };
      break;
  }
  return pi;
}

GlobalState project_state(const ProjectionMap& pi, const GlobalState& state) {
  return pi.state(state);
}

GlobalState project_to(Level from, Level to, const Context& ctx,
                       const GlobalState& state) {
  if (to == from) return state;
  if (from < to) {
    throw LevelError("cannot project " + to_string(from) + " up to " +
                     to_string(to));
  }
  GlobalState s = state;
  Level at = from;
  while (to < at) {
    ProjectionMap pi = projection(at, ctx);
    s = project_state(pi, s);
    at = pi.to;
  }
  return s;
}

Trace project_trace(const ProjectionMap& pi, const Trace& trace) {
  Trace out;
  out.initial = project_state(pi, trace.initial);
  GlobalState previous = out.initial;
  for (const auto& step : trace.steps) {
    GlobalState after = project_state(pi, step.after);
    auto mapped = pi.events.find(step.instance.eventName);
    if (mapped == pi.events.end()) {
      if (!(after == previous)) {
        throw RefinementError("unmapped event " + step.instance.eventName +
                              " moved the projected state");
      }
      continue;  // stutter
    }
    EventInstance instance = step.instance;
    instance.eventName = mapped->second;
    out.steps.push_back({std::move(instance), after});
    previous = std::move(after);
  }
  return out;
}

RefinementReport check_refinement(const StateGraph& concrete, Level from,
                                  const Context& ctx) {
  RefinementReport report;
  report.from = from;
  report.to = level_below(from);
  const ProjectionMap pi = projection(from, ctx);
  const auto abstractDefs =
      event_defs(event_catalog(report.to, ctx));

  std::vector<GlobalState> projected;
  projected.reserve(concrete.states.size());
  for (const auto& state : concrete.states) {
    projected.push_back(project_state(pi, state));
  }
  report.checkedStates = projected.size();

  for (std::size_t e = 0; e < concrete.edges.size(); ++e) {
    const auto& edge = concrete.edges[e];
    EventInstance abstractInstance = edge.label;
    auto mapped = pi.events.find(edge.label.eventName);
    if (mapped == pi.events.end()) {
      // No abstract counterpart: the projected step must stutter.
      if (!(projected[edge.from] == projected[edge.to])) {
        report.issues.push_back(
            {"unsimulated-edge", edge.label, static_cast<int>(e),
             "unmapped event moved the projected state"});
      }
      ++report.checkedEdges;
      continue;
    }
    abstractInstance.eventName = mapped->second;
    ++report.checkedEdges;
    try {
      GlobalState landed =
          apply(projected[edge.from], abstractInstance, abstractDefs);
      if (!(landed == projected[edge.to])) {
        auto moved = diff_fields(landed, projected[edge.to]);
        std::string fields;
        for (const auto& f : moved) {
          if (!fields.empty()) fields += ", ";
          fields += f;
        }
        report.issues.push_back({"unsimulated-edge", abstractInstance,
                                 static_cast<int>(e),
                                 "abstract step disagrees on: " + fields});
      }
    } catch (const GuardViolation&) {
      report.issues.push_back({"guard-not-implied", abstractInstance,
                               static_cast<int>(e),
                               "abstract guard rejects the projected step"});
    }
  }
  report.ok = report.issues.empty();
  return report;
}

}  // namespace sdnevb
