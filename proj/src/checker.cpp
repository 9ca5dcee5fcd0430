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

#include "sdnevb/checker.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace sdnevb {

Trace StateGraph::trace_to(int node) const {
  std::vector<int> path;
  for (int at = node; at != -1; at = parent[at]) path.push_back(at);
  std::reverse(path.begin(), path.end());
  Trace trace;
  trace.initial = states.front();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Edge& edge = edges[parentEdge[path[i]]];
    trace.steps.push_back({edge.label, states[path[i]]});
  }
  return trace;
}

namespace {

int worker_count() {
  const char* env = std::getenv("SDN_EVB_WORKERS");
  if (env == nullptr) return 1;
  int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

struct Successor {
  EventInstance instance;
  GlobalState state;
  std::string key;
};

struct NodeExpansion {
  std::vector<Successor> successors;
  bool truncated = false;
  bool deadlock = false;
};

}  // namespace

StateGraph explore(const GlobalState& initial,
                   const std::vector<EventDef>& catalogue,
                   const ExploreOptions& options) {
  StateGraph g;
  std::unordered_map<std::string, int> visited;
  g.states.push_back(initial);
  g.digests.push_back(state_digest(initial));
  g.outEdges.emplace_back();
  g.depth.push_back(0);
  g.parent.push_back(-1);
  g.parentEdge.push_back(-1);
  visited.emplace(canonical_serialize(initial), 0);

  const int workers = worker_count();
  std::vector<int> layer = {0};
  while (!layer.empty()) {
    std::vector<NodeExpansion> expansions(layer.size());
    auto expand = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const int node = layer[i];
        NodeExpansion& out = expansions[i];
        auto enabled = enabled_instances(g.states[node], catalogue);
        if (enabled.empty()) {
          out.deadlock = true;
          continue;
        }
        if (options.maxDepth >= 0 && g.depth[node] >= options.maxDepth) {
          out.truncated = true;
          continue;
        }
        int budget = options.maxBranch >= 0 ? options.maxBranch : INT_MAX;
        for (const auto& instance : enabled) {
          if (budget == 0) {
            out.truncated = true;
            break;
          }
          --budget;
          Successor succ;
          succ.instance = instance;
          succ.state = apply(g.states[node], instance, catalogue);
          succ.key = canonical_serialize(succ.state);
          out.successors.push_back(std::move(succ));
        }
      }
    };
    if (workers == 1 || layer.size() < 2) {
      expand(0, layer.size());
    } else {
      std::vector<std::thread> threads;
      const std::size_t n = layer.size();
      const std::size_t used = std::min<std::size_t>(workers, n);
      for (std::size_t w = 0; w < used; ++w) {
        threads.emplace_back(expand, n * w / used, n * (w + 1) / used);
      }
      for (auto& t : threads) t.join();
    }

    // Sequential merge in node order keeps ids independent of the thread
    // count.
    std::vector<int> nextLayer;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const int node = layer[i];
      NodeExpansion& out = expansions[i];
      if (out.deadlock) g.deadlocks.push_back(node);
      if (out.truncated) g.truncated.insert(node);
      for (Successor& succ : out.successors) {
        auto [it, isNew] =
            visited.emplace(std::move(succ.key),
                            static_cast<int>(g.states.size()));
        const int target = it->second;
        const int edgeId = static_cast<int>(g.edges.size());
        if (isNew) {
          g.states.push_back(std::move(succ.state));
          g.digests.push_back(state_digest(g.states.back()));
          g.outEdges.emplace_back();
          g.depth.push_back(g.depth[node] + 1);
          g.parent.push_back(node);
          g.parentEdge.push_back(edgeId);
          nextLayer.push_back(target);
        }
        g.edges.push_back({node, succ.instance, target});
        g.outEdges[node].push_back(edgeId);
      }
    }
    layer = std::move(nextLayer);
  }
  return g;
}

std::vector<InvariantResult> check_invariants(
    const StateGraph& graph, const std::vector<Invariant>& invariants) {
  std::vector<InvariantResult> results;
  results.reserve(invariants.size());
  for (const auto& invariant : invariants) {
    InvariantResult r;
    r.invariant = invariant.name;
    for (std::size_t node = 0; node < graph.states.size(); ++node) {
      if (auto offence = invariant.check(graph.states[node])) {
        r.holds = false;
        r.detail = offence;
        r.counterexample = graph.trace_to(static_cast<int>(node));
        break;
      }
    }
    r.boundedOnly = r.holds && !graph.complete();
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

Invariant typing_wrapper(std::string name, std::set<std::string> fields,
                         Level level) {
  Invariant inv;
  inv.name = name;
  inv.fields = std::move(fields);
  inv.check = [name, level](
                  const GlobalState& s) -> std::optional<std::string> {
    for (const auto& violation : typing_invariants(s, level)) {
      if (violation.invariant == name) return join(violation.offenders);
    }
    return std::nullopt;
  };
  return inv;
}

}  // namespace

std::vector<Invariant> safety_suite(Level level) {
  std::vector<Invariant> suite;

  {
    Invariant inv;
    inv.name = "data channel packets were switch-sent";
    inv.fields = {"dataChan", "swSentPkts"};
    inv.check = [](const GlobalState& s) -> std::optional<std::string> {
      for (const auto& [pkt, sw] : s.dataChan) {
        if (s.swSentPkts.count(pkt) == 0) {
          return to_string(pkt) + " -> " + to_string(sw);
        }
      }
      return std::nullopt;
    };
    suite.push_back(std::move(inv));
  }
  {
    Invariant inv;
    inv.name = "matched packets were sent by controller or switch";
    inv.fields = {"swIPk", "ctlSentPkts", "swSentPkts"};
    inv.check = [](const GlobalState& s) -> std::optional<std::string> {
      for (const auto& [id, sw] : s.switches) {
        for (const auto& [pkt, entry] : sw.swIPk) {
          if (s.ctlSentPkts.count(pkt) == 0 && s.swSentPkts.count(pkt) == 0) {
            return to_string(pkt) + " @ " + to_string(id);
          }
        }
      }
      return std::nullopt;
    };
    suite.push_back(std::move(inv));
  }
  {
    Invariant inv;
    inv.name = "downstream payloads were controller-sent";
    inv.fields = {"secureChanDown", "messageStore", "ctlSentPkts"};
    inv.check = [](const GlobalState& s) -> std::optional<std::string> {
      for (const auto& [m, sw] : s.secureChanDown) {
        auto it = s.messageStore.find(m);
        if (it == s.messageStore.end()) continue;
        if (it->second.kind == MessageKind::PKOut &&
            it->second.packetPayload.has_value() &&
            s.ctlSentPkts.count(*it->second.packetPayload) == 0) {
          return to_string(*it->second.packetPayload) + " in " + to_string(m);
        }
      }
      return std::nullopt;
    };
    suite.push_back(std::move(inv));
  }

  suite.push_back(typing_wrapper(
      "message ids resolve in messageStore",
      {"secureChanDown", "secureChanUp", "swIncomingMsg", "swOMsg",
       "messageStore"},
      level));
  suite.push_back(typing_wrapper(
      "packet ids resolve in packetStore",
      {"dataChan", "swIPk", "swOPk", "actionsQueues", "ctlIncomingPk",
       "ctlOutgoingPk", "pools.packets", "messageStore", "packetStore"},
      level));
  suite.push_back(
      typing_wrapper("message kind matches payload", {"messageStore"}, level));
  suite.push_back(typing_wrapper(
      "priority present at L2",
      {"messageStore", "secureChanDown", "secureChanUp", "swIncomingMsg",
       "swOMsg"},
      level));
  suite.push_back(
      typing_wrapper("dom(actions)=dom(flowTable)", {"flowTable"}, level));
  suite.push_back(typing_wrapper("per-switch packet buffers disjoint",
                                 {"swIPk", "swOPk", "actionsQueues"}, level));
  suite.push_back(typing_wrapper(
      "message ids unique in flight",
      {"secureChanDown", "secureChanUp", "swIncomingMsg", "swOMsg"}, level));
  return suite;
}

std::string to_string(LtlVerdict verdict) {
  switch (verdict) {
    case LtlVerdict::Holds:
      return "holds";
    case LtlVerdict::Fails:
      return "fails";
    case LtlVerdict::BoundExceeded:
      return "bound-exceeded";
  }
  return "";
}

PredMap standard_preds(const std::vector<EventDef>& catalogue) {
  PredMap preds;
  preds["deadlock"] = [catalogue](const GlobalState& s) {
    return enabled_instances(s, catalogue).empty();
  };
  return preds;
}

namespace {

using ProductId = std::int64_t;
using ProductStep = std::pair<ProductId, std::optional<EventInstance>>;

// The product of the state graph with a formula automaton, explored lazily.
// Genuine deadlocks stutter via a self-loop reading an event-free letter;
// truncated nodes keep only the successors actually explored.
struct Product {
  const StateGraph& graph;
  const BuchiAutomaton& buchi;
  const PredMap& preds;
  const int B;

  Product(const StateGraph& g, const BuchiAutomaton& b, const PredMap& p)
      : graph(g), buchi(b), preds(p), B(static_cast<int>(b.states.size())) {}

  int sysOf(ProductId id) const { return static_cast<int>(id / B); }
  int buchiOf(ProductId id) const { return static_cast<int>(id % B); }
  ProductId idOf(int sys, int b) const {
    return static_cast<ProductId>(sys) * B + b;
  }

  bool accepting(ProductId id) const {
    return buchi.states[buchiOf(id)].accepting;
  }

  std::vector<ProductStep> successors(ProductId id) const {
    const int sys = sysOf(id);
    const int b = buchiOf(id);
    std::vector<std::pair<std::optional<EventInstance>, int>> steps;
    for (int e : graph.outEdges[sys]) {
      steps.emplace_back(graph.edges[e].label, graph.edges[e].to);
    }
    if (graph.outEdges[sys].empty() && graph.truncated.count(sys) == 0) {
      steps.emplace_back(std::nullopt, sys);
    }
    std::vector<ProductStep> out;
    for (const auto& [instance, target] : steps) {
      Letter letter;
      letter.state = &graph.states[sys];
      if (instance) letter.event = instance->eventName;
      for (const auto& edge : buchi.states[b].edges) {
        if (edge.satisfies(letter, preds)) {
          out.emplace_back(idOf(target, edge.target), instance);
        }
      }
    }
    return out;
  }
};

// Tarjan over the reachable product, iterative to keep the stack flat.
std::unordered_map<ProductId, int> strongly_connected(
    const std::vector<ProductId>& order,
    const std::unordered_map<ProductId, std::vector<ProductStep>>& adj,
    std::unordered_map<int, bool>& sccHasEdge) {
  std::unordered_map<ProductId, int> index, low, scc;
  std::vector<ProductId> stack;
  std::unordered_set<ProductId> onStack;
  int nextIndex = 0;
  int nextScc = 0;

  struct Frame {
    ProductId node;
    std::size_t child = 0;
  };
  for (ProductId root : order) {
    if (index.count(root) > 0) continue;
    std::vector<Frame> frames{{root}};
    index[root] = low[root] = nextIndex++;
    stack.push_back(root);
    onStack.insert(root);
    while (!frames.empty()) {
      Frame& frame = frames.back();
      const auto& succs = adj.at(frame.node);
      if (frame.child < succs.size()) {
        ProductId next = succs[frame.child++].first;
        auto it = index.find(next);
        if (it == index.end()) {
          index[next] = low[next] = nextIndex++;
          stack.push_back(next);
          onStack.insert(next);
          frames.push_back({next});
        } else if (onStack.count(next) > 0) {
          low[frame.node] = std::min(low[frame.node], it->second);
        }
        continue;
      }
      if (low[frame.node] == index[frame.node]) {
        const int id = nextScc++;
        while (true) {
          ProductId member = stack.back();
          stack.pop_back();
          onStack.erase(member);
          scc[member] = id;
          if (member == frame.node) break;
        }
      }
      ProductId done = frame.node;
      frames.pop_back();
      if (!frames.empty()) {
        low[frames.back().node] = std::min(low[frames.back().node], low[done]);
      }
    }
  }
  for (const auto& [node, steps] : adj) {
    for (const auto& [target, instance] : steps) {
      if (scc.at(node) == scc.at(target)) sccHasEdge[scc.at(node)] = true;
    }
  }
  return scc;
}

}  // namespace

LtlResult check_ltl(const StateGraph& graph, const FormulaPtr& formula,
                    const PredMap& preds) {
  LtlResult result;
  result.formula = print_ltl(formula);
  for (const auto& name : pred_atoms(formula)) {
    if (preds.count(name) == 0) {
      throw UnknownPredicate("unknown state predicate {" + name + "}");
    }
  }
  const BuchiAutomaton buchi = to_buchi(ltl_not(formula));
  const Product product(graph, buchi, preds);

  // Reachability from (initial state, initial automaton state), recording
  // BFS parents for the stem of a potential counterexample.
  const ProductId start = product.idOf(0, 0);
  std::unordered_map<ProductId, std::vector<ProductStep>> adj;
  std::unordered_map<ProductId, ProductStep> parent;
  std::vector<ProductId> order;
  std::deque<ProductId> queue{start};
  parent.emplace(start, ProductStep{-1, std::nullopt});
  while (!queue.empty()) {
    ProductId at = queue.front();
    queue.pop_front();
    order.push_back(at);
    auto [it, isNew] = adj.emplace(at, std::vector<ProductStep>{});
    if (isNew) it->second = product.successors(at);
    for (const auto& [next, instance] : it->second) {
      if (parent.emplace(next, ProductStep{at, instance}).second) {
        queue.push_back(next);
      }
    }
  }

  std::unordered_map<int, bool> sccHasEdge;
  const auto scc = strongly_connected(order, adj, sccHasEdge);

  // The first accepting node (in BFS order) sitting on a cycle seeds the
  // lasso; BFS order keeps the stem short and the result deterministic.
  ProductId seed = -1;
  for (ProductId node : order) {
    if (product.accepting(node) && sccHasEdge.count(scc.at(node)) > 0 &&
        sccHasEdge.at(scc.at(node))) {
      seed = node;
      break;
    }
  }
  if (seed == -1) {
    result.verdict =
        graph.complete() ? LtlVerdict::Holds : LtlVerdict::BoundExceeded;
    return result;
  }

  LtlLasso lasso;
  {
    std::vector<ProductId> stem;
    std::vector<std::optional<EventInstance>> events;
    for (ProductId at = seed; at != -1;) {
      stem.push_back(at);
      const auto& [prev, instance] = parent.at(at);
      if (prev != -1) events.push_back(instance);
      at = prev;
    }
    std::reverse(stem.begin(), stem.end());
    std::reverse(events.begin(), events.end());
    for (ProductId node : stem) lasso.prefix.push_back(product.sysOf(node));
    lasso.prefixEvents = std::move(events);
  }
  {
    // Shortest cycle through the seed, staying inside its component.
    const int home = scc.at(seed);
    std::unordered_map<ProductId, ProductStep> back;
    std::deque<ProductId> search{seed};
    std::optional<ProductStep> closing;
    while (!search.empty() && !closing) {
      ProductId at = search.front();
      search.pop_front();
      for (const auto& [next, instance] : adj.at(at)) {
        if (scc.at(next) != home) continue;
        if (next == seed) {
          closing = ProductStep{at, instance};
          break;
        }
        if (back.emplace(next, ProductStep{at, instance}).second) {
          search.push_back(next);
        }
      }
    }
    std::vector<ProductId> cycle{seed};
    std::vector<std::optional<EventInstance>> events{closing->second};
    for (ProductId at = closing->first; at != seed;) {
      cycle.push_back(at);
      const auto& [prev, instance] = back.at(at);
      events.push_back(instance);
      at = prev;
    }
    cycle.push_back(seed);
    std::reverse(cycle.begin(), cycle.end());
    std::reverse(events.begin(), events.end());
    for (ProductId node : cycle) lasso.cycle.push_back(product.sysOf(node));
    lasso.cycleEvents = std::move(events);
  }
  result.verdict = LtlVerdict::Fails;
  result.counterexample = std::move(lasso);
  return result;
}

}  // namespace sdnevb
