#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "dagot/rng.hpp"
#include "dagot/taskgraph.hpp"

// Event-driven execution of one DAG task on m dedicated cores under a
// greedy, work-conserving, non-preemptive list scheduler: a node becomes
// ready when all predecessors finish, and whenever a core idles while ready
// nodes wait, the highest-priority ready node starts immediately and runs
// to completion. Simulated time is real-valued; simultaneous events are
// processed in (time, core index) order with finishes before starts.
namespace dagot {

enum class TieBreak {
  downstream,  // longest remaining downstream path (own cost included), then
               // smallest NodeId — a conventional strong list-scheduling policy
  random,      // seeded uniform choice among ready nodes
};

inline const char* to_string(TieBreak t) {
  return t == TieBreak::downstream ? "downstream" : "random";
}

struct SimEvent {
  double time = 0.0;
  int core = -1;
  NodeId node = -1;
  bool start = false;  // false = finish
};

struct SimTrace {
  std::vector<SimEvent> events;
  double makespan = 0.0;
  std::vector<double> per_core_busy;
};

struct SimConfig {
  TieBreak tie_break = TieBreak::downstream;
  uint64_t seed = 0;       // random tie-break stream
  double early_floor = 1.0;  // < 1 scales each node's duration by a uniform
                             // factor in [early_floor, 1] to exercise
                             // robustness against early completion
};

inline SimTrace simulate(const TaskGraph& g, int m, const SimConfig& cfg = {}) {
  if (m < 1) throw std::invalid_argument("simulate: need at least one core");
  if (detect_cycle(g)) throw structural_error("simulate: graph has a cycle");

  const size_t n = g.nodes.size();
  std::vector<double> duration(n, 0.0);
  Rng early_rng(sub_seed(cfg.seed, "sim-early"));
  for (size_t v = 0; v < n; ++v) {
    if (!g.nodes[v].alive) continue;
    duration[v] = g.node_cost(static_cast<NodeId>(v));
    if (cfg.early_floor < 1.0)
      duration[v] *= early_rng.uniform_real(cfg.early_floor, 1.0);
  }

  // Downstream priority: longest path to the sink through each node.
  std::vector<double> down(n, 0.0);
  if (cfg.tie_break == TieBreak::downstream) {
    std::vector<NodeId> order = topological_order(g);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId v = *it;
      double best = 0.0;
      for (NodeId w : g.succ[static_cast<size_t>(v)])
        best = std::max(best, down[static_cast<size_t>(w)]);
      down[static_cast<size_t>(v)] = best + duration[static_cast<size_t>(v)];
    }
  }

  Rng pick_rng(sub_seed(cfg.seed, "sim-pick"));
  std::vector<int> indeg(n, 0);
  std::vector<NodeId> ready;  // kept sorted by NodeId
  size_t remaining = 0;
  for (size_t v = 0; v < n; ++v) {
    if (!g.nodes[v].alive) continue;
    ++remaining;
    indeg[v] = static_cast<int>(g.pred[v].size());
    if (indeg[v] == 0) ready.push_back(static_cast<NodeId>(v));
  }
  auto push_ready = [&](NodeId v) {
    ready.insert(std::lower_bound(ready.begin(), ready.end(), v), v);
  };
  auto take_next = [&]() -> NodeId {
    size_t at = 0;
    if (cfg.tie_break == TieBreak::downstream) {
      for (size_t i = 1; i < ready.size(); ++i) {
        // strict > keeps the smallest NodeId among equal priorities
        if (down[static_cast<size_t>(ready[i])] > down[static_cast<size_t>(ready[at])])
          at = i;
      }
    } else {
      at = static_cast<size_t>(
          pick_rng.uniform_int(0, static_cast<int64_t>(ready.size()) - 1));
    }
    NodeId v = ready[at];
    ready.erase(ready.begin() + static_cast<long>(at));
    return v;
  };

  struct Running {
    double finish;
    int core;
    NodeId node;
    bool operator>(const Running& o) const {
      if (finish != o.finish) return finish > o.finish;
      return core > o.core;
    }
  };
  std::priority_queue<Running, std::vector<Running>, std::greater<Running>> running;
  std::vector<bool> core_idle(static_cast<size_t>(m), true);

  SimTrace trace;
  trace.per_core_busy.assign(static_cast<size_t>(m), 0.0);
  double now = 0.0;

  auto start_ready = [&] {
    for (int c = 0; c < m && !ready.empty(); ++c) {
      if (!core_idle[static_cast<size_t>(c)]) continue;
      NodeId v = take_next();
      core_idle[static_cast<size_t>(c)] = false;
      trace.events.push_back({now, c, v, true});
      trace.per_core_busy[static_cast<size_t>(c)] += duration[static_cast<size_t>(v)];
      running.push({now + duration[static_cast<size_t>(v)], c, v});
    }
  };

  start_ready();
  while (!running.empty()) {
    now = running.top().finish;
    while (!running.empty() && running.top().finish == now) {
      Running r = running.top();
      running.pop();
      core_idle[static_cast<size_t>(r.core)] = true;
      trace.events.push_back({now, r.core, r.node, false});
      --remaining;
      for (NodeId w : g.succ[static_cast<size_t>(r.node)])
        if (--indeg[static_cast<size_t>(w)] == 0) push_ready(w);
    }
    trace.makespan = now;
    start_ready();
  }
  if (remaining != 0) throw structural_error("simulate: unreachable nodes");
  return trace;
}

// Work-conserving list schedulers finish within L + (C - L) / m: whenever
// some core idles, a critical-path node is running, so idle time across the
// run is bounded by (m - 1) * L. Checked with a small float tolerance.
inline bool check_graham(const SimTrace& trace, const TaskGraph& g, int m) {
  double L = critical_path(g).length;
  double C = workload(g);
  return trace.makespan <= L + (C - L) / static_cast<double>(m) + 1e-9;
}

// Total busy time across cores; equals the graph workload exactly when every
// node runs for its full worst-case duration.
inline double measure_workload(const SimTrace& trace) {
  double c = 0.0;
  for (double b : trace.per_core_busy) c += b;
  return c;
}

}  // namespace dagot
