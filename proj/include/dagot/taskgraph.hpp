#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagot/wceto.hpp"

// DAG task representation. A node is a triple (executable object, thread
// count, WCETO function); the function is shared by every node naming the
// same object. Node handles stay stable across collapses: an absorbed node
// is tombstoned (alive = false), never reindexed, so merge histories and
// tie-breaking remain meaningful on the original identifiers.
namespace dagot {

using NodeId = int;

struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  int ext_id = -1;  // identifier used in files/traces; internal NodeId is the index
  ObjectId object = -1;
  int threads = 1;
  bool pseudo = false;  // zero-cost structural source/sink added by augmentation
  bool alive = true;
};

struct TaskGraph {
  std::vector<Node> nodes;                    // NodeId == index
  std::vector<std::vector<NodeId>> succ;      // sorted, unique, alive endpoints
  std::vector<std::vector<NodeId>> pred;
  std::map<ObjectId, WcetoFn> objects;
  NodeId source = -1;
  NodeId sink = -1;

  int alive_count() const {
    int n = 0;
    for (const Node& v : nodes) n += v.alive ? 1 : 0;
    return n;
  }

  double node_cost(NodeId v) const {
    const Node& n = nodes[static_cast<size_t>(v)];
    return eval(objects.at(n.object), n.threads);
  }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& s = succ[static_cast<size_t>(a)];
    return std::binary_search(s.begin(), s.end(), b);
  }

  void add_edge(NodeId a, NodeId b) {
    auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) {
      auto it = std::lower_bound(v.begin(), v.end(), x);
      if (it == v.end() || *it != x) v.insert(it, x);
    };
    insert_sorted(succ[static_cast<size_t>(a)], b);
    insert_sorted(pred[static_cast<size_t>(b)], a);
  }
};

// Unaugmented input: node list plus edge list over node indices.
struct RawGraph {
  std::map<ObjectId, WcetoFn> objects;
  std::vector<Node> nodes;
  std::vector<std::array<NodeId, 2>> edges;
};

// Cycle check by iterative three-color depth-first search over alive nodes.
inline bool detect_cycle(const TaskGraph& g) {
  const size_t n = g.nodes.size();
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::pair<NodeId, size_t>> stack;
  for (size_t start = 0; start < n; ++start) {
    if (!g.nodes[start].alive || color[start] != 0) continue;
    stack.push_back({static_cast<NodeId>(start), 0});
    color[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& out = g.succ[static_cast<size_t>(v)];
      if (next < out.size()) {
        NodeId w = out[next++];
        if (color[static_cast<size_t>(w)] == 1) return true;
        if (color[static_cast<size_t>(w)] == 0) {
          color[static_cast<size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        color[static_cast<size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

inline bool detect_cycle(size_t n_nodes, const std::vector<std::array<NodeId, 2>>& edges) {
  TaskGraph g;
  g.nodes.resize(n_nodes);
  g.succ.resize(n_nodes);
  g.pred.resize(n_nodes);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return detect_cycle(g);
}

// Deterministic topological order: Kahn's algorithm, smallest NodeId first
// among ready nodes. Alive nodes only.
inline std::vector<NodeId> topological_order(const TaskGraph& g) {
  const size_t n = g.nodes.size();
  std::vector<int> indeg(n, 0);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<NodeId>> ready;
  size_t alive = 0;
  for (size_t v = 0; v < n; ++v) {
    if (!g.nodes[v].alive) continue;
    ++alive;
    indeg[v] = static_cast<int>(g.pred[v].size());
    if (indeg[v] == 0) ready.push(static_cast<NodeId>(v));
  }
  std::vector<NodeId> order;
  order.reserve(alive);
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId w : g.succ[static_cast<size_t>(v)])
      if (--indeg[static_cast<size_t>(w)] == 0) ready.push(w);
  }
  if (order.size() != alive) throw structural_error("topological_order: graph has a cycle");
  return order;
}

// Builds a TaskGraph from a raw collection, adding a zero-cost pseudo source
// (or sink) with a unique pseudo-object when the input has several. A graph
// that already has exactly one source and one sink is kept as-is. Pseudo
// nodes never participate in collapses.
inline TaskGraph augment_source_sink(const RawGraph& raw) {
  if (raw.nodes.empty()) throw structural_error("augment_source_sink: empty graph");
  TaskGraph g;
  g.objects = raw.objects;
  g.nodes = raw.nodes;
  const size_t n = g.nodes.size();
  g.succ.assign(n, {});
  g.pred.assign(n, {});
  for (auto [a, b] : raw.edges) {
    if (a < 0 || b < 0 || static_cast<size_t>(a) >= n || static_cast<size_t>(b) >= n)
      throw structural_error("augment_source_sink: edge endpoint out of range");
    if (a == b) throw structural_error("augment_source_sink: self loop");
    g.add_edge(a, b);
  }
  if (detect_cycle(g)) throw structural_error("augment_source_sink: input contains a cycle");

  std::vector<NodeId> sources, sinks;
  int max_ext = -1;
  for (size_t v = 0; v < n; ++v) {
    if (g.pred[v].empty()) sources.push_back(static_cast<NodeId>(v));
    if (g.succ[v].empty()) sinks.push_back(static_cast<NodeId>(v));
    max_ext = std::max(max_ext, g.nodes[v].ext_id);
  }
  ObjectId next_obj = g.objects.empty() ? 0 : g.objects.rbegin()->first + 1;

  auto add_pseudo = [&](bool as_source, const std::vector<NodeId>& ends) {
    Node p;
    p.ext_id = ++max_ext;
    p.object = next_obj++;
    p.threads = 1;
    p.pseudo = true;
    g.objects.emplace(p.object, WcetoFn::table({0.0}));
    NodeId id = static_cast<NodeId>(g.nodes.size());
    g.nodes.push_back(p);
    g.succ.emplace_back();
    g.pred.emplace_back();
    for (NodeId e : ends) {
      if (as_source)
        g.add_edge(id, e);
      else
        g.add_edge(e, id);
    }
    return id;
  };

  g.source = sources.size() == 1 ? sources[0] : add_pseudo(true, sources);
  g.sink = sinks.size() == 1 ? sinks[0] : add_pseudo(false, sinks);
  return g;
}

// After a collapse the unique-source/sink property is preserved (pseudo
// nodes are never merged), but the stored handles must be revalidated when
// graphs are loaded from files.
inline void locate_endpoints(TaskGraph& g) {
  std::vector<NodeId> sources, sinks;
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.nodes[v].alive) continue;
    if (g.pred[v].empty()) sources.push_back(static_cast<NodeId>(v));
    if (g.succ[v].empty()) sinks.push_back(static_cast<NodeId>(v));
  }
  if (sources.size() != 1 || sinks.size() != 1)
    throw structural_error("graph must have exactly one source and one sink");
  g.source = sources[0];
  g.sink = sinks[0];
}

struct CriticalPath {
  std::vector<NodeId> path;  // source to sink
  double length = 0.0;
};

// Maximum-weight source-to-sink path under node weights c_v(eta_v), by
// dynamic programming over a topological order. Ties at equal length take
// the smallest predecessor NodeId, so the returned path is deterministic.
inline CriticalPath critical_path(const TaskGraph& g) {
  std::vector<NodeId> order = topological_order(g);
  const size_t n = g.nodes.size();
  std::vector<double> dist(n, -1.0);
  std::vector<NodeId> via(n, -1);
  for (NodeId v : order) {
    // Predecessor lists are sorted by NodeId and the comparison is strict,
    // so equal-length alternatives resolve to the smallest predecessor id.
    double best = -1.0;
    NodeId best_pred = -1;
    for (NodeId p : g.pred[static_cast<size_t>(v)]) {
      if (dist[static_cast<size_t>(p)] > best) {
        best = dist[static_cast<size_t>(p)];
        best_pred = p;
      }
    }
    if (best_pred == -1) best = 0.0;
    dist[static_cast<size_t>(v)] = best + g.node_cost(v);
    via[static_cast<size_t>(v)] = best_pred;
  }
  CriticalPath cp;
  cp.length = dist[static_cast<size_t>(g.sink)];
  for (NodeId v = g.sink; v != -1; v = via[static_cast<size_t>(v)]) cp.path.push_back(v);
  std::reverse(cp.path.begin(), cp.path.end());
  return cp;
}

// Total work: sum of c_v(eta_v) over alive nodes.
inline double workload(const TaskGraph& g) {
  double c = 0.0;
  for (size_t v = 0; v < g.nodes.size(); ++v)
    if (g.nodes[v].alive) c += g.node_cost(static_cast<NodeId>(v));
  return c;
}

struct Task {
  TaskGraph graph;
  double period = 0.0;    // T
  double deadline = 0.0;  // D = T (implicit deadline)
};

inline double utilization(const Task& t) {
  if (!(t.period > 0.0)) throw std::invalid_argument("utilization: period must be positive");
  return workload(t.graph) / t.period;
}

}  // namespace dagot
