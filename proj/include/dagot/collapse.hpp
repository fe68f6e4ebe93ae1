#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagot/rng.hpp"
#include "dagot/taskgraph.hpp"

// Node collapse: two nodes that execute the same object can be merged into
// one node bundling their threads on a single core, where cache sharing
// makes the merged cost c(eta_u + eta_v) no larger than c(eta_u) + c(eta_v).
// This file implements candidate detection, the collapse rewrite itself,
// the benefit predicates, the greedy reduction pass with its three candidate
// orderings, low-utilization serialization, and an exhaustive oracle for
// small instances.
namespace dagot {

struct CandidatePair {
  NodeId a = -1;  // a < b, both alive and sharing one object
  NodeId b = -1;
  double delta = 0.0;  // workload saved by merging at current thread counts
  double penalty = std::numeric_limits<double>::quiet_NaN();  // critical-path
  // extension, filled by order_least_penalty against the original graph
};

// True when the merged thread count is still within the object's evaluable
// range (finite tables cannot price arbitrarily large bundles).
inline bool can_collapse_eval(const TaskGraph& g, NodeId u, NodeId v) {
  const WcetoFn& fn = g.objects.at(g.nodes[static_cast<size_t>(u)].object);
  return g.nodes[static_cast<size_t>(u)].threads +
             g.nodes[static_cast<size_t>(v)].threads <=
         max_eta(fn);
}

// All unordered pairs of alive nodes sharing an object, excluding pseudo
// nodes and objects whose growth factor exceeds 1 (merging those can grow
// the workload). Pairs are listed by ascending object id, then ascending
// (a, b), so the enumeration is deterministic.
inline std::vector<CandidatePair> candidates(const TaskGraph& g) {
  std::map<ObjectId, std::vector<NodeId>> by_object;
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    const Node& n = g.nodes[v];
    if (!n.alive || n.pseudo) continue;
    by_object[n.object].push_back(static_cast<NodeId>(v));
  }
  std::vector<CandidatePair> pairs;
  for (const auto& [obj, members] : by_object) {
    if (members.size() < 2) continue;
    const WcetoFn& fn = g.objects.at(obj);
    if (!collapsible(fn)) continue;
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        NodeId a = members[i], b = members[j];
        if (!can_collapse_eval(g, a, b)) continue;
        CandidatePair p;
        p.a = a;
        p.b = b;
        int ea = g.nodes[static_cast<size_t>(a)].threads;
        int eb = g.nodes[static_cast<size_t>(b)].threads;
        p.delta = eval(fn, ea) + eval(fn, eb) - eval(fn, ea + eb);
        pairs.push_back(p);
      }
    }
  }
  return pairs;
}

// Merge v into u: u survives carrying the summed thread count, every
// external edge of v is rewired to u, edges between u and v are dropped,
// and no self loop is ever created. The result may contain a cycle; the
// caller is responsible for checking.
inline TaskGraph collapse(const TaskGraph& g, NodeId u, NodeId v) {
  const size_t su = static_cast<size_t>(u), sv = static_cast<size_t>(v);
  if (u == v) throw std::invalid_argument("collapse: identical nodes");
  if (su >= g.nodes.size() || sv >= g.nodes.size())
    throw std::invalid_argument("collapse: node out of range");
  if (!g.nodes[su].alive || !g.nodes[sv].alive)
    throw std::invalid_argument("collapse: dead node");
  if (g.nodes[su].pseudo || g.nodes[sv].pseudo)
    throw std::invalid_argument("collapse: pseudo nodes are not candidates");
  if (g.nodes[su].object != g.nodes[sv].object)
    throw std::invalid_argument("collapse: nodes do not share an object");
  if (!can_collapse_eval(g, u, v))
    throw std::invalid_argument("collapse: merged thread count exceeds table");

  TaskGraph h = g;
  h.nodes[su].threads += h.nodes[sv].threads;
  h.nodes[sv].alive = false;

  auto erase_sorted = [](std::vector<NodeId>& vec, NodeId x) {
    auto it = std::lower_bound(vec.begin(), vec.end(), x);
    if (it != vec.end() && *it == x) vec.erase(it);
  };
  for (NodeId w : h.succ[sv]) {
    erase_sorted(h.pred[static_cast<size_t>(w)], v);
    if (w != u) h.add_edge(u, w);
  }
  for (NodeId w : h.pred[sv]) {
    erase_sorted(h.succ[static_cast<size_t>(w)], v);
    if (w != u) h.add_edge(w, u);
  }
  h.succ[sv].clear();
  h.pred[sv].clear();
  if (h.source == v) h.source = u;
  if (h.sink == v) h.sink = u;
  return h;
}

// Real-valued dedicated core demand (C - L) / (D - L). The ceiling is
// deliberately not applied: collapse decisions compare the real values.
// Degenerate L == D: a chain exactly filling the deadline needs one core,
// anything with spare work off the path can never finish.
inline double real_core_allocation(double C, double L, double D) {
  if (!(D > 0.0)) throw std::invalid_argument("real_core_allocation: D must be positive");
  if (L == D) return C > L ? std::numeric_limits<double>::infinity() : 1.0;
  return (C - L) / (D - L);
}

// Non-strict improvement: a feasible allocation must stay feasible and not
// grow; an infeasible one (m <= 0 encodes L >= D) must move toward
// feasibility or hold still.
inline bool improves(double m, double m_hat) {
  if (m > 0.0) return m_hat > 0.0 && m_hat <= m;
  return m_hat >= m;
}

namespace detail {
// Benefit test against precomputed base metrics; fills the trial graph and
// its metrics on success so the caller can adopt them without re-collapsing.
struct TrialResult {
  bool beneficial = false;
  TaskGraph graph;
  double L_hat = 0.0, C_hat = 0.0;
};

inline TrialResult try_beneficial(const TaskGraph& g, double C, double L, NodeId u,
                                  NodeId v, double D) {
  TrialResult r;
  if (!can_collapse_eval(g, u, v)) return r;
  TaskGraph trial = collapse(g, u, v);
  if (detect_cycle(trial)) return r;
  double L_hat = critical_path(trial).length;
  if (L <= D && L_hat > D) return r;
  double C_hat = workload(trial);
  if (!improves(real_core_allocation(C, L, D), real_core_allocation(C_hat, L_hat, D)))
    return r;
  r.beneficial = true;
  r.graph = std::move(trial);
  r.L_hat = L_hat;
  r.C_hat = C_hat;
  return r;
}
}  // namespace detail

// A collapse is beneficial iff the trial result is acyclic, keeps a
// deadline-feasible critical path feasible, and improves the real core
// allocation. The input graph is never mutated.
inline bool beneficial(const TaskGraph& g, NodeId u, NodeId v, double D) {
  return detail::try_beneficial(g, workload(g), critical_path(g).length, u, v, D)
      .beneficial;
}

enum class Ordering { arbitrary, benefit, penalty };

inline const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::arbitrary: return "arbitrary";
    case Ordering::benefit: return "benefit";
    case Ordering::penalty: return "penalty";
  }
  return "?";
}

// Descending workload saving, ties by (a, b).
inline std::vector<CandidatePair> order_greatest_benefit(std::vector<CandidatePair> pairs,
                                                         const TaskGraph&) {
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& x, const CandidatePair& y) {
    if (x.delta != y.delta) return x.delta > y.delta;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  return pairs;
}

// Ascending critical-path extension gamma = L_hat - L, each pair trialed
// against the original graph; penalties are not recomputed as collapses are
// applied later. Pairs whose trial cannot execute (cycle, table range) sort
// last with gamma = +infinity.
inline std::vector<CandidatePair> order_least_penalty(std::vector<CandidatePair> pairs,
                                                      const TaskGraph& g, double) {
  double L = critical_path(g).length;
  for (CandidatePair& p : pairs) {
    if (!can_collapse_eval(g, p.a, p.b)) {
      p.penalty = std::numeric_limits<double>::infinity();
      continue;
    }
    TaskGraph trial = collapse(g, p.a, p.b);
    p.penalty = detect_cycle(trial)
                    ? std::numeric_limits<double>::infinity()
                    : critical_path(trial).length - L;
  }
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& x, const CandidatePair& y) {
    if (x.penalty != y.penalty) return x.penalty < y.penalty;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  return pairs;
}

// Seeded uniform shuffle.
inline std::vector<CandidatePair> order_arbitrary(std::vector<CandidatePair> pairs,
                                                  uint64_t seed) {
  Rng rng(seed);
  rng.shuffle(pairs);
  return pairs;
}

// Union-find over NodeId recording which surviving representative each
// collapsed node ended up in.
class MergeMap {
 public:
  explicit MergeMap(size_t n) : parent_(n) {
    for (size_t i = 0; i < n; ++i) parent_[i] = static_cast<NodeId>(i);
  }
  NodeId find(NodeId x) const {
    while (parent_[static_cast<size_t>(x)] != x) x = parent_[static_cast<size_t>(x)];
    return x;
  }
  void absorb(NodeId rep, NodeId gone) { parent_[static_cast<size_t>(gone)] = rep; }

  // representative -> absorbed node ids, ascending, only non-trivial groups
  std::map<NodeId, std::vector<NodeId>> history() const {
    std::map<NodeId, std::vector<NodeId>> h;
    for (size_t i = 0; i < parent_.size(); ++i)
      if (parent_[i] != static_cast<NodeId>(i))
        h[find(static_cast<NodeId>(i))].push_back(static_cast<NodeId>(i));
    return h;
  }

 private:
  std::vector<NodeId> parent_;
};

struct ReduceResult {
  TaskGraph graph;
  MergeMap merges;
  int applied = 0;
};

// Greedy dedicated-core reduction: compute the candidate set once against
// the input graph, order it by the chosen heuristic, then walk it in a single
// pass. Collapsing a pair replaces both endpoints with a new node, so a later
// pair naming either endpoint no longer refers to a node of the current graph
// and is consumed as a no-op; each node takes part in at most one merge per
// pass. The smaller id carries the merged node, keeping everything
// deterministic. O(V^3 + V^2 E) overall.
inline ReduceResult dagot_reduce(const TaskGraph& g, double D, Ordering ordering,
                                 uint64_t seed = 0) {
  std::vector<CandidatePair> pairs = candidates(g);
  switch (ordering) {
    case Ordering::benefit: pairs = order_greatest_benefit(std::move(pairs), g); break;
    case Ordering::penalty: pairs = order_least_penalty(std::move(pairs), g, D); break;
    case Ordering::arbitrary: pairs = order_arbitrary(std::move(pairs), seed); break;
  }
  ReduceResult r{g, MergeMap(g.nodes.size()), 0};
  std::vector<bool> consumed(g.nodes.size(), false);
  double L = critical_path(r.graph).length;
  double C = workload(r.graph);
  for (const CandidatePair& p : pairs) {
    if (consumed[static_cast<size_t>(p.a)] || consumed[static_cast<size_t>(p.b)]) continue;
    NodeId keep = std::min(p.a, p.b), drop = std::max(p.a, p.b);
    detail::TrialResult t = detail::try_beneficial(r.graph, C, L, keep, drop, D);
    if (!t.beneficial) continue;
    r.graph = std::move(t.graph);
    L = t.L_hat;
    C = t.C_hat;
    r.merges.absorb(keep, drop);
    consumed[static_cast<size_t>(keep)] = true;
    consumed[static_cast<size_t>(drop)] = true;
    ++r.applied;
  }
  return r;
}

// A low-utilization task runs sequentially on a shared core: collapse
// whatever is beneficial under the same heuristic the task set uses, then
// fix the execution order by topological sort. The sequential WCET is the
// post-collapse workload; a task whose workload exceeds its deadline cannot
// be serialized feasibly (never the case when utilization <= 1, since
// C <= T = D).
struct Serialized {
  TaskGraph graph;               // collapsed graph (structure kept for audit)
  std::vector<NodeId> order;     // sequential execution order
  double wcet = 0.0;             // = post-collapse workload
  bool feasible = true;          // wcet <= D
};

inline Serialized serialize_low_util(const TaskGraph& g, double D, Ordering ordering,
                                     uint64_t seed = 0) {
  ReduceResult r = dagot_reduce(g, D, ordering, seed);
  Serialized s;
  s.order = topological_order(r.graph);
  s.wcet = workload(r.graph);
  s.feasible = s.wcet <= D;
  s.graph = std::move(r.graph);
  return s;
}

struct oracle_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  TaskGraph graph;
  double real_cores = 0.0;
};

namespace detail {
// Quotient of the original graph by a merge partition. Blocks are always
// object-homogeneous because candidate pairs never cross objects.
inline TaskGraph quotient(const TaskGraph& g, const MergeMap& mm) {
  TaskGraph h = g;
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.nodes[v].alive) continue;
    NodeId root = mm.find(static_cast<NodeId>(v));
    if (root != static_cast<NodeId>(v)) {
      h.nodes[v].alive = false;
      h.nodes[static_cast<size_t>(root)].threads += g.nodes[v].threads;
    }
  }
  for (size_t v = 0; v < h.nodes.size(); ++v) {
    h.succ[v].clear();
    h.pred[v].clear();
  }
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.nodes[v].alive) continue;
    NodeId rv = mm.find(static_cast<NodeId>(v));
    for (NodeId w : g.succ[v]) {
      NodeId rw = mm.find(w);
      if (rv != rw) h.add_edge(rv, rw);
    }
  }
  if (h.source != -1) h.source = mm.find(h.source);
  if (h.sink != -1) h.sink = mm.find(h.sink);
  return h;
}
}  // namespace detail

// Exhaustive search over every order of every subset of candidate collapses,
// skipping steps that would create a cycle (the quotient graph depends only
// on the final partition, so distinct orders reaching one partition are
// explored once). Returns the smallest positive real allocation reachable;
// if no reachable state has a positive allocation the input graph itself is
// returned. Exponential: refuses inputs with more candidates than `limit`.
inline OracleResult optimal_collapse_oracle(const TaskGraph& g, double D, int limit = 8) {
  std::vector<CandidatePair> pairs = candidates(g);
  if (static_cast<int>(pairs.size()) > limit)
    throw oracle_limit_error("optimal_collapse_oracle: " + std::to_string(pairs.size()) +
                             " candidates exceed limit " + std::to_string(limit));

  OracleResult best;
  best.graph = g;
  best.real_cores = real_core_allocation(workload(g), critical_path(g).length, D);
  bool have_positive = best.real_cores > 0.0;

  std::set<std::vector<NodeId>> seen;
  struct Frame {
    MergeMap mm;
    TaskGraph graph;
  };
  std::vector<Frame> stack;
  stack.push_back({MergeMap(g.nodes.size()), g});

  auto signature = [&](const MergeMap& mm) {
    std::vector<NodeId> sig(g.nodes.size());
    for (size_t v = 0; v < g.nodes.size(); ++v) sig[v] = mm.find(static_cast<NodeId>(v));
    return sig;
  };
  seen.insert(signature(stack.back().mm));

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    for (const CandidatePair& p : pairs) {
      NodeId a = f.mm.find(p.a), b = f.mm.find(p.b);
      if (a == b) continue;
      NodeId keep = std::min(a, b), drop = std::max(a, b);
      if (!can_collapse_eval(f.graph, keep, drop)) continue;
      MergeMap next = f.mm;
      next.absorb(keep, drop);
      auto sig = signature(next);
      if (!seen.insert(sig).second) continue;
      TaskGraph q = detail::quotient(g, next);
      if (detect_cycle(q)) continue;
      double m = real_core_allocation(workload(q), critical_path(q).length, D);
      if (m > 0.0 && (!have_positive || m < best.real_cores)) {
        best.graph = q;
        best.real_cores = m;
        have_positive = true;
      }
      stack.push_back({std::move(next), std::move(q)});
    }
  }
  return best;
}

}  // namespace dagot
