#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagot/collapse.hpp"
#include "dagot/federated.hpp"
#include "dagot/rng.hpp"
#include "dagot/taskgraph.hpp"

// Synthetic workload generation: random layered-by-index DAGs, execution
// assignment (objects, single-thread WCETs, growth factors), timing
// assignment (period from a target utilization), filtration of trivially
// infeasible tasks, per-ordering collapse pools, and task-set assembly.
// Every stage draws from its own sub-seeded stream so results do not depend
// on evaluation order.
namespace dagot {

struct GenConfig {
  std::vector<int> nodes_per_graph{16, 32, 64};
  std::vector<double> edge_prob{0.02, 0.06, 0.12};
  int graph_iters = 10;  // S random graphs per (n, p) point
  std::vector<int> objects_per_task{4, 8, 16};
  std::vector<double> growth_cap{0.2, 0.6, 1.0};
  int64_t wcet_lo = 1;
  int64_t wcet_hi = 50;
  std::vector<double> task_utils{0.25, 0.5, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> set_utils{0.5, 1, 2, 4, 8, 12, 16, 20, 24, 28, 32, 36};
  std::vector<int> core_counts{4, 8, 12, 16, 20, 24, 28, 32};
  int sets_per_point = 1000;  // N
  uint64_t seed = 0;

  size_t count_graphs() const {
    return nodes_per_graph.size() * edge_prob.size() * static_cast<size_t>(graph_iters);
  }
  size_t count_assigned() const {
    return count_graphs() * objects_per_task.size() * growth_cap.size();
  }
  size_t count_timed() const { return count_assigned() * task_utils.size(); }
  size_t count_sets() const {
    return set_utils.size() * core_counts.size() * static_cast<size_t>(sets_per_point);
  }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("generator config: ") + what);
    };
    require(!nodes_per_graph.empty(), "nodes_per_graph empty");
    for (int n : nodes_per_graph) require(n >= 2, "graphs need at least 2 nodes");
    require(!edge_prob.empty(), "edge_prob empty");
    for (double p : edge_prob) require(p >= 0.0 && p <= 1.0, "edge probability outside [0,1]");
    require(graph_iters >= 1, "graph_iters must be positive");
    require(!objects_per_task.empty(), "objects_per_task empty");
    for (int o : objects_per_task) require(o >= 1, "objects_per_task entries must be >= 1");
    require(!growth_cap.empty(), "growth_cap empty");
    for (double f : growth_cap) require(f >= 0.2 && f <= 1.0, "growth cap outside [0.2, 1.0]");
    require(wcet_lo >= 1 && wcet_hi >= wcet_lo, "bad wcet range");
    require(!task_utils.empty(), "task_utils empty");
    for (double u : task_utils) require(u > 0.0, "task utilization must be positive");
    require(!set_utils.empty(), "set_utils empty");
    for (double u : set_utils) require(u > 0.0, "set utilization must be positive");
    require(!core_counts.empty(), "core_counts empty");
    for (int c : core_counts) require(c >= 1, "core counts must be positive");
    require(sets_per_point >= 1, "sets_per_point must be positive");
  }
};

// Random DAG on nodes 1..n: each pair i < j receives edge i -> j with
// probability p (index order guarantees acyclicity), then the single
// source/sink augmentation. Edge draws use a (0,1] variate compared as
// r <= p, so p = 0 never adds an edge and p = 1 always does. Costs are
// attached later; nodes start with a shared placeholder object.
inline TaskGraph gen_graph(int n, double p, Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_graph: need at least 2 nodes");
  RawGraph raw;
  raw.objects.emplace(0, WcetoFn::linear(1.0, 1.0));  // placeholder until assignment
  for (int i = 0; i < n; ++i) {
    Node v;
    v.ext_id = i + 1;
    v.object = 0;
    v.threads = 1;
    raw.nodes.push_back(v);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform_open0() <= p)
        raw.edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return augment_source_sink(raw);
}

// Execution assignment: o objects, each with an integer single-thread WCET
// drawn from [wcet_lo, wcet_hi] and a growth factor drawn from [0.2, cap];
// every real node then names one object uniformly and starts with a single
// thread. Draw order (objects ascending, then nodes ascending) is part of
// the determinism contract.
inline TaskGraph assign_execution(const TaskGraph& base, int o, double cap, Rng& rng,
                                  int64_t wcet_lo = 1, int64_t wcet_hi = 50) {
  if (o < 1) throw std::invalid_argument("assign_execution: need at least one object");
  TaskGraph g = base;
  g.objects.clear();
  for (ObjectId id = 0; id < o; ++id) {
    double c1 = static_cast<double>(rng.uniform_int(wcet_lo, wcet_hi));
    double factor = rng.uniform_real(0.2, cap);
    g.objects.emplace(id, WcetoFn::linear(c1, factor));
  }
  ObjectId next_pseudo = o;
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    Node& n = g.nodes[v];
    if (!n.alive) continue;
    if (n.pseudo) {
      n.object = next_pseudo++;
      g.objects.emplace(n.object, WcetoFn::table({0.0}));
    } else {
      n.object = static_cast<ObjectId>(rng.uniform_int(0, o - 1));
      n.threads = 1;
    }
  }
  return g;
}

// Timing assignment: implicit deadline with T = D = C / U.
inline Task assign_timing(const TaskGraph& g, double u_target) {
  if (!(u_target > 0.0)) throw std::invalid_argument("assign_timing: utilization must be positive");
  Task t;
  t.graph = g;
  t.period = workload(g) / u_target;
  t.deadline = t.period;
  return t;
}

// A task no amount of scheduling can help: the critical path misses the
// deadline outright, or the dedicated-core demand exceeds the node count.
inline bool trivially_infeasible(const Task& t) {
  std::optional<int> m = allocate_cores(t);
  return !m || *m > t.graph.alive_count();
}

struct PoolEntry {
  Task baseline;
  Task arbitrary, benefit, penalty;  // collapsed variants (baseline copy for low tasks)
  int applied_arbitrary = 0, applied_benefit = 0, applied_penalty = 0;
  uint64_t collapse_seed = 0;
  bool high = false;
};

struct TaskPool {
  std::vector<PoolEntry> entries;

  const Task& variant(size_t i, Ordering o) const {
    const PoolEntry& e = entries[i];
    switch (o) {
      case Ordering::arbitrary: return e.arbitrary;
      case Ordering::benefit: return e.benefit;
      case Ordering::penalty: return e.penalty;
    }
    return e.baseline;
  }
};

// Filtration: a task is dropped only when its raw form is trivially
// infeasible AND all three collapse orderings stay trivially infeasible,
// each variant judged on its own graph. Survivors enter all four pools at
// one shared index. Low-utilization tasks are never droppable (C <= T = D
// bounds the critical path) and keep their raw graph in every pool;
// serialization collapses them at analysis time.
inline TaskPool filter_tasks(const std::vector<Task>& timed, uint64_t seed) {
  TaskPool pool;
  for (size_t i = 0; i < timed.size(); ++i) {
    const Task& t = timed[i];
    PoolEntry e;
    e.baseline = t;
    e.collapse_seed = sub_seed(seed, "pool-collapse", i);
    e.high = utilization(t) > 1.0;
    if (e.high) {
      ReduceResult ra = dagot_reduce(t.graph, t.deadline, Ordering::arbitrary, e.collapse_seed);
      ReduceResult rb = dagot_reduce(t.graph, t.deadline, Ordering::benefit, e.collapse_seed);
      ReduceResult rp = dagot_reduce(t.graph, t.deadline, Ordering::penalty, e.collapse_seed);
      e.arbitrary = Task{std::move(ra.graph), t.period, t.deadline};
      e.benefit = Task{std::move(rb.graph), t.period, t.deadline};
      e.penalty = Task{std::move(rp.graph), t.period, t.deadline};
      e.applied_arbitrary = ra.applied;
      e.applied_benefit = rb.applied;
      e.applied_penalty = rp.applied;
      if (trivially_infeasible(e.baseline) && trivially_infeasible(e.arbitrary) &&
          trivially_infeasible(e.benefit) && trivially_infeasible(e.penalty))
        continue;
    } else {
      e.arbitrary = t;
      e.benefit = t;
      e.penalty = t;
    }
    pool.entries.push_back(std::move(e));
  }
  return pool;
}

// Runs graph creation, execution assignment and timing assignment over the
// full parameter grid, in grid order. Returned tasks are the pre-filter
// "timed" population.
inline std::vector<Task> generate_timed_tasks(const GenConfig& cfg) {
  std::vector<Task> timed;
  timed.reserve(cfg.count_timed());
  size_t graph_idx = 0;
  for (size_t ni = 0; ni < cfg.nodes_per_graph.size(); ++ni) {
    for (size_t pi = 0; pi < cfg.edge_prob.size(); ++pi) {
      for (int s = 0; s < cfg.graph_iters; ++s, ++graph_idx) {
        Rng graph_rng(sub_seed(cfg.seed, "graph", ni, pi, static_cast<uint64_t>(s)));
        TaskGraph shape = gen_graph(cfg.nodes_per_graph[ni], cfg.edge_prob[pi], graph_rng);
        size_t assign_idx = 0;
        for (int o : cfg.objects_per_task) {
          for (double cap : cfg.growth_cap) {
            Rng assign_rng(sub_seed(cfg.seed, "assign", graph_idx, assign_idx++));
            TaskGraph priced =
                assign_execution(shape, o, cap, assign_rng, cfg.wcet_lo, cfg.wcet_hi);
            for (double u : cfg.task_utils) timed.push_back(assign_timing(priced, u));
          }
        }
      }
    }
  }
  return timed;
}

struct SetRecord {
  int set_id = -1;
  double target_util = 0.0;
  int cores = 0;
  std::vector<int> task_indices;  // into TaskPool::entries
};

// Assembly: draw tasks uniformly with replacement until the cumulative
// baseline utilization first reaches or exceeds the target. The same indices
// select the aligned collapsed sets from the other pools.
inline std::vector<int> draw_set(const TaskPool& pool, double target_util, Rng& rng) {
  if (pool.entries.empty()) throw std::runtime_error("draw_set: empty task pool");
  std::vector<int> indices;
  double sum = 0.0;
  while (sum < target_util) {
    int k = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(pool.entries.size()) - 1));
    indices.push_back(k);
    sum += utilization(pool.entries[static_cast<size_t>(k)].baseline);
  }
  return indices;
}

inline std::vector<SetRecord> assemble(const TaskPool& pool, const GenConfig& cfg) {
  std::vector<SetRecord> sets;
  sets.reserve(cfg.count_sets());
  int set_id = 0;
  for (size_t ui = 0; ui < cfg.set_utils.size(); ++ui) {
    for (size_t ci = 0; ci < cfg.core_counts.size(); ++ci) {
      for (int n = 0; n < cfg.sets_per_point; ++n) {
        Rng rng(sub_seed(cfg.seed, "assemble", ui, ci, static_cast<uint64_t>(n)));
        SetRecord rec;
        rec.set_id = set_id++;
        rec.target_util = cfg.set_utils[ui];
        rec.cores = cfg.core_counts[ci];
        rec.task_indices = draw_set(pool, rec.target_util, rng);
        sets.push_back(std::move(rec));
      }
    }
  }
  return sets;
}

}  // namespace dagot
