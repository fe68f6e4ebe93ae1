#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagot/collapse.hpp"
#include "dagot/taskgraph.hpp"

// Federated scheduling: tasks with utilization above one get dedicated
// cores, everything else is serialized and partitioned onto the remaining
// cores under per-core EDF. Five analysis approaches are compared: the raw
// DAG baseline under non-preemptive and preemptive EDF (B-NP, B-P) and the
// collapse-enabled variants under the three candidate orderings (OT-A
// arbitrary, OT-G greatest benefit, OT-L least penalty).
namespace dagot {

enum class Approach { b_np, b_p, ot_a, ot_g, ot_l };

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::b_np: return "B-NP";
    case Approach::b_p: return "B-P";
    case Approach::ot_a: return "OT-A";
    case Approach::ot_g: return "OT-G";
    case Approach::ot_l: return "OT-L";
  }
  return "?";
}

inline std::optional<Approach> parse_approach(const std::string& s) {
  if (s == "B-NP") return Approach::b_np;
  if (s == "B-P") return Approach::b_p;
  if (s == "OT-A") return Approach::ot_a;
  if (s == "OT-G") return Approach::ot_g;
  if (s == "OT-L") return Approach::ot_l;
  return std::nullopt;
}

inline bool uses_collapse(Approach a) {
  return a == Approach::ot_a || a == Approach::ot_g || a == Approach::ot_l;
}

inline Ordering ordering_of(Approach a) {
  switch (a) {
    case Approach::ot_a: return Ordering::arbitrary;
    case Approach::ot_g: return Ordering::benefit;
    case Approach::ot_l: return Ordering::penalty;
    default: throw std::logic_error("ordering_of: baseline approach has no ordering");
  }
}

enum class Reason {
  ok,
  critical_path_exceeds_deadline,
  insufficient_cores,
  partition_failure,
  timeout,
};

inline const char* to_string(Reason r) {
  switch (r) {
    case Reason::ok: return "ok";
    case Reason::critical_path_exceeds_deadline: return "critical_path_exceeds_deadline";
    case Reason::insufficient_cores: return "insufficient_cores";
    case Reason::partition_failure: return "partition_failure";
    case Reason::timeout: return "timeout";
  }
  return "?";
}

struct TaskSet {
  std::vector<Task> tasks;
  int system_cores = 0;
};

struct Allocation {
  std::map<int, int> high;  // task index -> dedicated cores
  int m_high = 0;
  int m_low = 0;
  std::map<int, std::vector<int>> partitions;  // core -> low task indices
};

struct Verdict {
  bool schedulable = false;
  Reason reason = Reason::ok;
  std::optional<Allocation> allocation;
};

// Tasks with utilization strictly above one need dedicated cores;
// utilization exactly one still fits a single shared core.
struct Classified {
  std::vector<int> high, low;  // indices into TaskSet::tasks
};

inline Classified classify(const TaskSet& set) {
  Classified c;
  for (size_t i = 0; i < set.tasks.size(); ++i) {
    if (utilization(set.tasks[i]) > 1.0)
      c.high.push_back(static_cast<int>(i));
    else
      c.low.push_back(static_cast<int>(i));
  }
  return c;
}

// Dedicated core count ceil((C - L) / (D - L)), at least 1. No core count
// helps once the critical path exceeds the deadline, or fills it exactly
// while other work remains.
inline std::optional<int> allocate_cores(const Task& t) {
  double L = critical_path(t.graph).length;
  double C = workload(t.graph);
  double D = t.deadline;
  if (L > D) return std::nullopt;
  if (L == D) {
    if (C > L) return std::nullopt;
    return 1;
  }
  double m = real_core_allocation(C, L, D);
  int cores = static_cast<int>(std::ceil(m));
  return std::max(1, cores);
}

// Exact preemptive EDF feasibility for implicit deadlines on one core:
// total utilization at most 1. Integer overload is exact via a common
// multiple of the periods; it falls back to long double only if that
// multiple overflows.
inline bool edf_p_test(const std::vector<std::pair<int64_t, int64_t>>& tasks) {
  int64_t H = 1;
  bool exact = true;
  for (auto [C, T] : tasks) {
    if (T <= 0 || C < 0) throw std::invalid_argument("edf_p_test: C >= 0 and T > 0 required");
    int64_t g = std::gcd(H, T);
    if (H > std::numeric_limits<int64_t>::max() / (T / g)) {
      exact = false;
      break;
    }
    H *= T / g;
  }
  if (exact) {
    __int128 demand = 0;
    for (auto [C, T] : tasks) demand += static_cast<__int128>(C) * (H / T);
    return demand <= static_cast<__int128>(H);
  }
  long double u = 0.0L;
  for (auto [C, T] : tasks) u += static_cast<long double>(C) / static_cast<long double>(T);
  return u <= 1.0L;
}

// Real-valued overload used on generated (fractional) tasks. Boundary
// utilizations of exactly 1 arise by construction, so a tiny epsilon keeps
// accumulated floating error from flipping them.
inline bool edf_p_test(const std::vector<std::pair<double, double>>& tasks) {
  long double u = 0.0L;
  for (auto [C, T] : tasks) {
    if (!(T > 0.0) || C < 0.0) throw std::invalid_argument("edf_p_test: C >= 0 and T > 0 required");
    u += static_cast<long double>(C) / static_cast<long double>(T);
  }
  return u <= 1.0L + 1e-9L;
}

// Non-preemptive EDF feasibility on one core for synchronous periodic tasks
// with implicit deadlines, after Jeffay, Stanat and Martel (1991): total
// utilization at most 1, and for every task i (periods sorted nondecreasing)
// and every integer L with T_1 < L < T_i,
//   L >= C_i + sum_{j<i} floor((L - 1) / T_j) * C_j.
// The right side only changes at L = k*T_j + 1, and the left side grows, so
// checking the interval edge T_1 + 1 plus every jump point is exact.
inline bool edf_np_test(std::vector<std::pair<int64_t, int64_t>> tasks) {
  for (auto [C, T] : tasks) {
    if (T <= 0 || C < 0) throw std::invalid_argument("edf_np_test: C >= 0 and T > 0 required");
    if (C > T) return false;
  }
  std::sort(tasks.begin(), tasks.end(),
            [](const auto& x, const auto& y) { return x.second != y.second ? x.second < y.second : x.first < y.first; });
  if (!edf_p_test(tasks)) return false;
  const size_t n = tasks.size();
  if (n < 2) return true;
  const int64_t T1 = tasks[0].second;

  auto blocked = [&](size_t i, int64_t L) {
    __int128 rhs = tasks[i].first;
    for (size_t j = 0; j < i; ++j)
      rhs += static_cast<__int128>((L - 1) / tasks[j].second) * tasks[j].first;
    return rhs > static_cast<__int128>(L);
  };

  for (size_t i = 1; i < n; ++i) {
    const int64_t Ti = tasks[i].second;
    if (T1 + 1 >= Ti) continue;  // no integer points strictly inside (T1, Ti)
    if (blocked(i, T1 + 1)) return false;
    for (size_t j = 0; j < i; ++j) {
      const int64_t Tj = tasks[j].second;
      for (int64_t t = Tj; t + 1 < Ti; t += Tj) {
        const int64_t L = t + 1;
        if (L <= T1 + 1) continue;
        if (blocked(i, L)) return false;
      }
    }
  }
  return true;
}

// One serialized low-utilization task as seen by the per-core tests:
// real-valued cost/period plus the integer rounding (cost up, period down)
// that makes the non-preemptive test's integer time model safe.
struct LowEntry {
  int task_index = -1;
  double cost = 0.0;
  double period = 0.0;
  int64_t cost_int = 0;
  int64_t period_int = 0;

  static LowEntry make(int index, double cost, double period) {
    LowEntry e;
    e.task_index = index;
    e.cost = cost;
    e.period = period;
    e.cost_int = static_cast<int64_t>(std::ceil(cost));
    e.period_int = static_cast<int64_t>(std::floor(period));
    return e;
  }
  double util() const { return cost / period; }
};

struct PartitionOutcome {
  bool ok = false;
  std::map<int, std::vector<int>> partitions;  // core -> task indices
};

// Worst-Fit: tasks in decreasing utilization order, each placed on the
// admissible core currently carrying the least utilization (ties: lowest
// core index). `preemptive` selects which per-core test admits a core.
inline PartitionOutcome worst_fit_partition(std::vector<LowEntry> low, int m_low,
                                            bool preemptive) {
  PartitionOutcome out;
  if (low.empty()) {
    out.ok = true;
    return out;
  }
  if (m_low <= 0) return out;

  std::sort(low.begin(), low.end(), [](const LowEntry& x, const LowEntry& y) {
    double ux = x.util(), uy = y.util();
    if (ux != uy) return ux > uy;
    return x.task_index < y.task_index;
  });

  std::vector<double> core_util(static_cast<size_t>(m_low), 0.0);
  std::vector<std::vector<LowEntry>> assigned(static_cast<size_t>(m_low));

  for (const LowEntry& e : low) {
    std::vector<int> order(static_cast<size_t>(m_low));
    for (int c = 0; c < m_low; ++c) order[static_cast<size_t>(c)] = c;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      if (core_util[static_cast<size_t>(x)] != core_util[static_cast<size_t>(y)])
        return core_util[static_cast<size_t>(x)] < core_util[static_cast<size_t>(y)];
      return x < y;
    });
    bool placed = false;
    for (int c : order) {
      auto& on_core = assigned[static_cast<size_t>(c)];
      on_core.push_back(e);
      bool fits;
      if (preemptive) {
        std::vector<std::pair<double, double>> probe;
        for (const LowEntry& t : on_core) probe.emplace_back(t.cost, t.period);
        fits = edf_p_test(probe);
      } else {
        std::vector<std::pair<int64_t, int64_t>> probe;
        for (const LowEntry& t : on_core) probe.emplace_back(t.cost_int, t.period_int);
        fits = edf_np_test(std::move(probe));
      }
      if (fits) {
        core_util[static_cast<size_t>(c)] += e.util();
        placed = true;
        break;
      }
      on_core.pop_back();
    }
    if (!placed) return out;
  }
  out.ok = true;
  for (int c = 0; c < m_low; ++c)
    for (const LowEntry& e : assigned[static_cast<size_t>(c)])
      out.partitions[c].push_back(e.task_index);
  return out;
}

// Optional precomputed transforms for one task of a set, letting the
// evaluation pipeline reuse pool-level collapse work. Null members mean
// "compute here".
struct PreparedTaskView {
  const Task* reduced = nullptr;           // high-utilization: collapsed variant
  const double* serialized_wcet = nullptr; // low-utilization: post-collapse cost
  int collapsed_pairs = -1;                // merges behind the variant, if known
};
using PreparedProvider = std::function<PreparedTaskView(int)>;

struct PerTaskOutcome {
  int task_index = -1;
  bool high = false;
  std::optional<int> m_i;   // dedicated cores (high tasks, when feasible)
  int collapsed_pairs = 0;  // collapses applied by this approach's transform
};

struct AnalyzeResult {
  Verdict verdict;
  std::vector<PerTaskOutcome> per_task;
  // Row metrics (collapse effect relative to the untransformed baseline).
  int m_high = 0;          // dedicated cores after this approach's transform
  int delta_m = 0;         // baseline m_high minus m_high, counted per task only
                           // when both allocations exist and are usable
  double delta_C = 0.0;    // workload saved, all tasks
  double delta_L = 0.0;    // critical-path change, high tasks only
  double delta_C_high = 0.0;
  double base_m_high = 0.0;  // baseline cores counted in delta_m
  double base_C_high = 0.0;  // baseline workload over high tasks
  double elapsed_ms = 0.0;
};

// Full federated analysis of one task set under one approach. OT-*
// approaches first collapse high-utilization tasks (dagot_reduce) and
// serialize low ones post-collapse; B-* analyze the raw DAGs. Verdict order:
// per-task feasibility (critical path within the deadline and a core demand
// the task can actually occupy, i.e. no larger than its node count), then
// total dedicated demand, then Worst-Fit partitioning of the serialized
// remainder. Deterministic given (set, approach, seed). Exceeding the
// wall-clock timeout yields reason=timeout (counted unschedulable).
inline AnalyzeResult analyze(const TaskSet& set, Approach approach, uint64_t seed,
                             double timeout_s = 600.0,
                             const PreparedProvider& prepared = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const auto deadline = t_start + std::chrono::duration<double>(timeout_s);
  AnalyzeResult res;
  auto finish = [&](bool ok, Reason why) -> AnalyzeResult& {
    res.verdict.schedulable = ok;
    res.verdict.reason = why;
    res.elapsed_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
    return res;
  };
  auto timed_out = [&] { return clock::now() > deadline; };

  Classified cls = classify(set);
  Allocation alloc;

  // Dedicated cores for high-utilization tasks.
  bool cp_infeasible = false;
  bool demand_infeasible = false;
  std::vector<Task> owned_reduced;  // storage when no prepared variant exists
  owned_reduced.reserve(cls.high.size());
  for (int i : cls.high) {
    const Task& base = set.tasks[static_cast<size_t>(i)];
    const Task* task = &base;
    PerTaskOutcome outcome;
    outcome.task_index = i;
    outcome.high = true;
    if (uses_collapse(approach)) {
      PreparedTaskView view;
      if (prepared) view = prepared(i);
      if (view.reduced) {
        task = view.reduced;
        outcome.collapsed_pairs = std::max(0, view.collapsed_pairs);
      } else {
        ReduceResult r =
            dagot_reduce(base.graph, base.deadline, ordering_of(approach),
                         sub_seed(seed, "collapse", static_cast<uint64_t>(i)));
        outcome.collapsed_pairs = r.applied;
        owned_reduced.push_back(Task{std::move(r.graph), base.period, base.deadline});
        task = &owned_reduced.back();
      }
    }
    if (timed_out()) return finish(false, Reason::timeout);

    double base_L = critical_path(base.graph).length;
    double base_C = workload(base.graph);
    double cur_L = critical_path(task->graph).length;
    double cur_C = workload(task->graph);
    res.delta_C += base_C - cur_C;
    res.delta_C_high += base_C - cur_C;
    res.delta_L += cur_L - base_L;
    res.base_C_high += base_C;

    std::optional<int> m_i = allocate_cores(*task);
    if (!m_i) {
      cp_infeasible = true;
      res.per_task.push_back(outcome);
      continue;
    }
    if (*m_i > task->graph.alive_count()) {
      // A DAG never occupies more cores than it has nodes, so a demand beyond
      // the node count is not a usable allocation: trivially infeasible.
      demand_infeasible = true;
      res.per_task.push_back(outcome);
      continue;
    }
    outcome.m_i = *m_i;
    res.per_task.push_back(outcome);
    alloc.high[i] = *m_i;
    alloc.m_high += *m_i;
    res.m_high += *m_i;
    std::optional<int> m_base = allocate_cores(base);
    if (m_base && *m_base <= base.graph.alive_count()) {
      res.delta_m += *m_base - *m_i;
      res.base_m_high += *m_base;
    }
  }
  if (cp_infeasible) return finish(false, Reason::critical_path_exceeds_deadline);
  if (demand_infeasible) return finish(false, Reason::insufficient_cores);
  if (alloc.m_high > set.system_cores) return finish(false, Reason::insufficient_cores);
  alloc.m_low = set.system_cores - alloc.m_high;

  // Serialize and partition low-utilization tasks.
  std::vector<LowEntry> low;
  low.reserve(cls.low.size());
  for (int i : cls.low) {
    const Task& base = set.tasks[static_cast<size_t>(i)];
    PerTaskOutcome outcome;
    outcome.task_index = i;
    double wcet;
    if (uses_collapse(approach)) {
      PreparedTaskView view;
      if (prepared) view = prepared(i);
      if (view.serialized_wcet) {
        wcet = *view.serialized_wcet;
        outcome.collapsed_pairs = std::max(0, view.collapsed_pairs);
      } else {
        Serialized s =
            serialize_low_util(base.graph, base.deadline, ordering_of(approach),
                               sub_seed(seed, "serialize", static_cast<uint64_t>(i)));
        wcet = s.wcet;
        // each applied collapse absorbs exactly one node
        outcome.collapsed_pairs = base.graph.alive_count() - s.graph.alive_count();
      }
      res.delta_C += workload(base.graph) - wcet;
    } else {
      wcet = workload(base.graph);  // raw topological serialization
    }
    res.per_task.push_back(outcome);
    low.push_back(LowEntry::make(i, wcet, base.period));
    if (timed_out()) return finish(false, Reason::timeout);
  }
  if (!low.empty()) {
    if (alloc.m_low <= 0) return finish(false, Reason::partition_failure);
    PartitionOutcome part = worst_fit_partition(low, alloc.m_low, approach == Approach::b_p);
    if (timed_out()) return finish(false, Reason::timeout);
    if (!part.ok) return finish(false, Reason::partition_failure);
    alloc.partitions = std::move(part.partitions);
  }

  res.verdict.allocation = std::move(alloc);
  return finish(true, Reason::ok);
}

}  // namespace dagot
