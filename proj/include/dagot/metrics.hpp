#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagot/federated.hpp"

// Per-task collapse metrics, per-set result rows, and the bucketed
// aggregation that feeds the evaluation summary. CSV rendering lives here so
// every writer produces byte-identical output for identical inputs.
namespace dagot {

struct TaskMetrics {
  double C_pre = 0.0, C_post = 0.0;
  double L_pre = 0.0, L_post = 0.0;
  double m_real_pre = 0.0, m_real_post = 0.0;
  std::optional<int> m_pre, m_post;   // integer allocations; empty when infeasible
  std::optional<int> m_saved;         // defined only when both allocations exist
  double delta_C = 0.0;               // C_pre - C_post, nonnegative
  double delta_L = 0.0;               // L_post - L_pre, may be negative
};

inline TaskMetrics task_metrics(const Task& pre, const Task& post) {
  TaskMetrics m;
  m.C_pre = workload(pre.graph);
  m.C_post = workload(post.graph);
  m.L_pre = critical_path(pre.graph).length;
  m.L_post = critical_path(post.graph).length;
  m.m_real_pre = real_core_allocation(m.C_pre, m.L_pre, pre.deadline);
  m.m_real_post = real_core_allocation(m.C_post, m.L_post, post.deadline);
  m.m_pre = allocate_cores(pre);
  m.m_post = allocate_cores(post);
  if (m.m_pre && m.m_post) m.m_saved = *m.m_pre - *m.m_post;
  m.delta_C = m.C_pre - m.C_post;
  m.delta_L = m.L_post - m.L_pre;
  return m;
}

// One evaluated (task set, approach) pair. The first block mirrors the
// results CSV columns; the trailing fields carry the extra sums the summary
// and ratio computations need but the CSV omits.
struct ResultRow {
  int set_id = -1;
  int cores = 0;
  double target_util = 0.0;
  Approach approach = Approach::b_np;
  bool schedulable = false;
  Reason reason = Reason::ok;
  int m_high = 0;        // allocated cores over feasible high tasks
  int delta_m = 0;       // cores saved vs raw graphs (both-feasible tasks only)
  double delta_C = 0.0;  // workload removed by collapse, all tasks
  double delta_L = 0.0;  // critical path change, high tasks only
  double elapsed_ms = 0.0;

  // not serialized to the results CSV
  double delta_C_high = 0.0;
  int base_m_high = 0;
  double base_C_high = 0.0;
};

struct PointSummary {
  double bucket_lo = 0.0, bucket_hi = 0.0;
  Approach approach = Approach::b_np;
  size_t n = 0;
  double sched_ratio = 0.0;
  double mean_cores = 0.0;    // mean m_high
  double mean_delta_m = 0.0;
  double mean_delta_C = 0.0;
  double mean_delta_C_high = 0.0;
  double mean_delta_L = 0.0;
};

// Buckets rows by floor(target_util / width) * width and averages per
// (bucket, approach). Output is sorted by bucket then approach enum order.
inline std::vector<PointSummary> aggregate(const std::vector<ResultRow>& rows,
                                           double bucket_width = 4.0) {
  if (!(bucket_width > 0.0)) throw std::invalid_argument("aggregate: bucket width must be positive");
  struct Acc {
    size_t n = 0, sched = 0;
    double cores = 0, dm = 0, dc = 0, dch = 0, dl = 0;
  };
  std::map<std::pair<double, int>, Acc> acc;
  for (const ResultRow& r : rows) {
    double lo = std::floor(r.target_util / bucket_width) * bucket_width;
    Acc& a = acc[{lo, static_cast<int>(r.approach)}];
    ++a.n;
    if (r.schedulable) ++a.sched;
    a.cores += r.m_high;
    a.dm += r.delta_m;
    a.dc += r.delta_C;
    a.dch += r.delta_C_high;
    a.dl += r.delta_L;
  }
  std::vector<PointSummary> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    PointSummary s;
    s.bucket_lo = key.first;
    s.bucket_hi = key.first + bucket_width;
    s.approach = static_cast<Approach>(key.second);
    s.n = a.n;
    double n = static_cast<double>(a.n);
    s.sched_ratio = static_cast<double>(a.sched) / n;
    s.mean_cores = a.cores / n;
    s.mean_delta_m = a.dm / n;
    s.mean_delta_C = a.dc / n;
    s.mean_delta_C_high = a.dch / n;
    s.mean_delta_L = a.dl / n;
    out.push_back(s);
  }
  return out;
}

// Stable numeric rendering: shortest-ish general form for measured values,
// fixed precision for ratios and milliseconds. All CSV output funnels
// through these so reruns are byte-comparable.
inline std::string fmt_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
inline std::string fmt_ratio(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
inline std::string fmt_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline const char* results_csv_header() {
  return "set_id,cores,target_U,approach,schedulable,reason,m_high,delta_m,delta_C,delta_L,elapsed_ms";
}

inline std::string result_row_csv(const ResultRow& r) {
  std::string s;
  s += std::to_string(r.set_id);
  s += ',';
  s += std::to_string(r.cores);
  s += ',';
  s += fmt_general(r.target_util);
  s += ',';
  s += to_string(r.approach);
  s += ',';
  s += r.schedulable ? '1' : '0';
  s += ',';
  s += to_string(r.reason);
  s += ',';
  s += std::to_string(r.m_high);
  s += ',';
  s += std::to_string(r.delta_m);
  s += ',';
  s += fmt_general(r.delta_C);
  s += ',';
  s += fmt_general(r.delta_L);
  s += ',';
  s += fmt_ms(r.elapsed_ms);
  return s;
}

inline const char* summary_csv_header() {
  return "bucket_lo,bucket_hi,approach,n,sched_ratio,mean_cores,mean_delta_m,mean_delta_C,"
         "mean_delta_C_high,mean_delta_L";
}

inline std::string summary_row_csv(const PointSummary& s) {
  std::string out;
  out += fmt_general(s.bucket_lo);
  out += ',';
  out += fmt_general(s.bucket_hi);
  out += ',';
  out += to_string(s.approach);
  out += ',';
  out += std::to_string(s.n);
  out += ',';
  out += fmt_ratio(s.sched_ratio);
  out += ',';
  out += fmt_ratio(s.mean_cores);
  out += ',';
  out += fmt_ratio(s.mean_delta_m);
  out += ',';
  out += fmt_general(s.mean_delta_C);
  out += ',';
  out += fmt_general(s.mean_delta_C_high);
  out += ',';
  out += fmt_general(s.mean_delta_L);
  return out;
}

}  // namespace dagot
