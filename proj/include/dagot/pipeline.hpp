#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "dagot/generator.hpp"
#include "dagot/json_io.hpp"
#include "dagot/metrics.hpp"

// End-to-end evaluation: generate the task population once, cache the
// per-ordering collapse work at pool granularity, then fan task sets out to
// the five analyses. Collapse and serialization are the expensive stages, so
// they run exactly once per pool entry no matter how many sets draw it.
namespace dagot {

struct EvalConfig {
  GenConfig gen;
  double timeout_s = 600.0;
  int jobs = 1;
  double bucket_width = 4.0;
  std::vector<Approach> approaches{Approach::b_np, Approach::b_p, Approach::ot_a,
                                   Approach::ot_g, Approach::ot_l};
};

inline nlohmann::json gen_config_to_json(const GenConfig& g) {
  return nlohmann::json{{"nodes_per_graph", g.nodes_per_graph},
                        {"edge_prob", g.edge_prob},
                        {"graph_iters", g.graph_iters},
                        {"objects_per_task", g.objects_per_task},
                        {"growth_cap", g.growth_cap},
                        {"wcet_lo", g.wcet_lo},
                        {"wcet_hi", g.wcet_hi},
                        {"task_utils", g.task_utils},
                        {"set_utils", g.set_utils},
                        {"core_counts", g.core_counts},
                        {"sets_per_point", g.sets_per_point},
                        {"seed", g.seed}};
}

inline GenConfig gen_config_from_json(const nlohmann::json& j) {
  GenConfig g;
  try {
    if (j.contains("nodes_per_graph")) g.nodes_per_graph = j.at("nodes_per_graph").get<std::vector<int>>();
    if (j.contains("edge_prob")) g.edge_prob = j.at("edge_prob").get<std::vector<double>>();
    if (j.contains("graph_iters")) g.graph_iters = j.at("graph_iters").get<int>();
    if (j.contains("objects_per_task")) g.objects_per_task = j.at("objects_per_task").get<std::vector<int>>();
    if (j.contains("growth_cap")) g.growth_cap = j.at("growth_cap").get<std::vector<double>>();
    if (j.contains("wcet_lo")) g.wcet_lo = j.at("wcet_lo").get<int64_t>();
    if (j.contains("wcet_hi")) g.wcet_hi = j.at("wcet_hi").get<int64_t>();
    if (j.contains("task_utils")) g.task_utils = j.at("task_utils").get<std::vector<double>>();
    if (j.contains("set_utils")) g.set_utils = j.at("set_utils").get<std::vector<double>>();
    if (j.contains("core_counts")) g.core_counts = j.at("core_counts").get<std::vector<int>>();
    if (j.contains("sets_per_point")) g.sets_per_point = j.at("sets_per_point").get<int>();
    if (j.contains("seed")) g.seed = j.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad generator config: ") + e.what());
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  return g;
}

inline nlohmann::json eval_config_to_json(const EvalConfig& c) {
  return nlohmann::json{{"generator", gen_config_to_json(c.gen)},
                        {"timeout_s", c.timeout_s},
                        {"jobs", c.jobs},
                        {"bucket_width", c.bucket_width}};
}

inline EvalConfig eval_config_from_json(const nlohmann::json& j) {
  EvalConfig c;
  try {
    if (j.contains("generator")) c.gen = gen_config_from_json(j.at("generator"));
    if (j.contains("timeout_s")) c.timeout_s = j.at("timeout_s").get<double>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("bucket_width")) c.bucket_width = j.at("bucket_width").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad evaluation config: ") + e.what());
  }
  if (!(c.timeout_s > 0.0)) throw config_error("timeout_s must be positive");
  if (c.jobs < 1) throw config_error("jobs must be >= 1");
  if (!(c.bucket_width > 0.0)) throw config_error("bucket_width must be positive");
  return c;
}

// Serialized low-utilization WCETs per (ordering, pool index). Low tasks run
// sequentially on partitioned cores, so only the post-collapse workload
// matters; the orderings differ only in which merges they reach.
struct SerializeCache {
  std::array<std::vector<double>, 3> wcet;   // indexed by Ordering
  std::array<std::vector<int>, 3> pairs;     // collapses applied

  bool empty() const { return wcet[0].empty(); }
};

inline SerializeCache build_serialize_cache(const TaskPool& pool, uint64_t seed) {
  SerializeCache cache;
  for (auto& v : cache.wcet) v.assign(pool.entries.size(), 0.0);
  for (auto& v : cache.pairs) v.assign(pool.entries.size(), 0);
  for (size_t i = 0; i < pool.entries.size(); ++i) {
    const PoolEntry& e = pool.entries[i];
    if (e.high) continue;  // high tasks use the reduced pool variants instead
    uint64_t s = sub_seed(seed, "serialize", i);
    for (Ordering ord : {Ordering::arbitrary, Ordering::benefit, Ordering::penalty}) {
      Serialized ser = serialize_low_util(e.baseline.graph, e.baseline.deadline, ord, s);
      size_t oi = static_cast<size_t>(ord);
      cache.wcet[oi][i] = ser.wcet;
      cache.pairs[oi][i] = e.baseline.graph.alive_count() - ser.graph.alive_count();
    }
  }
  return cache;
}

struct Generated {
  TaskPool pool;
  std::vector<SetRecord> sets;
  size_t timed_count = 0;
};

inline Generated run_generate(const GenConfig& cfg) {
  cfg.validate();
  Generated out;
  std::vector<Task> timed = generate_timed_tasks(cfg);
  out.timed_count = timed.size();
  out.pool = filter_tasks(timed, cfg.seed);
  out.sets = assemble(out.pool, cfg);
  return out;
}

// ---- analysis fan-out ------------------------------------------------------

inline ResultRow make_result_row(const SetRecord& rec, Approach ap, const AnalyzeResult& res) {
  ResultRow row;
  row.set_id = rec.set_id;
  row.cores = rec.cores;
  row.target_util = rec.target_util;
  row.approach = ap;
  row.schedulable = res.verdict.schedulable;
  row.reason = res.verdict.reason;
  row.m_high = res.m_high;
  row.delta_m = res.delta_m;
  row.delta_C = res.delta_C;
  row.delta_L = res.delta_L;
  row.elapsed_ms = res.elapsed_ms;
  row.delta_C_high = res.delta_C_high;
  row.base_m_high = res.base_m_high;
  row.base_C_high = res.base_C_high;
  return row;
}

// Analyzes every (set, approach) pair. Rows come back ordered by
// (set position, approach position) regardless of worker interleaving.
// If any collapse-based approach times out on a set, all collapse-based
// rows for that set are marked unschedulable with reason "timeout";
// baseline approaches are only penalized by their own timeouts.
inline std::vector<ResultRow> run_analyze(const TaskPool& pool, const std::vector<SetRecord>& sets,
                                          const EvalConfig& cfg,
                                          const SerializeCache* cache = nullptr) {
  SerializeCache local;
  if (cache == nullptr) {
    local = build_serialize_cache(pool, cfg.gen.seed);
    cache = &local;
  }
  const size_t n_ap = cfg.approaches.size();
  std::vector<ResultRow> rows(sets.size() * n_ap);

  auto analyze_set = [&](size_t si) {
    const SetRecord& rec = sets[si];
    TaskSet set;
    set.system_cores = rec.cores;
    set.tasks.reserve(rec.task_indices.size());
    for (int k : rec.task_indices) set.tasks.push_back(pool.entries[static_cast<size_t>(k)].baseline);

    bool ot_timed_out = false;
    for (size_t ai = 0; ai < n_ap; ++ai) {
      Approach ap = cfg.approaches[ai];
      PreparedProvider provider;
      if (uses_collapse(ap)) {
        Ordering ord = ordering_of(ap);
        size_t oi = static_cast<size_t>(ord);
        provider = [&pool, &rec, cache, ord, oi](int ti) {
          size_t k = static_cast<size_t>(rec.task_indices[static_cast<size_t>(ti)]);
          const PoolEntry& e = pool.entries[k];
          PreparedTaskView view;
          if (e.high) {
            view.reduced = &pool.variant(k, ord);
            view.collapsed_pairs = ord == Ordering::arbitrary  ? e.applied_arbitrary
                                   : ord == Ordering::benefit  ? e.applied_benefit
                                                               : e.applied_penalty;
          } else {
            view.serialized_wcet = &cache->wcet[oi][k];
            view.collapsed_pairs = cache->pairs[oi][k];
          }
          return view;
        };
      }
      uint64_t seed = sub_seed(cfg.gen.seed, "analyze", static_cast<uint64_t>(rec.set_id),
                               static_cast<uint64_t>(ai));
      AnalyzeResult res = analyze(set, ap, seed, cfg.timeout_s, provider);
      if (uses_collapse(ap) && res.verdict.reason == Reason::timeout) ot_timed_out = true;
      rows[si * n_ap + ai] = make_result_row(rec, ap, res);
    }
    if (ot_timed_out) {
      for (size_t ai = 0; ai < n_ap; ++ai) {
        if (!uses_collapse(cfg.approaches[ai])) continue;
        ResultRow& row = rows[si * n_ap + ai];
        row.schedulable = false;
        row.reason = Reason::timeout;
      }
    }
  };

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || sets.size() <= 1) {
    for (size_t si = 0; si < sets.size(); ++si) analyze_set(si);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t si = next.fetch_add(1); si < sets.size(); si = next.fetch_add(1)) analyze_set(si);
    };
    std::vector<std::thread> threads;
    size_t n_threads = std::min<size_t>(static_cast<size_t>(jobs), sets.size());
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  return rows;
}

// ---- persistence -----------------------------------------------------------

inline std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string config_hash(const nlohmann::json& j) {
  std::string s = j.dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline constexpr const char* kToolVersion = "1.0.0";

// The manifest is written before any stage output (so a crashed run is
// identifiable) and rewritten with actual counts on completion.
inline nlohmann::json make_manifest(const EvalConfig& cfg, const std::string& command) {
  nlohmann::json planned{{"graphs", cfg.gen.count_graphs()},
                         {"assigned_tasks", cfg.gen.count_assigned()},
                         {"timed_tasks", cfg.gen.count_timed()},
                         {"task_sets", cfg.gen.count_sets()}};
  nlohmann::json config = eval_config_to_json(cfg);
  return nlohmann::json{{"tool", "dagot"},          {"version", kToolVersion},
                        {"command", command},       {"created", iso_utc_now()},
                        {"seed", cfg.gen.seed},     {"config", config},
                        {"config_hash", config_hash(config)}, {"planned", planned}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::string text(results_csv_header());
  text += '\n';
  for (const ResultRow& r : rows) {
    text += result_row_csv(r);
    text += '\n';
  }
  write_text_file(path, text);
}

inline void write_summary_csv(const std::filesystem::path& path,
                              const std::vector<PointSummary>& summaries) {
  std::string text(summary_csv_header());
  text += '\n';
  for (const PointSummary& s : summaries) {
    text += summary_row_csv(s);
    text += '\n';
  }
  write_text_file(path, text);
}

inline std::string pool_task_filename(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task_%05zu.json", index);
  return buf;
}

// Pool layout: pool/{baseline,arbitrary,benefit,penalty}/task_NNNNN.json with
// aligned indices, plus sets/sets.json naming pool indices per set.
inline void write_pool(const std::filesystem::path& dir, const TaskPool& pool) {
  namespace fs = std::filesystem;
  const std::array<std::pair<const char*, int>, 4> variants{
      {{"baseline", -1},
       {"arbitrary", static_cast<int>(Ordering::arbitrary)},
       {"benefit", static_cast<int>(Ordering::benefit)},
       {"penalty", static_cast<int>(Ordering::penalty)}}};
  for (const auto& [name, ord] : variants) {
    fs::path sub = dir / name;
    fs::create_directories(sub);
    for (size_t i = 0; i < pool.entries.size(); ++i) {
      const Task& t = ord < 0 ? pool.entries[i].baseline
                              : pool.variant(i, static_cast<Ordering>(ord));
      write_json_file(sub / pool_task_filename(i), task_to_json(t));
    }
  }
}

inline void write_sets(const std::filesystem::path& path, const std::vector<SetRecord>& sets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SetRecord& s : sets)
    arr.push_back(nlohmann::json{{"set_id", s.set_id},
                                 {"target_U", s.target_util},
                                 {"cores", s.cores},
                                 {"tasks", s.task_indices}});
  write_json_file(path, nlohmann::json{{"sets", arr}});
}

struct EvalOutput {
  std::vector<ResultRow> rows;
  std::vector<PointSummary> summaries;
};

// generate + analyze + aggregate, writing manifest.json (twice: planned, then
// enriched), results.csv and summary.csv into out_dir.
inline EvalOutput run_evaluate(const EvalConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json manifest = make_manifest(cfg, "evaluate");
  write_json_file(out_dir / "manifest.json", manifest);

  Generated gen = run_generate(cfg.gen);
  EvalOutput out;
  out.rows = run_analyze(gen.pool, gen.sets, cfg);
  out.summaries = aggregate(out.rows, cfg.bucket_width);
  write_results_csv(out_dir / "results.csv", out.rows);
  write_summary_csv(out_dir / "summary.csv", out.summaries);

  manifest["completed"] = iso_utc_now();
  manifest["actual"] = nlohmann::json{{"pool_tasks", gen.pool.entries.size()},
                                      {"timed_tasks", gen.timed_count},
                                      {"task_sets", gen.sets.size()},
                                      {"result_rows", out.rows.size()}};
  write_json_file(out_dir / "manifest.json", manifest);
  return out;
}

}  // namespace dagot
