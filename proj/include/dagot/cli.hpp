#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dagot/pipeline.hpp"
#include "dagot/simulator.hpp"

// Subcommand implementations behind the dagot binary. Argument parsing stays
// in the tool's main(); these functions take plain option structs so they are
// exercisable without a process boundary. Exit codes: 0 success, 1 invalid
// input or runtime failure, 2 configuration/usage errors.
namespace dagot::cli {

inline Ordering parse_ordering(const std::string& s) {
  if (s == "arbitrary") return Ordering::arbitrary;
  if (s == "benefit") return Ordering::benefit;
  if (s == "penalty") return Ordering::penalty;
  throw config_error("unknown ordering: " + s + " (expected arbitrary|benefit|penalty)");
}

inline EvalConfig load_eval_config(const std::string& config_path,
                                   std::optional<uint64_t> seed_override) {
  EvalConfig cfg;
  if (!config_path.empty()) cfg = eval_config_from_json(load_json_file(config_path));
  if (seed_override) cfg.gen.seed = *seed_override;
  return cfg;
}

// ---- generate ---------------------------------------------------------------

struct GenerateOpts {
  std::string config_path;  // empty -> built-in defaults
  std::optional<uint64_t> seed;
  std::string out_dir = "gen-out";
};

inline int cmd_generate(const GenerateOpts& opt) {
  namespace fs = std::filesystem;
  EvalConfig cfg = load_eval_config(opt.config_path, opt.seed);
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  nlohmann::json manifest = make_manifest(cfg, "generate");
  write_json_file(dir / "manifest.json", manifest);

  Generated gen = run_generate(cfg.gen);
  write_pool(dir / "pool", gen.pool);
  fs::create_directories(dir / "sets");
  write_sets(dir / "sets" / "sets.json", gen.sets);

  manifest["completed"] = iso_utc_now();
  manifest["actual"] = nlohmann::json{{"pool_tasks", gen.pool.entries.size()},
                                      {"timed_tasks", gen.timed_count},
                                      {"task_sets", gen.sets.size()}};
  write_json_file(dir / "manifest.json", manifest);
  std::cout << "generated " << gen.pool.entries.size() << " pool tasks ("
            << gen.timed_count << " before filtration), " << gen.sets.size()
            << " task sets -> " << dir.string() << "\n";
  return 0;
}

// ---- collapse ---------------------------------------------------------------

struct CollapseOpts {
  std::string task_path;
  std::string ordering = "benefit";
  uint64_t seed = 0;
  std::string out_path;  // empty -> <stem>.collapsed.json next to the input
};

inline int cmd_collapse(const CollapseOpts& opt) {
  namespace fs = std::filesystem;
  Task task = load_task_file(opt.task_path);
  Ordering ord = parse_ordering(opt.ordering);
  ReduceResult red = dagot_reduce(task.graph, task.deadline, ord, opt.seed);

  Task collapsed{red.graph, task.period, task.deadline};
  fs::path in(opt.task_path);
  fs::path out = opt.out_path.empty()
                     ? in.parent_path() / (in.stem().string() + ".collapsed.json")
                     : fs::path(opt.out_path);
  std::map<NodeId, std::vector<NodeId>> history = red.merges.history();
  write_json_file(out, task_to_json(collapsed, &history));

  TaskMetrics m = task_metrics(task, collapsed);
  nlohmann::json rep{{"ordering", to_string(ord)},
                     {"applied", red.applied},
                     {"C_pre", m.C_pre},
                     {"C_post", m.C_post},
                     {"L_pre", m.L_pre},
                     {"L_post", m.L_post},
                     {"m_real_pre", m.m_real_pre},
                     {"m_real_post", m.m_real_post},
                     {"delta_C", m.delta_C},
                     {"delta_L", m.delta_L},
                     {"out", out.string()}};
  rep["m_pre"] = m.m_pre ? nlohmann::json(*m.m_pre) : nlohmann::json(nullptr);
  rep["m_post"] = m.m_post ? nlohmann::json(*m.m_post) : nlohmann::json(nullptr);
  rep["m_saved"] = m.m_saved ? nlohmann::json(*m.m_saved) : nlohmann::json(nullptr);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeOpts {
  std::string set_path;
  std::vector<std::string> approaches;  // empty -> all five
  std::optional<int> cores;             // override the set file
  uint64_t seed = 0;
  double timeout_s = 600.0;
  std::string out_csv;       // empty -> stdout only
  std::string verdicts_dir;  // empty -> skip per-approach verdict files
};

// Set file schema: {"cores": int, "tasks": [<path> | <inline task>, ...]}.
// Relative task paths resolve against the set file's directory.
inline TaskSet load_set_file(const std::string& path, std::optional<int> cores_override) {
  namespace fs = std::filesystem;
  nlohmann::json j = load_json_file(path);
  TaskSet set;
  try {
    set.system_cores = cores_override ? *cores_override : j.at("cores").get<int>();
    const nlohmann::json& tasks = j.at("tasks");
    if (!tasks.is_array() || tasks.empty()) throw config_error("set file: tasks must be a nonempty array");
    fs::path base = fs::path(path).parent_path();
    for (const nlohmann::json& entry : tasks) {
      if (entry.is_string()) {
        fs::path p(entry.get<std::string>());
        if (p.is_relative()) p = base / p;
        set.tasks.push_back(load_task_file(p.string()));
      } else {
        set.tasks.push_back(task_from_json(entry));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad set file: ") + e.what());
  }
  if (set.system_cores < 1) throw config_error("set file: cores must be >= 1");
  return set;
}

inline int cmd_analyze(const AnalyzeOpts& opt) {
  namespace fs = std::filesystem;
  TaskSet set = load_set_file(opt.set_path, opt.cores);
  std::vector<Approach> approaches;
  if (opt.approaches.empty()) {
    approaches = {Approach::b_np, Approach::b_p, Approach::ot_a, Approach::ot_g, Approach::ot_l};
  } else {
    for (const std::string& s : opt.approaches) {
      std::optional<Approach> ap = parse_approach(s);
      if (!ap) throw config_error("unknown approach: " + s + " (expected B-NP|B-P|OT-A|OT-G|OT-L)");
      approaches.push_back(*ap);
    }
  }

  double total_util = 0.0;
  for (const Task& t : set.tasks) total_util += utilization(t);

  std::vector<ResultRow> rows;
  std::vector<AnalyzeResult> results;
  bool ot_timed_out = false;
  for (size_t ai = 0; ai < approaches.size(); ++ai) {
    Approach ap = approaches[ai];
    AnalyzeResult res = analyze(set, ap, sub_seed(opt.seed, "analyze", 0, ai), opt.timeout_s);
    if (uses_collapse(ap) && res.verdict.reason == Reason::timeout) ot_timed_out = true;
    SetRecord rec;
    rec.set_id = 0;
    rec.target_util = total_util;
    rec.cores = set.system_cores;
    rows.push_back(make_result_row(rec, ap, res));
    results.push_back(std::move(res));
  }
  if (ot_timed_out) {
    for (size_t ai = 0; ai < approaches.size(); ++ai) {
      if (!uses_collapse(approaches[ai])) continue;
      rows[ai].schedulable = false;
      rows[ai].reason = Reason::timeout;
      results[ai].verdict.schedulable = false;
      results[ai].verdict.reason = Reason::timeout;
    }
  }

  std::string csv(results_csv_header());
  csv += '\n';
  for (const ResultRow& r : rows) {
    csv += result_row_csv(r);
    csv += '\n';
  }
  std::cout << csv;
  if (!opt.out_csv.empty()) write_text_file(opt.out_csv, csv);
  if (!opt.verdicts_dir.empty()) {
    fs::create_directories(opt.verdicts_dir);
    for (size_t ai = 0; ai < approaches.size(); ++ai) {
      fs::path p = fs::path(opt.verdicts_dir) / (std::string(to_string(approaches[ai])) + ".json");
      write_json_file(p, verdict_to_json(approaches[ai], results[ai]));
    }
  }
  return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOpts {
  std::string task_path;
  int cores = 0;  // 0 -> use the task's own core allocation
  int runs = 1;
  std::string tie_break = "downstream";
  uint64_t seed = 0;
  double early_floor = 1.0;
  std::string trace_path;  // empty -> no trace CSV
};

inline int cmd_simulate(const SimulateOpts& opt) {
  Task task = load_task_file(opt.task_path);
  int m = opt.cores;
  if (m <= 0) {
    std::optional<int> alloc = allocate_cores(task);
    if (!alloc) throw std::runtime_error(
        "task is infeasible (critical path exceeds deadline); pass --cores explicitly");
    m = *alloc;
  }
  if (opt.runs < 1) throw config_error("--runs must be >= 1");
  TieBreak tb;
  if (opt.tie_break == "downstream") tb = TieBreak::downstream;
  else if (opt.tie_break == "random") tb = TieBreak::random;
  else throw config_error("unknown tie-break: " + opt.tie_break + " (expected downstream|random)");
  if (!(opt.early_floor > 0.0 && opt.early_floor <= 1.0))
    throw config_error("--early-floor must be in (0, 1]");

  double C = workload(task.graph);
  double L = critical_path(task.graph).length;
  double bound = L + (m > 0 ? (C - L) / m : 0.0);

  nlohmann::json per_run = nlohmann::json::array();
  double worst = -1.0;
  SimTrace worst_trace;
  bool all_met = true;
  for (int r = 0; r < opt.runs; ++r) {
    SimConfig cfg;
    cfg.tie_break = tb;
    cfg.seed = sub_seed(opt.seed, "sim-run", static_cast<uint64_t>(r));
    cfg.early_floor = opt.early_floor;
    SimTrace trace = simulate(task.graph, m, cfg);
    bool graham_ok = check_graham(trace, task.graph, m);
    bool met = trace.makespan <= task.deadline + 1e-9;
    all_met = all_met && met;
    per_run.push_back(nlohmann::json{{"makespan", trace.makespan},
                                     {"workload_measured", measure_workload(trace)},
                                     {"graham_ok", graham_ok},
                                     {"deadline_met", met}});
    if (trace.makespan > worst) {
      worst = trace.makespan;
      worst_trace = std::move(trace);
    }
  }

  if (!opt.trace_path.empty()) {
    std::string csv = "time,core,node,event\n";
    for (const SimEvent& e : worst_trace.events) {
      csv += fmt_general(e.time);
      csv += ',';
      csv += std::to_string(e.core);
      csv += ',';
      csv += std::to_string(task.graph.nodes[static_cast<size_t>(e.node)].ext_id);
      csv += ',';
      csv += e.start ? "start" : "finish";
      csv += '\n';
    }
    write_text_file(opt.trace_path, csv);
  }

  nlohmann::json rep{{"cores", m},
                     {"runs", opt.runs},
                     {"tie_break", opt.tie_break},
                     {"early_floor", opt.early_floor},
                     {"workload", C},
                     {"critical_path", L},
                     {"graham_bound", bound},
                     {"deadline", task.deadline},
                     {"worst_makespan", worst},
                     {"deadline_met", all_met},
                     {"per_run", per_run}};
  std::cout << rep.dump(2) << "\n";
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir = "eval-out";
  std::optional<int> jobs;
  std::optional<double> timeout_s;
};

inline int cmd_evaluate(const EvaluateOpts& opt) {
  EvalConfig cfg = load_eval_config(opt.config_path, opt.seed);
  if (opt.jobs) cfg.jobs = *opt.jobs;
  if (opt.timeout_s) cfg.timeout_s = *opt.timeout_s;
  if (cfg.jobs < 1) throw config_error("--jobs must be >= 1");
  if (!(cfg.timeout_s > 0.0)) throw config_error("--timeout must be positive");
  EvalOutput out = run_evaluate(cfg, opt.out_dir);
  size_t sched = 0;
  for (const ResultRow& r : out.rows)
    if (r.schedulable) ++sched;
  std::cout << "evaluated " << out.rows.size() << " (set, approach) pairs, " << sched
            << " schedulable -> " << opt.out_dir << "\n";
  return 0;
}

}  // namespace dagot::cli
