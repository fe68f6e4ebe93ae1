// dagot: cache-aware federated scheduling toolbox for parallel DAG tasks.
//
// Subcommands:
//   generate  build the synthetic task population and task sets
//   collapse  merge same-object nodes of one task and report the metrics
//   analyze   run schedulability analyses on one task set
//   simulate  run the non-preemptive list scheduler on one task
//   evaluate  full generate -> analyze -> aggregate pipeline

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "dagot/cli.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("DAGOT_JOBS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache-aware federated scheduling for parallel DAG tasks"};
  app.set_version_flag("--version", std::string("dagot ") + dagot::kToolVersion);
  app.require_subcommand(1);

  dagot::cli::GenerateOpts gen_opts;
  std::optional<uint64_t> gen_seed;
  CLI::App* gen = app.add_subcommand("generate", "generate the task population and task sets");
  gen->add_option("--config,-c", gen_opts.config_path, "evaluation config JSON");
  gen->add_option("--seed,-s", gen_seed, "master seed (overrides config)");
  gen->add_option("--out,-o", gen_opts.out_dir, "output directory")->capture_default_str();

  dagot::cli::CollapseOpts col_opts;
  CLI::App* col = app.add_subcommand("collapse", "collapse one task and report metrics");
  col->add_option("task", col_opts.task_path, "task JSON file")->required();
  col->add_option("--ordering", col_opts.ordering, "arbitrary|benefit|penalty")
      ->capture_default_str();
  col->add_option("--seed,-s", col_opts.seed, "seed for the arbitrary ordering");
  col->add_option("--out,-o", col_opts.out_path, "collapsed task output path");

  dagot::cli::AnalyzeOpts ana_opts;
  std::optional<int> ana_cores;
  CLI::App* ana = app.add_subcommand("analyze", "run schedulability analyses on a task set");
  ana->add_option("set", ana_opts.set_path, "task set JSON file")->required();
  ana->add_option("--approach,-a", ana_opts.approaches,
                  "B-NP|B-P|OT-A|OT-G|OT-L (repeatable; default: all)");
  ana->add_option("--cores,-m", ana_cores, "override the set's core count");
  ana->add_option("--seed,-s", ana_opts.seed, "master seed");
  ana->add_option("--timeout", ana_opts.timeout_s, "per-approach timeout in seconds")
      ->capture_default_str();
  ana->add_option("--out,-o", ana_opts.out_csv, "also write the results CSV here");
  ana->add_option("--verdicts", ana_opts.verdicts_dir, "write per-approach verdict JSON files");

  dagot::cli::SimulateOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "simulate one task on m cores");
  sim->add_option("task", sim_opts.task_path, "task JSON file")->required();
  sim->add_option("--cores,-m", sim_opts.cores, "core count (default: the task's allocation)");
  sim->add_option("--runs", sim_opts.runs, "number of runs")->capture_default_str();
  sim->add_option("--tie-break", sim_opts.tie_break, "downstream|random")->capture_default_str();
  sim->add_option("--seed,-s", sim_opts.seed, "seed for random tie-break and early completion");
  sim->add_option("--early-floor", sim_opts.early_floor,
                  "scale node durations by U[f,1]; 1 disables")
      ->capture_default_str();
  sim->add_option("--trace", sim_opts.trace_path, "write the worst run's event trace CSV");

  dagot::cli::EvaluateOpts eval_opts;
  std::optional<uint64_t> eval_seed;
  std::optional<int> eval_jobs;
  std::optional<double> eval_timeout;
  CLI::App* eva = app.add_subcommand("evaluate", "full generate/analyze/aggregate pipeline");
  eva->add_option("--config,-c", eval_opts.config_path, "evaluation config JSON");
  eva->add_option("--seed,-s", eval_seed, "master seed (overrides config)");
  eva->add_option("--out,-o", eval_opts.out_dir, "output directory")->capture_default_str();
  eva->add_option("--jobs,-j", eval_jobs, "worker threads (default: $DAGOT_JOBS or 1)");
  eva->add_option("--timeout", eval_timeout, "per-approach timeout in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gen_opts.seed = gen_seed;
      return dagot::cli::cmd_generate(gen_opts);
    }
    if (*col) return dagot::cli::cmd_collapse(col_opts);
    if (*ana) {
      ana_opts.cores = ana_cores;
      return dagot::cli::cmd_analyze(ana_opts);
    }
    if (*sim) return dagot::cli::cmd_simulate(sim_opts);
    if (*eva) {
      eval_opts.seed = eval_seed;
      eval_opts.jobs = eval_jobs ? eval_jobs : std::optional<int>(default_jobs());
      eval_opts.timeout_s = eval_timeout;
      return dagot::cli::cmd_evaluate(eval_opts);
    }
  } catch (const dagot::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
