// Command line front end: instance generation, single solves, multistart and
// basin-hopping campaigns, and campaign report flattening. All outputs are
// deterministic for a fixed argument list; wall-clock timing columns are
// zeroed unless --timing is passed.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfw/sfw.hpp"

namespace fs = std::filesystem;
using namespace sfw;

namespace {

std::string algorithm_table() {
  return "algorithm ids:\n"
         "  bcfw       random block, toward steps, plain short step\n"
         "  bcafw-ssc  random block, adaptive toward/away, chained short steps\n"
         "  pafw-ssc   all blocks in parallel, adaptive, chained short steps\n"
         "  gsafw-ssc  best-scoring block, adaptive, chained short steps\n"
         "  pfw-ssc    random block, pairwise, chained short steps\n"
         "  fdfw-ssc   random block, minimal-face, chained short steps\n";
}

std::vector<std::string> parse_algos(const std::string& joined) {
  std::vector<std::string> ids;
  std::size_t begin = 0;
  while (begin <= joined.size()) {
    const std::size_t comma = joined.find(',', begin);
    const std::size_t end = comma == std::string::npos ? joined.size() : comma;
    if (end > begin) ids.push_back(joined.substr(begin, end - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  for (const std::string& id : ids) algorithm_config(id);  // validate early
  if (ids.empty()) throw std::runtime_error("no algorithm ids given");
  return ids;
}

void write_text_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string aggregate_body(const std::vector<AggregateTrajectory>& aggregates) {
  std::ostringstream out;
  write_aggregate_csv(out, aggregates);
  return out.str();
}

void write_diagnostics_csv(const fs::path& path, const std::string& run_id,
                           const QuadraticProblem& problem, const RunResult& res) {
  const std::optional<std::size_t> k_id = identification_iteration(res.supports);
  const BlockVector grad = problem.eval_grad(res.final_x);
  const std::vector<bool> sc = strict_complementarity(res.final_x, grad);
  std::string sc_flags;
  for (bool b : sc) sc_flags += b ? '1' : '0';

  std::vector<double> gaps;
  for (const TrajectoryRow& row : res.trajectory) {
    const double gap = row.f - res.final_f;
    if (gap > 0.0) gaps.push_back(gap);
  }
  double q_hat = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  if (gaps.size() >= 2) {
    if (const auto fit = rate_fit(gaps)) {
      q_hat = fit->q_hat;
      r_squared = fit->r_squared;
    }
  }
  std::ostringstream out;
  out << "run_id,k_id,final_l0,sc_flags,q_hat,r_squared\n";
  out << run_id << ',' << (k_id ? static_cast<long>(*k_id) : -1L) << ','
      << ProductSimplexDomain(problem.layout()).l0_norm(res.final_x) << ',' << sc_flags
      << ',' << fmt_g17(q_hat) << ',' << fmt_g17(r_squared) << '\n';
  write_text_file(path, out.str());
}

ManifestEntries with_markers(ManifestEntries entries, std::vector<std::string> markers) {
  std::sort(markers.begin(), markers.end());
  for (const std::string& marker : markers) entries.emplace_back("run." + marker, "done");
  return entries;
}

std::string multistart_runs_body(const MultistartOutcome& outcome,
                                 const std::vector<std::string>& algos) {
  std::ostringstream out;
  out << "run_id,objective,start,algorithm_id,final_f,final_gap,grad_evals,iters,"
         "final_l0,reason\n";
  for (const RunSummary& s : outcome.runs) {
    const std::string& algo = algos[static_cast<std::size_t>(s.algorithm_index)];
    out << algo << "-o" << s.objective_index << "-s" << s.start_index << ','
        << s.objective_index << ',' << s.start_index << ',' << algo << ','
        << fmt_g17(s.final_f) << ',' << fmt_g17(s.final_gap) << ',' << s.grad_evals << ','
        << s.iters << ',' << s.final_l0 << ',' << to_string(s.reason) << '\n';
  }
  return out.str();
}

void run_multistart_dir(const fs::path& dir, MultistartPlan plan, int jobs, bool replay) {
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.txt";
  if (replay) {
    plan = multistart_plan_from_manifest(read_manifest(manifest_path.string()));
  }
  plan.budget_grads = plan.resolved_budget();
  write_manifest(manifest_path.string(), plan_to_manifest(plan, "running"));
  try {
    const MultistartOutcome outcome = run_multistart_plan(plan, jobs);
    write_text_file(dir / "aggregate.csv", aggregate_body(outcome.aggregates));
    write_text_file(dir / "runs.csv", multistart_runs_body(outcome, plan.algorithms));
    std::vector<std::string> markers;
    for (const RunSummary& s : outcome.runs)
      markers.push_back(plan.algorithms[static_cast<std::size_t>(s.algorithm_index)] +
                        "-o" + std::to_string(s.objective_index) + "-s" +
                        std::to_string(s.start_index));
    write_manifest(manifest_path.string(),
                   with_markers(plan_to_manifest(plan, "complete"), std::move(markers)));
  } catch (...) {
    write_manifest(manifest_path.string(), plan_to_manifest(plan, "incomplete"));
    throw;
  }
  std::cout << "multistart campaign written to " << dir.string() << "\n";
}

void run_mbh_dir(const fs::path& dir, MBHPlan plan, int jobs, bool replay) {
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.txt";
  if (replay) {
    plan = mbh_plan_from_manifest(read_manifest(manifest_path.string()));
  }
  if (plan.lo_budget_grads <= 0) plan.lo_budget_grads = 10L * plan.m;
  write_manifest(manifest_path.string(), plan_to_manifest(plan, "running"));
  try {
    const MBHCampaignOutcome outcome = run_mbh_plan(plan, jobs);
    write_text_file(dir / "aggregate.csv", aggregate_body(outcome.aggregates));
    std::vector<std::string> markers;
    for (int o = 0; o < plan.objectives; ++o)
      for (int r = 0; r < plan.repetitions; ++r)
        for (const std::string& algo : plan.algorithms)
          markers.push_back(algo + "-o" + std::to_string(o) + "-r" + std::to_string(r));
    write_manifest(manifest_path.string(),
                   with_markers(plan_to_manifest(plan, "complete"), std::move(markers)));
  } catch (...) {
    write_manifest(manifest_path.string(), plan_to_manifest(plan, "incomplete"));
    throw;
  }
  std::cout << "basin-hopping campaign written to " << dir.string() << "\n";
}

void run_report(const fs::path& campaign, const fs::path& out_path) {
  const ManifestMap manifest = read_manifest((campaign / "manifest.txt").string());
  const std::string kind = manifest_get(manifest, "kind");
  const std::string l = manifest_get(manifest, "l");
  const std::string m = manifest_get(manifest, "m");
  const std::string master_seed = manifest_get(manifest, "master_seed");
  std::ifstream agg(campaign / "aggregate.csv");
  if (!agg)
    throw std::runtime_error("cannot open " + (campaign / "aggregate.csv").string());
  std::ostringstream out;
  out << "kind,l,m,master_seed,algorithm_id,axis_tick,mean_gap,std_gap,mean_l0,std_l0\n";
  std::string line;
  std::getline(agg, line);  // skip the aggregate header
  if (line != "axis_tick,mean_gap,std_gap,mean_l0,std_l0,algorithm_id")
    throw std::runtime_error("unexpected aggregate.csv header: " + line);
  while (std::getline(agg, line)) {
    if (line.empty()) continue;
    // split off the trailing algorithm_id column
    const std::size_t last_comma = line.rfind(',');
    if (last_comma == std::string::npos)
      throw std::runtime_error("malformed aggregate.csv row: " + line);
    const std::string metrics = line.substr(0, last_comma);
    const std::string algo = line.substr(last_comma + 1);
    out << kind << ',' << l << ',' << m << ',' << master_seed << ',' << algo << ','
        << metrics << '\n';
  }
  write_text_file(out_path, out.str());
  std::cout << "report written to " << out_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-coordinate simplex solver toolkit.\n\n" + algorithm_table()};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random block-decomposable instance");
  int gen_l = 0, gen_m = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  double gen_epsilon = -1.0;
  gen->add_option("--l", gen_l, "Block size (must be at least 4)")->required();
  gen->add_option("--m", gen_m, "Number of blocks")->required();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output instance path")->required();
  gen->add_option("--epsilon", gen_epsilon,
                  "Coupling strength; negative keeps the default 1/(2 m^2)")
      ->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "Run one local solve on an instance");
  std::string solve_instance, solve_algo = "bcafw-ssc", solve_out, solve_run_id;
  std::string solve_diag, solve_trace;
  long solve_budget = 0, solve_max_iters = 1000000;
  double solve_tol = 1e-6;
  std::uint64_t solve_seed = 0;
  bool solve_timing = false, solve_check = false;
  solve->add_option("--instance", solve_instance, "Instance file from gen")->required();
  solve->add_option("--algo", solve_algo, "Algorithm id (see the table above)")
      ->capture_default_str();
  solve->add_option("--budget-grads", solve_budget,
                    "Gradient evaluation budget; 0 means unlimited")
      ->capture_default_str();
  solve->add_option("--max-iters", solve_max_iters, "Outer iteration cap")
      ->capture_default_str();
  solve->add_option("--tol", solve_tol, "Stationarity tolerance on the largest block gap")
      ->capture_default_str();
  solve->add_option("--seed", solve_seed,
                    "Run seed; drives the start point and block selection")
      ->capture_default_str();
  solve->add_option("--out", solve_out, "Trajectory CSV path")->required();
  solve->add_option("--run-id", solve_run_id,
                    "Run id written into the CSVs; default <algo>-s<seed>");
  solve->add_option("--diag", solve_diag, "Write a diagnostics CSV to this path");
  solve->add_option("--ssc-trace", solve_trace, "Write the chain trace CSV to this path");
  solve->add_flag("--timing", solve_timing,
                  "Emit real elapsed milliseconds instead of zeros");
  solve->add_flag("--check-decrease", solve_check,
                  "Verify the per-chain decrease contract while solving");

  // multistart
  auto* ms = app.add_subcommand("multistart", "Run a multistart comparison campaign");
  int ms_l = 20, ms_m = 20, ms_objectives = 5, ms_starts = 4, ms_jobs = 1;
  std::uint64_t ms_master = 0;
  long ms_budget = 0;
  std::string ms_algos = "bcfw,bcafw-ssc,pafw-ssc,gsafw-ssc", ms_dir;
  bool ms_replay = false;
  ms->add_option("--l", ms_l, "Block size")->capture_default_str();
  ms->add_option("--m", ms_m, "Number of blocks")->capture_default_str();
  ms->add_option("--master-seed", ms_master, "Master seed for objectives and starts")
      ->capture_default_str();
  ms->add_option("--objectives", ms_objectives, "Number of random objectives")
      ->capture_default_str();
  ms->add_option("--starts", ms_starts, "Number of start points per objective")
      ->capture_default_str();
  ms->add_option("--budget-grads", ms_budget, "Shared gradient budget; 0 means 50*m")
      ->capture_default_str();
  ms->add_option("--algos", ms_algos, "Comma-separated algorithm ids")
      ->capture_default_str();
  ms->add_option("--out-dir", ms_dir, "Campaign output directory")->required();
  ms->add_option("--jobs", ms_jobs, "Worker threads; results do not depend on this")
      ->capture_default_str();
  ms->add_flag("--replay", ms_replay, "Re-run the plan recorded in the manifest");

  // mbh
  auto* mbh = app.add_subcommand("mbh", "Run a monotonic basin-hopping campaign");
  int mbh_l = 20, mbh_m = 20, mbh_objectives = 5, mbh_runs = 10, mbh_imax = 9,
      mbh_jobs = 1;
  std::uint64_t mbh_master = 0;
  double mbh_gamma = 0.25;
  long mbh_lo_budget = 0;
  std::string mbh_algos = "bcfw,bcafw-ssc,pafw-ssc,gsafw-ssc", mbh_dir;
  bool mbh_replay = false;
  mbh->add_option("--l", mbh_l, "Block size")->capture_default_str();
  mbh->add_option("--m", mbh_m, "Number of blocks")->capture_default_str();
  mbh->add_option("--master-seed", mbh_master, "Master seed")->capture_default_str();
  mbh->add_option("--objectives", mbh_objectives, "Number of random objectives")
      ->capture_default_str();
  mbh->add_option("--runs", mbh_runs, "Repetitions per objective")->capture_default_str();
  mbh->add_option("--imax", mbh_imax, "Perturbation rounds after the first solve")
      ->capture_default_str();
  mbh->add_option("--gamma", mbh_gamma, "Perturbation shrink factor in [0,1]")
      ->capture_default_str();
  mbh->add_option("--lo-budget", mbh_lo_budget,
                  "Gradient budget per local solve; 0 means 10*m")
      ->capture_default_str();
  mbh->add_option("--algos", mbh_algos, "Comma-separated algorithm ids")
      ->capture_default_str();
  mbh->add_option("--out-dir", mbh_dir, "Campaign output directory")->required();
  mbh->add_option("--jobs", mbh_jobs, "Worker threads; results do not depend on this")
      ->capture_default_str();
  mbh->add_flag("--replay", mbh_replay, "Re-run the plan recorded in the manifest");

  // report
  auto* report = app.add_subcommand("report", "Flatten a campaign into one long CSV");
  std::string report_dir, report_out;
  report->add_option("--campaign", report_dir, "Campaign directory with a manifest")
      ->required();
  report->add_option("--out", report_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::optional<double> eps;
      if (gen_epsilon >= 0.0) eps = gen_epsilon;
      const QuadraticProblem problem = gen_multistqp(gen_l, gen_m, gen_seed, eps);
      save_instance(gen_out, problem);
      std::cout << "wrote " << gen_out << " n=" << problem.dim()
                << " L=" << fmt_g17(problem.lipschitz()) << "\n";
    } else if (solve->parsed()) {
      const QuadraticProblem problem = load_instance(solve_instance);
      SolverConfig cfg = algorithm_config(solve_algo);
      if (solve_budget > 0) cfg.budget_grads = solve_budget;
      cfg.max_iters = solve_max_iters;
      cfg.tol = solve_tol;
      cfg.seed = solve_seed;
      cfg.check_decrease = solve_check;
      cfg.record_ssc_trace = !solve_trace.empty();
      const ProductSimplexDomain domain(problem.layout());
      Rng start_rng(derive_seed(solve_seed, "start-point"));
      const BlockVector x0 = domain.sample_uniform(start_rng);
      const RunResult res = run(problem, x0, cfg);
      const std::string run_id =
          solve_run_id.empty() ? solve_algo + "-s" + std::to_string(solve_seed)
                               : solve_run_id;
      std::ofstream out(solve_out, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + solve_out);
      write_trajectory_csv(out, run_id, res, solve_timing);
      if (!out) throw std::runtime_error("write failed for " + solve_out);
      if (!solve_diag.empty()) write_diagnostics_csv(solve_diag, run_id, problem, res);
      if (!solve_trace.empty()) {
        std::ofstream trace(solve_trace, std::ios::trunc);
        if (!trace) throw std::runtime_error("cannot open " + solve_trace);
        write_chain_trace_csv(trace, run_id, res);
      }
      std::cout << "reason=" << to_string(res.reason) << " f=" << fmt_g17(res.final_f)
                << " max_gap=" << fmt_g17(res.trajectory.back().max_gap)
                << " iters=" << res.iters << " grad_evals=" << res.grad_evals << "\n";
    } else if (ms->parsed()) {
      MultistartPlan plan;
      plan.l = ms_l;
      plan.m = ms_m;
      plan.master_seed = ms_master;
      plan.objectives = ms_objectives;
      plan.starts = ms_starts;
      plan.budget_grads = ms_budget;
      plan.algorithms = parse_algos(ms_algos);
      run_multistart_dir(ms_dir, plan, ms_jobs, ms_replay);
    } else if (mbh->parsed()) {
      MBHPlan plan;
      plan.l = mbh_l;
      plan.m = mbh_m;
      plan.master_seed = mbh_master;
      plan.objectives = mbh_objectives;
      plan.repetitions = mbh_runs;
      plan.i_max = mbh_imax;
      plan.gamma = mbh_gamma;
      plan.lo_budget_grads = mbh_lo_budget;
      plan.algorithms = parse_algos(mbh_algos);
      run_mbh_dir(mbh_dir, plan, mbh_jobs, mbh_replay);
    } else if (report->parsed()) {
      run_report(report_dir, report_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
