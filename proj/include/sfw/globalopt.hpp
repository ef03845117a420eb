#pragma once

// Global phase on top of the local solver: monotonic basin hopping and
// multistart campaigns with trajectory aggregation on the shared
// gradient-evaluation axis.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sfw/domain.hpp"
#include "sfw/io.hpp"
#include "sfw/solver.hpp"

namespace sfw {

// Runs fn(0..num_tasks-1) on up to jobs worker threads. Tasks must write only
// to their own slots; the first exception is rethrown after all workers join.
inline void parallel_for(int num_tasks, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || num_tasks <= 1) {
    for (int t = 0; t < num_tasks; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int workers = jobs < num_tasks ? jobs : num_tasks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= num_tasks || failed.load()) return;
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Uniform draw from {x + gamma * (y - x) : y uniform on the product domain}.
inline BlockVector perturb(const BlockVector& x_best, double gamma,
                           const ProductSimplexDomain& domain, Rng& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("perturb: gamma must lie in [0, 1]");
  const BlockVector y = domain.sample_uniform(rng);
  BlockVector out = x_best;
  for (std::size_t j = 0; j < out.data().size(); ++j)
    out.data()[j] += gamma * (y.data()[j] - out.data()[j]);
  return out;
}

struct MBHConfig {
  int i_max = 9;         // perturbation rounds after the first local solve
  double gamma = 0.25;   // neighborhood shrink factor
  long lo_budget_grads = 0;  // per local solve; 0 selects 10 * m
  std::uint64_t seed = 0;
  SolverConfig solver;   // budget and seed fields are overridden per call
};

struct MBHResult {
  std::vector<double> incumbent_f;  // i_max + 1 entries, nonincreasing
  std::vector<int> incumbent_l0;
  BlockVector best_x;
  double best_f = 0.0;
  long lo_calls = 0;
  long grad_evals_total = 0;
};

// Monotonic basin hopping: local solve, keep the incumbent, perturb the
// incumbent, repeat. Exactly i_max + 1 local solves.
inline MBHResult mbh_run(const QuadraticProblem& problem, const MBHConfig& cfg) {
  if (cfg.i_max < 0) throw std::invalid_argument("mbh_run: i_max must be >= 0");
  const ProductSimplexDomain domain(problem.layout());
  const long lo_budget = cfg.lo_budget_grads > 0
                             ? cfg.lo_budget_grads
                             : 10L * problem.layout()->num_blocks();
  Rng start_rng(derive_seed(cfg.seed, "mbh-start"));
  Rng perturb_rng(derive_seed(cfg.seed, "mbh-perturb"));

  MBHResult out;
  BlockVector x_bar = domain.sample_uniform(start_rng);
  BlockVector incumbent = x_bar;
  double f_incumbent = problem.eval_f(x_bar);
  for (int i = 0; i <= cfg.i_max; ++i) {
    SolverConfig lo = cfg.solver;
    lo.budget_grads = lo_budget;
    lo.seed = derive_seed(cfg.seed, "mbh-lo", static_cast<std::uint64_t>(i));
    lo.record_supports = false;
    lo.record_ssc_trace = false;
    const RunResult res = run(problem, x_bar, lo);
    ++out.lo_calls;
    out.grad_evals_total += res.grad_evals;
    if (res.final_f < f_incumbent) {
      incumbent = res.final_x;
      f_incumbent = res.final_f;
    }
    out.incumbent_f.push_back(f_incumbent);
    out.incumbent_l0.push_back(domain.l0_norm(incumbent));
    if (i < cfg.i_max) x_bar = perturb(incumbent, cfg.gamma, domain, perturb_rng);
  }
  out.best_x = std::move(incumbent);
  out.best_f = f_incumbent;
  return out;
}

struct AlgorithmSpec {
  std::string id;
  SolverConfig config;
};

struct AggregateRow {
  long axis_tick = 0;
  double mean_gap = 0.0;
  double std_gap = 0.0;
  double mean_l0 = 0.0;
  double std_l0 = 0.0;
};

struct AggregateTrajectory {
  std::string algorithm_id;
  std::vector<AggregateRow> rows;
};

inline void write_aggregate_csv(std::ostream& out,
                                std::span<const AggregateTrajectory> aggregates) {
  out << "axis_tick,mean_gap,std_gap,mean_l0,std_l0,algorithm_id\n";
  for (const AggregateTrajectory& agg : aggregates) {
    for (const AggregateRow& r : agg.rows) {
      out << r.axis_tick << ',' << fmt_g17(r.mean_gap) << ',' << fmt_g17(r.std_gap) << ','
          << fmt_g17(r.mean_l0) << ',' << fmt_g17(r.std_l0) << ',' << agg.algorithm_id
          << '\n';
    }
  }
}

struct RunSummary {
  int objective_index = 0;
  int start_index = 0;
  int algorithm_index = 0;
  double final_f = 0.0;
  double final_gap = 0.0;
  long grad_evals = 0;
  long iters = 0;
  int final_l0 = 0;
  StopReason reason = StopReason::MaxIters;
};

struct MultistartOutcome {
  std::vector<AggregateTrajectory> aggregates;  // one per algorithm
  std::vector<double> objective_best_f;         // best final value per objective
  std::vector<double> objective_gap_ref;        // best minus the gap offset
  std::vector<RunSummary> runs;                 // objective-major, then start, then algorithm
};

namespace detail {

struct SampledSeries {
  std::vector<long> ticks;
  std::vector<double> f;
  std::vector<double> l0;
};

// Forward-fills a monotone trajectory onto the tick grid 0..budget.
inline SampledSeries sample_on_grid(const std::vector<TrajectoryRow>& rows, long budget) {
  SampledSeries s;
  s.ticks.reserve(static_cast<std::size_t>(budget + 1));
  std::size_t r = 0;
  double cur_f = rows.front().f;
  double cur_l0 = rows.front().l0_norm;
  for (long t = 0; t <= budget; ++t) {
    while (r < rows.size() && rows[r].grad_evals <= t) {
      cur_f = rows[r].f;
      cur_l0 = rows[r].l0_norm;
      ++r;
    }
    s.ticks.push_back(t);
    s.f.push_back(cur_f);
    s.l0.push_back(cur_l0);
  }
  return s;
}

inline void mean_std(const std::vector<double>& values, double& mean, double& std_dev) {
  mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  std_dev = std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace detail

// Runs every (objective, start seed, algorithm) combination under the shared
// gradient budget. The optimality-gap reference of each objective is the best
// final value any compared run found on it, shifted down by gap_offset, so
// gaps stay positive. Aggregates pool every run of one algorithm on the tick
// grid 0..budget. Results are independent of the worker count.
inline MultistartOutcome multistart_run(std::span<const QuadraticProblem> objectives,
                                        std::span<const std::uint64_t> start_seeds,
                                        std::span<const AlgorithmSpec> algorithms,
                                        long budget_grads, int jobs = 1,
                                        double gap_offset = 1e-5) {
  if (objectives.empty() || start_seeds.empty() || algorithms.empty())
    throw std::invalid_argument("multistart_run: empty campaign");
  if (budget_grads <= 0) throw std::invalid_argument("multistart_run: budget must be positive");
  const int n_obj = static_cast<int>(objectives.size());
  const int n_start = static_cast<int>(start_seeds.size());
  const int n_alg = static_cast<int>(algorithms.size());
  const int n_runs = n_obj * n_start * n_alg;

  struct TaskOut {
    std::vector<TrajectoryRow> rows;
    RunSummary summary;
  };
  std::vector<TaskOut> outs(static_cast<std::size_t>(n_runs));
  parallel_for(n_runs, jobs, [&](int t) {
    const int o = t / (n_start * n_alg);
    const int s = (t / n_alg) % n_start;
    const int a = t % n_alg;
    const QuadraticProblem& problem = objectives[static_cast<std::size_t>(o)];
    const ProductSimplexDomain domain(problem.layout());
    Rng start_rng(derive_seed(start_seeds[static_cast<std::size_t>(s)], "start-point"));
    const BlockVector x0 = domain.sample_uniform(start_rng);
    SolverConfig cfg = algorithms[static_cast<std::size_t>(a)].config;
    cfg.budget_grads = budget_grads;
    cfg.seed = derive_seed(start_seeds[static_cast<std::size_t>(s)], "run-stream",
                           static_cast<std::uint64_t>(o));
    cfg.record_supports = false;
    cfg.record_ssc_trace = false;
    RunResult res = run(problem, x0, cfg);
    TaskOut& out = outs[static_cast<std::size_t>(t)];
    out.summary = {o,
                   s,
                   a,
                   res.final_f,
                   0.0,
                   res.grad_evals,
                   res.iters,
                   res.trajectory.back().l0_norm,
                   res.reason};
    out.rows = std::move(res.trajectory);
  });

  MultistartOutcome outcome;
  outcome.objective_best_f.assign(static_cast<std::size_t>(n_obj),
                                  std::numeric_limits<double>::infinity());
  for (const TaskOut& out : outs) {
    auto& best = outcome.objective_best_f[static_cast<std::size_t>(out.summary.objective_index)];
    if (out.summary.final_f < best) best = out.summary.final_f;
  }
  outcome.objective_gap_ref.resize(static_cast<std::size_t>(n_obj));
  for (int o = 0; o < n_obj; ++o)
    outcome.objective_gap_ref[static_cast<std::size_t>(o)] =
        outcome.objective_best_f[static_cast<std::size_t>(o)] - gap_offset;

  for (int a = 0; a < n_alg; ++a) {
    AggregateTrajectory agg;
    agg.algorithm_id = algorithms[static_cast<std::size_t>(a)].id;
    std::vector<detail::SampledSeries> series;
    std::vector<double> refs;
    for (int t = 0; t < n_runs; ++t) {
      if (t % n_alg != a) continue;
      series.push_back(detail::sample_on_grid(outs[static_cast<std::size_t>(t)].rows,
                                              budget_grads));
      refs.push_back(outcome.objective_gap_ref[static_cast<std::size_t>(
          outs[static_cast<std::size_t>(t)].summary.objective_index)]);
    }
    agg.rows.resize(static_cast<std::size_t>(budget_grads + 1));
    std::vector<double> gaps(series.size()), l0s(series.size());
    for (long tick = 0; tick <= budget_grads; ++tick) {
      for (std::size_t r = 0; r < series.size(); ++r) {
        gaps[r] = series[r].f[static_cast<std::size_t>(tick)] - refs[r];
        l0s[r] = series[r].l0[static_cast<std::size_t>(tick)];
      }
      AggregateRow& row = agg.rows[static_cast<std::size_t>(tick)];
      row.axis_tick = tick;
      detail::mean_std(gaps, row.mean_gap, row.std_gap);
      detail::mean_std(l0s, row.mean_l0, row.std_l0);
    }
    outcome.aggregates.push_back(std::move(agg));
  }

  outcome.runs.reserve(static_cast<std::size_t>(n_runs));
  for (const TaskOut& out : outs) {
    RunSummary s = out.summary;
    s.final_gap =
        s.final_f - outcome.objective_gap_ref[static_cast<std::size_t>(s.objective_index)];
    outcome.runs.push_back(s);
  }
  return outcome;
}

struct MBHCampaignOutcome {
  std::vector<AggregateTrajectory> aggregates;  // axis_tick = basin-hopping round
  std::vector<double> objective_best_f;
  std::vector<double> objective_gap_ref;
};

// Repeats mbh_run per (objective, repetition, algorithm) and aggregates the
// incumbent trajectories per algorithm over the round index. Seeds are
// two-level derived, so adding repetitions or objectives never reshuffles
// existing runs.
inline MBHCampaignOutcome mbh_campaign(std::span<const QuadraticProblem> objectives,
                                       int repetitions,
                                       std::span<const AlgorithmSpec> algorithms,
                                       const MBHConfig& proto, std::uint64_t master_seed,
                                       int jobs = 1, double gap_offset = 1e-1) {
  if (objectives.empty() || repetitions <= 0 || algorithms.empty())
    throw std::invalid_argument("mbh_campaign: empty campaign");
  const int n_obj = static_cast<int>(objectives.size());
  const int n_alg = static_cast<int>(algorithms.size());
  const int n_runs = n_obj * repetitions * n_alg;
  std::vector<MBHResult> results(static_cast<std::size_t>(n_runs));
  parallel_for(n_runs, jobs, [&](int t) {
    const int o = t / (repetitions * n_alg);
    const int r = (t / n_alg) % repetitions;
    const int a = t % n_alg;
    MBHConfig cfg = proto;
    cfg.solver = algorithms[static_cast<std::size_t>(a)].config;
    const std::uint64_t seed_o =
        derive_seed(master_seed, "mbh-objective", static_cast<std::uint64_t>(o));
    cfg.seed = derive_seed(seed_o, "mbh-rep", static_cast<std::uint64_t>(r));
    results[static_cast<std::size_t>(t)] =
        mbh_run(objectives[static_cast<std::size_t>(o)], cfg);
  });

  MBHCampaignOutcome outcome;
  outcome.objective_best_f.assign(static_cast<std::size_t>(n_obj),
                                  std::numeric_limits<double>::infinity());
  for (int t = 0; t < n_runs; ++t) {
    const int o = t / (repetitions * n_alg);
    auto& best = outcome.objective_best_f[static_cast<std::size_t>(o)];
    if (results[static_cast<std::size_t>(t)].best_f < best)
      best = results[static_cast<std::size_t>(t)].best_f;
  }
  outcome.objective_gap_ref.resize(static_cast<std::size_t>(n_obj));
  for (int o = 0; o < n_obj; ++o)
    outcome.objective_gap_ref[static_cast<std::size_t>(o)] =
        outcome.objective_best_f[static_cast<std::size_t>(o)] - gap_offset;

  const int rounds = proto.i_max + 1;
  for (int a = 0; a < n_alg; ++a) {
    AggregateTrajectory agg;
    agg.algorithm_id = algorithms[static_cast<std::size_t>(a)].id;
    agg.rows.resize(static_cast<std::size_t>(rounds));
    std::vector<double> gaps, l0s;
    for (int i = 0; i < rounds; ++i) {
      gaps.clear();
      l0s.clear();
      for (int t = 0; t < n_runs; ++t) {
        if (t % n_alg != a) continue;
        const int o = t / (repetitions * n_alg);
        const MBHResult& res = results[static_cast<std::size_t>(t)];
        gaps.push_back(res.incumbent_f[static_cast<std::size_t>(i)] -
                       outcome.objective_gap_ref[static_cast<std::size_t>(o)]);
        l0s.push_back(res.incumbent_l0[static_cast<std::size_t>(i)]);
      }
      AggregateRow& row = agg.rows[static_cast<std::size_t>(i)];
      row.axis_tick = i;
      detail::mean_std(gaps, row.mean_gap, row.std_gap);
      detail::mean_std(l0s, row.mean_l0, row.std_l0);
    }
    outcome.aggregates.push_back(std::move(agg));
  }
  return outcome;
}

}  // namespace sfw
