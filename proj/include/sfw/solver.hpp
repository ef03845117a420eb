#pragma once

// Outer loop: per-iteration block selection, one chain (or one plain short
// step) per selected block against the gradient frozen at the iteration
// start, then commit. Gradient work is charged per selected-or-scored block:
// parallel and greedy selection cost m evaluations per iteration, random
// selection costs one.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sfw/domain.hpp"
#include "sfw/quadratic.hpp"
#include "sfw/ssc.hpp"

namespace sfw {

enum class Strategy { Parallel, Greedy, Random };

enum class StopReason { Stationary, Budget, MaxIters };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Parallel: return "parallel";
    case Strategy::Greedy: return "greedy";
    case Strategy::Random: return "random";
  }
  return "?";
}

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Stationary: return "stationary";
    case StopReason::Budget: return "budget";
    case StopReason::MaxIters: return "max-iters";
  }
  return "?";
}

struct SolverConfig {
  Strategy strategy = Strategy::Parallel;
  Method method = Method::AFW;
  bool use_ssc = true;  // off: one feasibility-capped short step per selected block
  double tol = 1e-6;    // stationarity threshold on the largest block gap
  long max_iters = 1000000;
  long budget_grads = std::numeric_limits<long>::max() / 4;
  std::uint64_t seed = 0;   // drives random block selection only
  int ssc_cap_factor = 10;  // chain iteration cap = factor * block size
  bool check_decrease = false;  // verify the decrease contract at every chain iterate
  bool record_supports = true;
  bool record_ssc_trace = false;
};

struct TrajectoryRow {
  long k = 0;
  long grad_evals = 0;
  long block_updates = 0;
  double f = 0.0;
  double max_gap = 0.0;
  int l0_norm = 0;
  double elapsed_ms = 0.0;
};

struct ChainTraceRow {
  long k = 0;
  int block = 0;
  int j = 0;
  DirectionKind kind = DirectionKind::Zero;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_max = 0.0;
  double unit_slope = 0.0;
};

struct RunResult {
  std::vector<TrajectoryRow> trajectory;
  BlockVector final_x;
  double final_f = 0.0;
  StopReason reason = StopReason::MaxIters;
  long iters = 0;
  long grad_evals = 0;
  long block_updates = 0;
  long ssc_invocations = 0;
  long iter_cap_hits = 0;
  std::vector<SupportSet> supports;      // one snapshot per trajectory row
  std::vector<ChainTraceRow> ssc_trace;  // filled when record_ssc_trace is set
};

struct SolverState {
  BlockVector x;
  double f = 0.0;
  long k = 0;
  long grad_evals = 0;
  long block_updates = 0;
  long ssc_invocations = 0;
  long iter_cap_hits = 0;
};

struct Selection {
  std::vector<int> blocks;  // ascending
  // For greedy selection: the already-computed endpoint of the winning block,
  // so the winner's chain is not recomputed.
  std::vector<std::vector<double>> cached_endpoints;
};

// candidate(i) must return the would-be new content of block i. Parallel
// selection returns every block, random selection draws one index uniformly,
// greedy selection scores candidate(i) for every block by <g_i, y_i - x_i>
// and keeps the argmax (ties to the lowest index).
template <typename CandidateFn>
Selection select_blocks(Strategy strategy, const BlockVector& x, const BlockVector& ascent,
                        Rng& rng, CandidateFn&& candidate) {
  const int m = x.num_blocks();
  Selection sel;
  switch (strategy) {
    case Strategy::Parallel: {
      sel.blocks.resize(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) sel.blocks[static_cast<std::size_t>(i)] = i;
      return sel;
    }
    case Strategy::Random: {
      sel.blocks.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m))));
      return sel;
    }
    case Strategy::Greedy: {
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      std::vector<double> best_endpoint;
      for (int i = 0; i < m; ++i) {
        std::vector<double> y = candidate(i);
        const auto xi = x.block(i);
        const auto gi = ascent.block(i);
        double score = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) score += gi[j] * (y[j] - xi[j]);
        if (score > best_score) {
          best_score = score;
          best = i;
          best_endpoint = std::move(y);
        }
      }
      sel.blocks.push_back(best);
      sel.cached_endpoints.push_back(std::move(best_endpoint));
      return sel;
    }
  }
  throw std::invalid_argument("select_blocks: unknown strategy");
}

namespace detail {

// Verifies f(y) <= f(x) - (L/2) * ||y - x||^2 + 1e-9 for a candidate that
// replaces one block of x.
inline void check_decrease_contract(const QuadraticProblem& problem, const BlockVector& x,
                                    double fx, int block, std::span<const double> y) {
  BlockVector cand = x;
  auto cb = cand.block(block);
  double dist2 = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double d = y[j] - cb[j];
    dist2 += d * d;
    cb[j] = y[j];
  }
  const double fy = problem.eval_f(cand);
  const double bound = fx - 0.5 * problem.lipschitz() * dist2;
  if (fy > bound + 1e-9)
    throw std::runtime_error("solver: chain iterate violated the decrease contract by " +
                             fmt_g17(fy - bound));
}

// One block candidate from the frozen ascent vector. With chains disabled this
// is a single step along the configured direction, capped at the feasibility
// boundary and at slope / (L * ||d||^2).
inline std::vector<double> block_candidate(const QuadraticProblem& problem,
                                           const BlockVector& x, double fx,
                                           const BlockVector& ascent, int i,
                                           const SolverConfig& cfg, SolverState& state,
                                           std::vector<ChainTraceRow>* trace_rows) {
  const auto xi = x.block(i);
  const auto gi = ascent.block(i);
  const double lipschitz = problem.lipschitz();
  if (cfg.use_ssc) {
    SSCOptions opt;
    opt.iter_cap = cfg.ssc_cap_factor * static_cast<int>(xi.size());
    opt.record_iterates = cfg.check_decrease;
    SSCResult res = ssc_run(xi, gi, cfg.method, lipschitz, opt);
    ++state.ssc_invocations;
    if (res.trace.stop == SSCStop::IterCap) ++state.iter_cap_hits;
    if (trace_rows) {
      for (std::size_t j = 0; j < res.trace.steps.size(); ++j) {
        const SSCStepRow& s = res.trace.steps[j];
        trace_rows->push_back({state.k, i, static_cast<int>(j), s.kind, s.alpha, s.beta,
                               s.alpha_max, s.unit_slope});
      }
    }
    if (cfg.check_decrease) {
      for (const auto& y : res.trace.iterates)
        check_decrease_contract(problem, x, fx, i, y);
    }
    return std::move(res.endpoint);
  }
  std::vector<double> y(xi.begin(), xi.end());
  const Direction dir = select_direction(cfg.method, y, gi);
  if (dir.kind == DirectionKind::Zero) return y;
  const double short_step = dir.slope / (lipschitz * dir.norm * dir.norm);
  const double gamma = short_step < dir.alpha_max ? short_step : dir.alpha_max;
  if (gamma <= 0.0) return y;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += gamma * dir.d[j];
  clamp_block(y);
  if (trace_rows)
    trace_rows->push_back({state.k, i, 0, dir.kind, gamma, short_step, dir.alpha_max,
                           dir.unit_slope()});
  if (cfg.check_decrease) check_decrease_contract(problem, x, fx, i, y);
  return y;
}

inline double max_block_gap(const BlockVector& x, const BlockVector& ascent) {
  double max_gap = 0.0;
  for (int i = 0; i < x.num_blocks(); ++i) {
    const double gap = block_fw_gap(x.block(i), ascent.block(i));
    if (gap > max_gap) max_gap = gap;
  }
  return max_gap;
}

inline BlockVector eval_ascent(const QuadraticProblem& problem, const BlockVector& x) {
  BlockVector ascent = problem.eval_grad(x);
  for (double& g : ascent.data()) {
    if (!std::isfinite(g)) throw std::runtime_error("solver: non-finite gradient entry");
    g = -g;
  }
  return ascent;
}

// Selection, block advances, commit, counters, and the descent/feasibility
// contract checks. The ascent vector must belong to state.x.
inline std::vector<int> advance_blocks(const QuadraticProblem& problem, SolverState& state,
                                       const BlockVector& ascent, const SolverConfig& cfg,
                                       Rng& rng, std::vector<ChainTraceRow>* trace_rows) {
  const double fx = state.f;
  Selection sel = select_blocks(cfg.strategy, state.x, ascent, rng, [&](int i) {
    return block_candidate(problem, state.x, fx, ascent, i, cfg, state, trace_rows);
  });
  for (std::size_t s = 0; s < sel.blocks.size(); ++s) {
    const int i = sel.blocks[s];
    std::vector<double> y =
        s < sel.cached_endpoints.size()
            ? std::move(sel.cached_endpoints[s])
            : block_candidate(problem, state.x, fx, ascent, i, cfg, state, trace_rows);
    auto xb = state.x.block(i);
    bool changed = false;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (xb[j] != y[j]) {
        xb[j] = y[j];
        changed = true;
      }
    }
    if (changed) ++state.block_updates;
  }
  state.grad_evals += cfg.strategy == Strategy::Random ? 1 : state.x.num_blocks();
  const double f_new = problem.eval_f(state.x);
  if (!std::isfinite(f_new)) throw std::runtime_error("solver: non-finite objective value");
  if (f_new > state.f + 1e-10)
    throw std::runtime_error("solver: objective increased by " + fmt_g17(f_new - state.f));
  if (!ProductSimplexDomain(state.x.layout()).contains(state.x))
    throw std::runtime_error("solver: iterate left the feasible set");
  state.f = f_new;
  ++state.k;
  return std::move(sel.blocks);
}

}  // namespace detail

struct OuterStepInfo {
  double max_gap = 0.0;
  bool stationary = false;
  std::vector<int> selected;
};

// One outer iteration: evaluate the gradient at state.x, stop if the largest
// block gap is within tolerance, otherwise advance the selected blocks.
// Unselected blocks are copied bit for bit.
inline OuterStepInfo outer_step(const QuadraticProblem& problem, SolverState& state,
                                const SolverConfig& cfg, Rng& rng,
                                std::vector<ChainTraceRow>* trace_rows = nullptr) {
  const BlockVector ascent = detail::eval_ascent(problem, state.x);
  OuterStepInfo info;
  info.max_gap = detail::max_block_gap(state.x, ascent);
  if (info.max_gap <= cfg.tol) {
    info.stationary = true;
    return info;
  }
  info.selected = detail::advance_blocks(problem, state, ascent, cfg, rng, trace_rows);
  return info;
}

inline RunResult run(const QuadraticProblem& problem, const BlockVector& x0,
                     const SolverConfig& cfg) {
  if (!same_layout(x0.layout(), problem.layout()))
    throw std::invalid_argument("run: start point layout mismatch");
  ProductSimplexDomain dom(problem.layout());
  if (!dom.contains(x0)) throw std::invalid_argument("run: start point is infeasible");
  const long step_cost = cfg.strategy == Strategy::Random ? 1 : problem.layout()->num_blocks();

  SolverState state;
  state.x = x0;
  state.f = problem.eval_f(x0);
  Rng rng(derive_seed(cfg.seed, "block-select"));

  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&t0]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  std::vector<ChainTraceRow>* trace = cfg.record_ssc_trace ? &res.ssc_trace : nullptr;

  for (;;) {
    const BlockVector ascent = detail::eval_ascent(problem, state.x);
    const double max_gap = detail::max_block_gap(state.x, ascent);
    res.trajectory.push_back({state.k, state.grad_evals, state.block_updates, state.f,
                              max_gap, dom.l0_norm(state.x), elapsed_ms()});
    if (cfg.record_supports) res.supports.push_back(dom.support(state.x));
    if (max_gap <= cfg.tol) {
      res.reason = StopReason::Stationary;
      break;
    }
    if (state.k >= cfg.max_iters) {
      res.reason = StopReason::MaxIters;
      break;
    }
    if (state.grad_evals + step_cost > cfg.budget_grads) {
      res.reason = StopReason::Budget;
      break;
    }
    detail::advance_blocks(problem, state, ascent, cfg, rng, trace);
  }
  res.final_x = std::move(state.x);
  res.final_f = state.f;
  res.iters = state.k;
  res.grad_evals = state.grad_evals;
  res.block_updates = state.block_updates;
  res.ssc_invocations = state.ssc_invocations;
  res.iter_cap_hits = state.iter_cap_hits;
  return res;
}

// Trajectory CSV: one row per outer iteration plus the terminal point. The
// timing column is zeroed unless include_timing is set, keeping default
// output byte-for-byte reproducible.
inline void write_trajectory_csv(std::ostream& out, const std::string& run_id,
                                 const RunResult& res, bool include_timing = false) {
  out << "run_id,k,grad_evals,block_updates,f,max_gap,l0_norm,elapsed_ms\n";
  for (const TrajectoryRow& r : res.trajectory) {
    out << run_id << ',' << r.k << ',' << r.grad_evals << ',' << r.block_updates << ','
        << fmt_g17(r.f) << ',' << fmt_g17(r.max_gap) << ',' << r.l0_norm << ','
        << fmt_g17(include_timing ? r.elapsed_ms : 0.0) << '\n';
  }
}

inline void write_chain_trace_csv(std::ostream& out, const std::string& run_id,
                                  const RunResult& res) {
  out << "run_id,k,block,j,kind,alpha,beta,alpha_max,unit_slope\n";
  for (const ChainTraceRow& r : res.ssc_trace) {
    out << run_id << ',' << r.k << ',' << r.block << ',' << r.j << ',' << to_string(r.kind)
        << ',' << fmt_g17(r.alpha) << ',' << fmt_g17(r.beta) << ',' << fmt_g17(r.alpha_max)
        << ',' << fmt_g17(r.unit_slope) << '\n';
  }
}

}  // namespace sfw
