#pragma once

// Chained short steps against a frozen linear model. A chain starts at the
// anchor x_bar with ascent vector g and Lipschitz constant L, and keeps
// stepping while each step is maximal feasible; it stops as soon as a step is
// clipped by the trust region, the direction vanishes, or the iteration cap
// trips. The trust region is the intersection of
//   B(x_bar + g/(2L), ||g||/(2L))   (never outrun the frozen model)
//   B(x_bar, <g, d_hat>/L)          (refreshed per step from the unit slope)
// and every endpoint y satisfies L*||y - x_bar||^2 <= <g, y - x_bar>.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfw/directions.hpp"
#include "sfw/domain.hpp"

namespace sfw {

struct TrustRegion {
  std::vector<double> anchor;      // chain start x_bar
  std::vector<double> g;           // frozen ascent vector
  double lipschitz = 0.0;          // L
  std::vector<double> big_center;  // x_bar + g/(2L)
  double big_radius = 0.0;         // ||g||/(2L)
};

inline TrustRegion make_trust_region(std::span<const double> x_bar,
                                     std::span<const double> g, double lipschitz) {
  if (x_bar.size() != g.size())
    throw std::invalid_argument("make_trust_region: length mismatch");
  if (!(lipschitz > 0.0))
    throw std::invalid_argument("make_trust_region: Lipschitz constant must be positive");
  TrustRegion tr;
  tr.anchor.assign(x_bar.begin(), x_bar.end());
  tr.g.assign(g.begin(), g.end());
  tr.lipschitz = lipschitz;
  tr.big_center.resize(x_bar.size());
  double g2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    tr.big_center[j] = x_bar[j] + g[j] / (2.0 * lipschitz);
    g2 += g[j] * g[j];
  }
  tr.big_radius = std::sqrt(g2) / (2.0 * lipschitz);
  return tr;
}

// Largest t >= 0 with ||y + t*d_unit - center|| <= radius. Returns 0 when y
// is outside the ball by more than kFeasTol or the ray misses it entirely.
inline double ball_exit_step(std::span<const double> y, std::span<const double> center,
                             double radius, std::span<const double> d_unit) {
  if (y.size() != center.size() || y.size() != d_unit.size())
    throw std::invalid_argument("ball_exit_step: length mismatch");
  if (radius < 0.0) return 0.0;
  double b = 0.0, ww = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double w = y[j] - center[j];
    b += w * d_unit[j];
    ww += w * w;
  }
  if (std::sqrt(ww) > radius + kFeasTol) return 0.0;
  const double disc = b * b + radius * radius - ww;
  if (disc < 0.0) return 0.0;
  const double t = -b + std::sqrt(disc);
  return t > 0.0 ? t : 0.0;
}

// Trust-region stepsize for the unnormalized direction dir.d at the current
// chain point y: the tighter of the two ball exits, rescaled from arc length
// to multiples of dir.d.
inline double auxiliary_stepsize(const TrustRegion& tr, std::span<const double> y,
                                 const Direction& dir) {
  if (dir.norm <= kZeroDirTol) return 0.0;
  std::vector<double> d_unit(dir.d.size());
  for (std::size_t j = 0; j < dir.d.size(); ++j) d_unit[j] = dir.d[j] / dir.norm;
  const std::span<const double> du(d_unit);
  const double exit_big = ball_exit_step(y, tr.big_center, tr.big_radius, du);
  const double small_radius = dir.unit_slope() / tr.lipschitz;
  const double exit_small = ball_exit_step(y, tr.anchor, small_radius, du);
  const double arc = exit_big < exit_small ? exit_big : exit_small;
  return arc / dir.norm;
}

enum class SSCStop { ZeroDirection, BetaStep, IterCap };

struct SSCStepRow {
  DirectionKind kind = DirectionKind::Zero;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_max = 0.0;
  double unit_slope = 0.0;
};

struct SSCTrace {
  SSCStop stop = SSCStop::ZeroDirection;
  std::vector<SSCStepRow> steps;
  // y_0 .. y_T, present only when recording was requested.
  std::vector<std::vector<double>> iterates;
};

struct SSCResult {
  std::vector<double> endpoint;
  SSCTrace trace;
};

struct SSCOptions {
  int iter_cap = 0;  // 0 selects 10 * block size
  bool record_iterates = false;
};

namespace detail {

inline void check_endpoint_in_big_ball(const TrustRegion& tr, std::span<const double> y) {
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double dy = y[j] - tr.anchor[j];
    lhs += dy * dy;
    rhs += tr.g[j] * dy;
  }
  if (tr.lipschitz * lhs > rhs + kFeasTol)
    throw std::runtime_error("ssc_run: endpoint escaped the trust region");
}

}  // namespace detail

inline SSCResult ssc_run(std::span<const double> x_bar, std::span<const double> g,
                         Method method, double lipschitz, const SSCOptions& opt = {}) {
  const TrustRegion tr = make_trust_region(x_bar, g, lipschitz);
  SSCResult res;
  res.endpoint.assign(x_bar.begin(), x_bar.end());
  if (opt.record_iterates) res.trace.iterates.push_back(res.endpoint);
  const int cap = opt.iter_cap > 0 ? opt.iter_cap : 10 * static_cast<int>(x_bar.size());
  for (int j = 0; j < cap; ++j) {
    const Direction dir = select_direction(method, res.endpoint, g);
    if (dir.kind == DirectionKind::Zero) {
      res.trace.stop = SSCStop::ZeroDirection;
      detail::check_endpoint_in_big_ball(tr, res.endpoint);
      return res;
    }
    const double beta = auxiliary_stepsize(tr, res.endpoint, dir);
    const bool clipped = beta <= dir.alpha_max;
    const double alpha = clipped ? beta : dir.alpha_max;
    for (std::size_t k = 0; k < res.endpoint.size(); ++k)
      res.endpoint[k] += alpha * dir.d[k];
    clamp_block(res.endpoint);
    res.trace.steps.push_back({dir.kind, alpha, beta, dir.alpha_max, dir.unit_slope()});
    if (opt.record_iterates) res.trace.iterates.push_back(res.endpoint);
    if (clipped) {
      res.trace.stop = SSCStop::BetaStep;
      detail::check_endpoint_in_big_ball(tr, res.endpoint);
      return res;
    }
  }
  res.trace.stop = SSCStop::IterCap;
  detail::check_endpoint_in_big_ball(tr, res.endpoint);
  return res;
}

}  // namespace sfw
