#pragma once

// Post-run analysis: simplex multipliers, strict complementarity, support
// identification, and empirical linear-rate fits.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfw/block_vector.hpp"
#include "sfw/domain.hpp"

namespace sfw {

using MultiplierVector = BlockVector;

// Per-block multipliers lambda_i = grad_i - <grad_i, x_i> * ones. For a
// feasible x, <lambda_i, x_i> = 0 identically, and at a stationary point the
// off-support entries are the constraint multipliers.
inline MultiplierVector multipliers(const BlockVector& x, const BlockVector& grad) {
  if (!same_layout(x.layout(), grad.layout()))
    throw std::invalid_argument("multipliers: layout mismatch");
  MultiplierVector lambda(x.layout());
  for (int i = 0; i < x.num_blocks(); ++i) {
    const auto xb = x.block(i);
    const auto gb = grad.block(i);
    const double c = dot(gb, xb);
    auto lb = lambda.block(i);
    for (std::size_t j = 0; j < lb.size(); ++j) lb[j] = gb[j] - c;
  }
  return lambda;
}

// Block i is strictly complementary when every off-support multiplier entry
// exceeds tol. Blocks with full support hold vacuously.
inline std::vector<bool> strict_complementarity(const BlockVector& x,
                                                const BlockVector& grad,
                                                double tol = 1e-6) {
  const MultiplierVector lambda = multipliers(x, grad);
  std::vector<bool> flags(static_cast<std::size_t>(x.num_blocks()), true);
  for (int i = 0; i < x.num_blocks(); ++i) {
    const auto xb = x.block(i);
    const auto lb = lambda.block(i);
    for (std::size_t j = 0; j < xb.size(); ++j) {
      if (xb[j] <= kSupportTol && lb[j] <= tol) {
        flags[static_cast<std::size_t>(i)] = false;
        break;
      }
    }
  }
  return flags;
}

// Smallest k such that every snapshot from k on equals the final one, or
// nullopt when the last two snapshots still differ (the support has not
// settled). A single snapshot counts as settled at 0.
inline std::optional<std::size_t> identification_iteration(
    std::span<const SupportSet> snapshots) {
  if (snapshots.empty())
    throw std::invalid_argument("identification_iteration: no snapshots");
  const std::size_t last = snapshots.size() - 1;
  if (snapshots.size() >= 2 && !(snapshots[last - 1] == snapshots[last]))
    return std::nullopt;
  std::size_t k = last;
  while (k > 0 && snapshots[k - 1] == snapshots[last]) --k;
  return k;
}

struct RateFit {
  double q_hat = 1.0;      // exp(slope of log gap vs iteration)
  double r_squared = 0.0;  // goodness of the log-linear fit
  int points = 0;          // window size used
  double window_min_gap = 0.0;
};

// Least-squares slope of log(gap_k) vs k over the window
// gap in [1e-12, gaps[0]/10], skipping the pre-asymptotic first decade and
// the floating-point floor. When the sequence never leaves its first decade
// the fit falls back to every point above the floor. Returns nullopt when
// fewer than two usable points remain.
inline std::optional<RateFit> rate_fit(std::span<const double> gaps) {
  if (gaps.empty()) throw std::invalid_argument("rate_fit: empty gap sequence");
  for (double g : gaps)
    if (!(g > 0.0)) throw std::invalid_argument("rate_fit: gaps must be positive");
  constexpr double kFloor = 1e-12;
  const double head = gaps[0] / 10.0;
  std::vector<std::size_t> window;
  for (std::size_t k = 0; k < gaps.size(); ++k)
    if (gaps[k] >= kFloor && gaps[k] <= head) window.push_back(k);
  if (window.size() < 2) {
    window.clear();
    for (std::size_t k = 0; k < gaps.size(); ++k)
      if (gaps[k] >= kFloor) window.push_back(k);
  }
  if (window.size() < 2) return std::nullopt;
  double mean_k = 0.0, mean_y = 0.0;
  for (std::size_t k : window) {
    mean_k += static_cast<double>(k);
    mean_y += std::log(gaps[k]);
  }
  mean_k /= static_cast<double>(window.size());
  mean_y /= static_cast<double>(window.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k : window) {
    const double dk = static_cast<double>(k) - mean_k;
    const double dy = std::log(gaps[k]) - mean_y;
    sxx += dk * dk;
    sxy += dk * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.q_hat = std::exp(slope);
  fit.points = static_cast<int>(window.size());
  double min_gap = gaps[window.front()];
  for (std::size_t k : window)
    if (gaps[k] < min_gap) min_gap = gaps[k];
  fit.window_min_gap = min_gap;
  if (syy <= 1e-30) {
    fit.r_squared = 1.0;  // flat sequence fitted exactly by a flat line
  } else {
    const double ss_res = syy - slope * sxy;
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace sfw
