#pragma once

// First-order feasible directions on a single simplex block. All selectors
// take g as the steepest-ascent vector (the negative gradient when descending)
// and pick directions maximizing <g, d>.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfw/domain.hpp"

namespace sfw {

enum class DirectionKind { Zero, Toward, Away, Pairwise, InFace };

enum class Method { FW, AFW, PFW, FDFW };

inline std::string to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::Zero: return "zero";
    case DirectionKind::Toward: return "toward";
    case DirectionKind::Away: return "away";
    case DirectionKind::Pairwise: return "pairwise";
    case DirectionKind::InFace: return "inface";
  }
  return "?";
}

inline std::string to_string(Method m) {
  switch (m) {
    case Method::FW: return "fw";
    case Method::AFW: return "afw";
    case Method::PFW: return "pfw";
    case Method::FDFW: return "fdfw";
  }
  return "?";
}

struct Direction {
  DirectionKind kind = DirectionKind::Zero;
  std::vector<double> d;
  double alpha_max = 0.0;  // maximal feasible step, may be +inf before capping
  double slope = 0.0;      // <g, d>
  double norm = 0.0;       // ||d||_2

  double unit_slope() const { return norm > 0.0 ? slope / norm : 0.0; }
};

namespace detail {

inline Direction zero_direction(std::size_t n) {
  Direction dir;
  dir.d.assign(n, 0.0);
  return dir;
}

}  // namespace detail

// d = e_s - x with s the ascent vertex of g. alpha_max is exactly 1: every
// support coordinate other than s shrinks at rate equal to its own value.
inline Direction fw_direction(std::span<const double> x, std::span<const double> g) {
  if (x.size() != g.size()) throw std::invalid_argument("fw_direction: length mismatch");
  const int s = lmo_block(g);
  Direction dir;
  dir.d.assign(x.begin(), x.end());
  double nrm2 = 0.0;
  for (std::size_t j = 0; j < dir.d.size(); ++j) {
    dir.d[j] = (static_cast<int>(j) == s ? 1.0 : 0.0) - dir.d[j];
    nrm2 += dir.d[j] * dir.d[j];
  }
  dir.norm = std::sqrt(nrm2);
  if (dir.norm <= kZeroDirTol) return detail::zero_direction(x.size());
  dir.kind = DirectionKind::Toward;
  dir.slope = dot(g, std::span<const double>(dir.d));
  dir.alpha_max = 1.0;
  return dir;
}

// d = x - e_q with q the worst support vertex. alpha_max = x_q / (1 - x_q):
// the step at which x_q reaches zero.
inline Direction away_direction(std::span<const double> x, std::span<const double> g) {
  if (x.size() != g.size()) throw std::invalid_argument("away_direction: length mismatch");
  const int q = away_vertex_block(x, g);
  Direction dir;
  dir.d.assign(x.begin(), x.end());
  dir.d[static_cast<std::size_t>(q)] -= 1.0;
  double nrm2 = 0.0;
  for (double v : dir.d) nrm2 += v * v;
  dir.norm = std::sqrt(nrm2);
  if (dir.norm <= kZeroDirTol) return detail::zero_direction(x.size());
  dir.kind = DirectionKind::Away;
  dir.slope = dot(g, std::span<const double>(dir.d));
  const double xq = x[static_cast<std::size_t>(q)];
  dir.alpha_max = xq < 1.0 ? xq / (1.0 - xq) : std::numeric_limits<double>::infinity();
  return dir;
}

// d = e_s - e_q: moves mass from the worst support vertex straight to the
// ascent vertex. alpha_max = x_q.
inline Direction pairwise_direction(std::span<const double> x, std::span<const double> g) {
  if (x.size() != g.size()) throw std::invalid_argument("pairwise_direction: length mismatch");
  const int s = lmo_block(g);
  const int q = away_vertex_block(x, g);
  if (s == q) return detail::zero_direction(x.size());
  Direction dir;
  dir.kind = DirectionKind::Pairwise;
  dir.d.assign(x.size(), 0.0);
  dir.d[static_cast<std::size_t>(s)] = 1.0;
  dir.d[static_cast<std::size_t>(q)] = -1.0;
  dir.norm = std::sqrt(2.0);
  dir.slope = g[static_cast<std::size_t>(s)] - g[static_cast<std::size_t>(q)];
  dir.alpha_max = x[static_cast<std::size_t>(q)];
  return dir;
}

// Steeper of the toward and away candidates; slope ties resolve toward.
inline Direction afw_direction(std::span<const double> x, std::span<const double> g) {
  Direction fw = fw_direction(x, g);
  Direction aw = away_direction(x, g);
  if (aw.kind == DirectionKind::Zero) return fw;
  if (fw.kind == DirectionKind::Zero) return aw;
  return fw.slope >= aw.slope ? fw : aw;
}

// In-face variant: the candidate pointing away from the worst vertex of the
// minimal face containing x. On a simplex that face is the convex hull of the
// support vertices, so the in-face candidate coincides with the away
// direction; only the reported kind differs.
inline Direction fdfw_direction(std::span<const double> x, std::span<const double> g) {
  Direction fw = fw_direction(x, g);
  Direction in_face = away_direction(x, g);
  if (in_face.kind == DirectionKind::Away) in_face.kind = DirectionKind::InFace;
  if (in_face.kind == DirectionKind::Zero) return fw;
  if (fw.kind == DirectionKind::Zero) return in_face;
  return fw.slope >= in_face.slope ? fw : in_face;
}

inline Direction select_direction(Method method, std::span<const double> x,
                                  std::span<const double> g) {
  switch (method) {
    case Method::FW: return fw_direction(x, g);
    case Method::AFW: return afw_direction(x, g);
    case Method::PFW: return pairwise_direction(x, g);
    case Method::FDFW: return fdfw_direction(x, g);
  }
  throw std::invalid_argument("select_direction: unknown method");
}

// max_j g_j - <g, x>: the block's stationarity gap; zero exactly when x is a
// maximizer of <g, .> on the block.
inline double block_fw_gap(std::span<const double> x, std::span<const double> g) {
  if (x.size() != g.size()) throw std::invalid_argument("block_fw_gap: length mismatch");
  const int s = lmo_block(g);
  return g[static_cast<std::size_t>(s)] - dot(g, x);
}

}  // namespace sfw
