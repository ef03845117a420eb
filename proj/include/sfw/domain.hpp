#pragma once

// Geometry of the product of standard simplices. Per-block operations work on
// raw spans; ProductSimplexDomain lifts them to BlockVector.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfw/block_vector.hpp"
#include "sfw/rng.hpp"

namespace sfw {

// Simplex membership slack: coordinates may dip below zero and block sums may
// drift from one by at most this much.
inline constexpr double kFeasTol = 1e-9;
// A coordinate counts as support only strictly above this threshold.
inline constexpr double kSupportTol = 1e-10;
// Directions with Euclidean norm at or below this are treated as null.
inline constexpr double kZeroDirTol = 1e-12;

// Vertex maximizing <g, e_j>; ties resolve to the lowest index.
inline int lmo_block(std::span<const double> g) {
  if (g.empty()) throw std::invalid_argument("lmo_block: empty block");
  int best = 0;
  for (int j = 1; j < static_cast<int>(g.size()); ++j)
    if (g[static_cast<std::size_t>(j)] > g[static_cast<std::size_t>(best)]) best = j;
  return best;
}

// Support vertex minimizing <g, e_j>; ties resolve to the lowest index.
inline int away_vertex_block(std::span<const double> x, std::span<const double> g) {
  if (x.size() != g.size()) throw std::invalid_argument("away_vertex_block: length mismatch");
  int best = -1;
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    if (x[static_cast<std::size_t>(j)] <= kSupportTol) continue;
    if (best < 0 || g[static_cast<std::size_t>(j)] < g[static_cast<std::size_t>(best)]) best = j;
  }
  if (best < 0) throw std::invalid_argument("away_vertex_block: point has empty support");
  return best;
}

// Largest alpha with x + alpha*d still in the simplex. Requires d to lie in
// the affine hull (sum zero within kFeasTol); +inf when no coordinate shrinks.
// Coordinates already negative (within the slack) are treated as zero.
inline double max_feasible_step_block(std::span<const double> x, std::span<const double> d) {
  if (x.size() != d.size())
    throw std::invalid_argument("max_feasible_step_block: length mismatch");
  double sum = 0.0;
  for (double v : d) sum += v;
  if (std::abs(sum) > kFeasTol)
    throw std::invalid_argument("max_feasible_step_block: direction leaves the affine hull");
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (d[j] < 0.0) {
      const double xj = x[j] > 0.0 ? x[j] : 0.0;
      const double r = xj / (-d[j]);
      if (r < alpha) alpha = r;
    }
  }
  return alpha;
}

// Euclidean projection of g onto {d : sum(d) = 0, d_j >= 0 for j outside
// supp(x)}. Finite active-set loop: shift by the mean over the free set, clamp
// newly negative constrained coordinates, repeat. Each pass removes at least
// one coordinate, so it ends within n passes.
inline std::vector<double> project_tangent_cone_block(std::span<const double> x,
                                                      std::span<const double> g) {
  if (x.size() != g.size())
    throw std::invalid_argument("project_tangent_cone_block: length mismatch");
  const int n = static_cast<int>(g.size());
  std::vector<char> constrained(static_cast<std::size_t>(n));
  std::vector<char> clamped(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j)
    constrained[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] <= kSupportTol;
  for (int pass = 0; pass <= n; ++pass) {
    double sum = 0.0;
    int free_count = 0;
    for (int j = 0; j < n; ++j)
      if (!clamped[static_cast<std::size_t>(j)]) {
        sum += g[static_cast<std::size_t>(j)];
        ++free_count;
      }
    if (free_count == 0) break;  // only possible for infeasible x with empty support
    const double theta = sum / free_count;
    bool changed = false;
    for (int j = 0; j < n; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (!clamped[sj] && constrained[sj] && g[sj] - theta < 0.0) {
        clamped[sj] = 1;
        changed = true;
      }
    }
    if (!changed) {
      std::vector<double> d(static_cast<std::size_t>(n), 0.0);
      for (int j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (!clamped[sj]) d[sj] = g[sj] - theta;
      }
      return d;
    }
  }
  return std::vector<double>(static_cast<std::size_t>(n), 0.0);
}

// Flat Dirichlet draw: normalized independent standard exponentials.
inline void sample_uniform_block(std::span<double> out, Rng& rng) {
  if (out.empty()) throw std::invalid_argument("sample_uniform_block: empty block");
  if (out.size() == 1) {
    out[0] = 1.0;
    return;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = -std::log(rng.uniform_pos());
    sum += out[j];
  }
  if (sum <= 0.0) {
    const double u = 1.0 / static_cast<double>(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = u;
    return;
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] /= sum;
}

// Repairs round-off after a step: zeroes coordinates in (-kFeasTol, 0) and
// renormalizes the block sum, so maximal steps land exactly on faces.
inline void clamp_block(std::span<double> x) {
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 && x[j] > -kFeasTol) x[j] = 0.0;
    sum += x[j];
  }
  if (sum > 0.0 && sum != 1.0) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] /= sum;
  }
}

inline bool is_feasible_block(std::span<const double> x, double tol = kFeasTol) {
  double sum = 0.0;
  for (double v : x) {
    if (v < -tol) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline int support_size_block(std::span<const double> x) {
  int c = 0;
  for (double v : x)
    if (v > kSupportTol) ++c;
  return c;
}

// Per-block sets of strictly positive coordinates, stored as one flat bitset.
class SupportSet {
 public:
  SupportSet() = default;

  SupportSet(LayoutPtr layout, const BlockVector& x) : layout_(std::move(layout)) {
    if (!same_layout(layout_, x.layout()))
      throw std::invalid_argument("SupportSet: layout mismatch");
    bits_.resize(x.data().size());
    for (std::size_t j = 0; j < bits_.size(); ++j) bits_[j] = x.data()[j] > kSupportTol;
  }

  const std::vector<bool>& bits() const { return bits_; }
  bool contains(int flat_index) const { return bits_[static_cast<std::size_t>(flat_index)]; }

  int count() const {
    int c = 0;
    for (bool b : bits_)
      if (b) ++c;
    return c;
  }

  int count_block(int i) const {
    const int off = layout_->offset(i);
    int c = 0;
    for (int j = 0; j < layout_->size(i); ++j)
      if (bits_[static_cast<std::size_t>(off + j)]) ++c;
    return c;
  }

  // Local indices of the support of block i.
  std::vector<int> block_indices(int i) const {
    const int off = layout_->offset(i);
    std::vector<int> idx;
    for (int j = 0; j < layout_->size(i); ++j)
      if (bits_[static_cast<std::size_t>(off + j)]) idx.push_back(j);
    return idx;
  }

  friend bool operator==(const SupportSet& a, const SupportSet& b) {
    return a.bits_ == b.bits_;
  }

 private:
  LayoutPtr layout_;
  std::vector<bool> bits_;
};

class ProductSimplexDomain {
 public:
  explicit ProductSimplexDomain(LayoutPtr layout) : layout_(std::move(layout)) {
    if (!layout_) throw std::invalid_argument("ProductSimplexDomain: null layout");
  }

  const LayoutPtr& layout() const { return layout_; }

  bool contains(const BlockVector& x, double tol = kFeasTol) const {
    if (!same_layout(layout_, x.layout())) return false;
    for (int i = 0; i < layout_->num_blocks(); ++i)
      if (!is_feasible_block(x.block(i), tol)) return false;
    return true;
  }

  void clamp(BlockVector& x) const {
    for (int i = 0; i < layout_->num_blocks(); ++i) clamp_block(x.block(i));
  }

  BlockVector sample_uniform(Rng& rng) const {
    BlockVector x(layout_);
    for (int i = 0; i < layout_->num_blocks(); ++i) sample_uniform_block(x.block(i), rng);
    return x;
  }

  SupportSet support(const BlockVector& x) const { return SupportSet(layout_, x); }

  // Number of strictly positive coordinates across all blocks.
  int l0_norm(const BlockVector& x) const {
    int c = 0;
    for (int i = 0; i < layout_->num_blocks(); ++i) c += support_size_block(x.block(i));
    return c;
  }

 private:
  LayoutPtr layout_;
};

}  // namespace sfw
