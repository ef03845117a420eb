#pragma once

// Quadratic objectives f(x) = x^T Q x over a product of simplices, the
// coupled random test-problem generator, and the instance file format.
//
// Generated instances couple m independent clique-finding subproblems:
//   Q = blockdiag(-(1/m) * (A_i + 0.5*I)) + epsilon * G
// with A_i the adjacency matrix of an Erdos-Renyi graph G(l, p), G an i.i.d.
// standard Gaussian n x n matrix, and epsilon = 1/(2 m^2) by default. The
// edge probability p is calibrated so that the expected number of cliques of
// size s = round(0.4 l) equals one: C(l, s) * p^(s(s-1)/2) = 1.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sfw/block_vector.hpp"
#include "sfw/io.hpp"
#include "sfw/rng.hpp"

namespace sfw {

// Smallest admissible curvature bound; used when the matrix is numerically zero.
inline constexpr double kMinLipschitz = 1e-8;

struct InstanceMeta {
  int l = 0;  // block size
  int m = 0;  // number of blocks
  std::uint64_t seed = 0;
  double epsilon = 0.0;       // coupling strength
  double alpha = 0.5;         // diagonal shift of each block
  double clique_p = std::numeric_limits<double>::quiet_NaN();
  double block_weight = 0.0;  // 1/m
};

// Edge probability making the expected count of size-s cliques equal one,
// s = nearest integer to 0.4*l. Requires s >= 2, i.e. l >= 4.
inline double clique_density_p(int l) {
  const int s = static_cast<int>(std::floor(0.4 * l + 0.5));
  if (s < 2)
    throw std::invalid_argument(
        "clique_density_p: clique size s = round(0.4*l) = " + std::to_string(s) +
        " violates s < 2 bound; need l >= 4");
  const double log_binom =
      std::lgamma(l + 1.0) - std::lgamma(s + 1.0) - std::lgamma(l - s + 1.0);
  const double p = std::exp(-2.0 * log_binom / (static_cast<double>(s) * (s - 1)));
  return p < 1.0 ? p : 1.0;
}

// 1.01 times a power-iteration estimate of ||2*S||_2 for symmetric S.
// Runs at most 200 iterations, stopping on 1e-10 relative stagnation of the
// norm estimate; the start vector is drawn from a fixed internal stream.
inline double lipschitz_estimate(const std::vector<double>& sym, int n) {
  if (n <= 0 || static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != sym.size())
    throw std::invalid_argument("lipschitz_estimate: bad matrix size");
  Rng rng(fnv1a64("lipschitz-start"));
  std::vector<double> v(static_cast<std::size_t>(n));
  double vn = 0.0;
  for (auto& e : v) {
    e = rng.gaussian();
    vn += e * e;
  }
  vn = std::sqrt(vn);
  if (vn == 0.0) return kMinLipschitz;
  for (auto& e : v) e /= vn;
  std::vector<double> w(static_cast<std::size_t>(n));
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    double wn = 0.0;
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      const double* row = sym.data() + static_cast<std::size_t>(r) * n;
      for (int c = 0; c < n; ++c) acc += row[c] * v[static_cast<std::size_t>(c)];
      acc *= 2.0;
      w[static_cast<std::size_t>(r)] = acc;
      wn += acc * acc;
    }
    wn = std::sqrt(wn);
    if (wn == 0.0) {
      sigma = 0.0;
      break;
    }
    const double prev = sigma;
    sigma = wn;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[j] / wn;
    if (it > 0 && std::abs(sigma - prev) <= 1e-10 * sigma) break;
  }
  const double estimate = 1.01 * sigma;
  return estimate > kMinLipschitz ? estimate : kMinLipschitz;
}

class QuadraticProblem {
 public:
  QuadraticProblem(LayoutPtr layout, std::vector<double> q, InstanceMeta meta = {})
      : layout_(std::move(layout)), q_(std::move(q)), meta_(meta) {
    if (!layout_) throw std::invalid_argument("QuadraticProblem: null layout");
    n_ = layout_->total();
    if (q_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
      throw std::invalid_argument("QuadraticProblem: matrix size does not match layout");
    sym_.resize(q_.size());
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c)
        sym_[idx(r, c)] = 0.5 * (q_[idx(r, c)] + q_[idx(c, r)]);
    lipschitz_ = lipschitz_estimate(sym_, n_);
  }

  const LayoutPtr& layout() const { return layout_; }
  int dim() const { return n_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<double>& q_sym() const { return sym_; }
  const InstanceMeta& meta() const { return meta_; }
  double lipschitz() const { return lipschitz_; }

  // f(x) = x^T Q x, evaluated through the symmetric part.
  double eval_f(const BlockVector& x) const {
    check(x);
    const auto& d = x.data();
    double f = 0.0;
    for (int r = 0; r < n_; ++r) {
      double acc = 0.0;
      const double* row = sym_.data() + static_cast<std::size_t>(r) * n_;
      for (int c = 0; c < n_; ++c) acc += row[c] * d[static_cast<std::size_t>(c)];
      f += d[static_cast<std::size_t>(r)] * acc;
    }
    return f;
  }

  // grad f(x) = 2 * sym(Q) * x.
  void eval_grad(const BlockVector& x, BlockVector& out) const {
    check(x);
    if (!same_layout(out.layout(), layout_)) out = BlockVector(layout_);
    const auto& d = x.data();
    auto& g = out.data();
    for (int r = 0; r < n_; ++r) {
      double acc = 0.0;
      const double* row = sym_.data() + static_cast<std::size_t>(r) * n_;
      for (int c = 0; c < n_; ++c) acc += row[c] * d[static_cast<std::size_t>(c)];
      g[static_cast<std::size_t>(r)] = 2.0 * acc;
    }
  }

  BlockVector eval_grad(const BlockVector& x) const {
    BlockVector g(layout_);
    eval_grad(x, g);
    return g;
  }

 private:
  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(c);
  }
  void check(const BlockVector& x) const {
    if (!same_layout(x.layout(), layout_))
      throw std::invalid_argument("QuadraticProblem: point layout mismatch");
  }

  LayoutPtr layout_;
  std::vector<double> q_;
  std::vector<double> sym_;
  InstanceMeta meta_;
  int n_ = 0;
  double lipschitz_ = 0.0;
};

// Draw order (fixed; changing it would change every generated instance):
// first the m adjacency upper triangles in row-major pair order, one uniform
// per pair, then, when epsilon is nonzero, the n^2 Gaussian entries of the
// coupling matrix in row-major order.
inline QuadraticProblem gen_multistqp(int l, int m, std::uint64_t seed,
                                      std::optional<double> epsilon_override = {}) {
  if (m < 1) throw std::invalid_argument("gen_multistqp: m must be positive");
  const double p = clique_density_p(l);  // throws for l < 4
  const double epsilon =
      epsilon_override ? *epsilon_override : 1.0 / (2.0 * static_cast<double>(m) * m);
  if (epsilon < 0.0) throw std::invalid_argument("gen_multistqp: epsilon must be >= 0");
  const int n = l * m;
  const double weight = 1.0 / static_cast<double>(m);
  Rng rng(derive_seed(seed, "multistqp"));
  std::vector<double> q(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  const auto at = [&](int r, int c) -> double& {
    return q[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)];
  };
  for (int i = 0; i < m; ++i) {
    const int off = i * l;
    for (int a = 0; a < l; ++a) {
      at(off + a, off + a) = -weight * 0.5;
      for (int b = a + 1; b < l; ++b) {
        if (rng.uniform() < p) {
          at(off + a, off + b) = -weight;
          at(off + b, off + a) = -weight;
        }
      }
    }
  }
  if (epsilon != 0.0) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) at(r, c) += epsilon * rng.gaussian();
  }
  InstanceMeta meta;
  meta.l = l;
  meta.m = m;
  meta.seed = seed;
  meta.epsilon = epsilon;
  meta.alpha = 0.5;
  meta.clique_p = p;
  meta.block_weight = weight;
  return QuadraticProblem(BlockLayout::uniform(l, m), std::move(q), meta);
}

// Instance file:
//   line 1: "MSTQP 1"
//   line 2: l m seed epsilon alpha
//   then n = l*m rows of n entries, %.17g, space-separated.
inline void save_instance(const std::string& path, const QuadraticProblem& problem) {
  const InstanceMeta& meta = problem.meta();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << "MSTQP 1\n";
  out << meta.l << " " << meta.m << " " << meta.seed << " " << fmt_g17(meta.epsilon)
      << " " << fmt_g17(meta.alpha) << "\n";
  const int n = problem.dim();
  const auto& q = problem.q();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c) out << ' ';
      out << fmt_g17(q[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

inline QuadraticProblem load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  const auto fail = [&path](int line, const std::string& what) -> std::runtime_error {
    return std::runtime_error("load_instance: " + path + " line " + std::to_string(line) +
                              ": " + what);
  };
  std::string line;
  if (!std::getline(in, line) || line != "MSTQP 1") throw fail(1, "expected header 'MSTQP 1'");
  if (!std::getline(in, line)) throw fail(2, "missing metadata line");
  InstanceMeta meta;
  {
    std::istringstream ss(line);
    if (!(ss >> meta.l >> meta.m >> meta.seed >> meta.epsilon >> meta.alpha))
      throw fail(2, "expected 'l m seed epsilon alpha'");
    std::string extra;
    if (ss >> extra) throw fail(2, "trailing tokens after metadata");
  }
  if (meta.l < 1 || meta.m < 1) throw fail(2, "l and m must be positive");
  const int n = meta.l * meta.m;
  std::vector<double> q;
  q.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    if (!std::getline(in, line))
      throw fail(3 + r, "expected " + std::to_string(n) + " matrix rows, file ended");
    std::istringstream ss(line);
    for (int c = 0; c < n; ++c) {
      double v;
      if (!(ss >> v))
        throw fail(3 + r, "expected " + std::to_string(n) + " values, got " +
                              std::to_string(c));
      q.push_back(v);
    }
    std::string extra;
    if (ss >> extra) throw fail(3 + r, "trailing tokens after " + std::to_string(n) + " values");
  }
  meta.block_weight = 1.0 / static_cast<double>(meta.m);
  const int s = static_cast<int>(std::floor(0.4 * meta.l + 0.5));
  meta.clique_p = s >= 2 ? clique_density_p(meta.l) : std::numeric_limits<double>::quiet_NaN();
  return QuadraticProblem(BlockLayout::uniform(meta.l, meta.m), std::move(q), meta);
}

}  // namespace sfw
