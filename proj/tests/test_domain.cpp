#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "sfw/domain.hpp"

using namespace sfw;

namespace {

std::vector<double> random_simplex_point(int n, Rng& rng, int zeros) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  sample_uniform_block(x, rng);
  for (int z = 0; z < zeros && n > 1; ++z) {
    const int j = rng.uniform_int(n);
    x[static_cast<std::size_t>(j)] = 0.0;
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum <= 0.0) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    x[0] = 1.0;
    return x;
  }
  for (double& v : x) v /= sum;
  return x;
}

}  // namespace

TEST_CASE("lmo picks the largest entry, lowest index on ties", "[domain]") {
  const std::vector<double> g = {1.0, 3.0, 2.0};
  CHECK(lmo_block(g) == 1);
  const std::vector<double> tie = {2.0, 5.0, 5.0, 1.0};
  CHECK(lmo_block(tie) == 1);
  CHECK_THROWS_AS(lmo_block(std::vector<double>{}), std::invalid_argument);

  Rng rng(31);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + rng.uniform_int(8);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& e : v) e = std::floor(rng.uniform() * 5.0);
    REQUIRE(lmo_block(v) == oracle::argmax_first(v));
  }
}

TEST_CASE("away vertex is the worst supported coordinate", "[domain]") {
  const std::vector<double> x = {0.0, 0.5, 0.5};
  const std::vector<double> g = {-9.0, 4.0, 4.0};
  CHECK(away_vertex_block(x, g) == 1);

  const std::vector<double> zero(3, 0.0);
  CHECK_THROWS_AS(away_vertex_block(zero, g), std::invalid_argument);

  Rng rng(32);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + rng.uniform_int(8);
    const std::vector<double> p = random_simplex_point(n, rng, rng.uniform_int(n));
    std::vector<double> grad(static_cast<std::size_t>(n));
    for (double& e : grad) e = std::floor(rng.uniform() * 5.0);
    const auto expect = oracle::argmin_on_support(grad, p, kSupportTol);
    REQUIRE(expect.has_value());
    REQUIRE(away_vertex_block(p, grad) == *expect);
  }
}

TEST_CASE("max feasible step matches bisection", "[domain]") {
  const std::vector<double> x = {0.2, 0.5, 0.3};
  const std::vector<double> d = {1.0, -0.6, -0.4};
  // coordinate 2 hits zero first: 0.3 / 0.4 < 0.5 / 0.6
  CHECK(max_feasible_step_block(x, d) == Catch::Approx(0.75));

  const std::vector<double> bad = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(max_feasible_step_block(x, bad), std::invalid_argument);

  const std::vector<double> nowhere = {0.0, 0.0, 0.0};
  CHECK(std::isinf(max_feasible_step_block(x, nowhere)));

  Rng rng(33);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + rng.uniform_int(6);
    const std::vector<double> p = random_simplex_point(n, rng, rng.uniform_int(2));
    std::vector<double> dir(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < dir.size(); ++j) {
      dir[j] = rng.uniform() * 2.0 - 1.0;
      sum += dir[j];
    }
    dir.back() = -sum;
    const double got = max_feasible_step_block(p, dir);
    const double want = oracle::max_step_bisect(p, dir);
    if (std::isinf(want)) {
      REQUIRE(std::isinf(got));
    } else {
      REQUIRE(got == Catch::Approx(want).margin(1e-9));
    }
  }
}

TEST_CASE("tangent cone projection matches face enumeration", "[domain]") {
  const std::vector<double> xi = {0.2, 0.5, 0.3};
  const std::vector<double> gi = {1.0, 3.0, 2.0};
  const std::vector<double> pi = project_tangent_cone_block(xi, gi);
  REQUIRE(pi.size() == 3);
  CHECK(pi[0] == Catch::Approx(-1.0));
  CHECK(pi[1] == Catch::Approx(1.0));
  CHECK(pi[2] == Catch::Approx(0.0).margin(1e-15));

  const std::vector<double> xv = {1.0, 0.0};
  const std::vector<double> gv = {1.0, 0.0};
  const std::vector<double> pv = project_tangent_cone_block(xv, gv);
  CHECK(pv[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(pv[1] == Catch::Approx(0.0).margin(1e-15));

  Rng rng(34);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + rng.uniform_int(6);
    const std::vector<double> p = random_simplex_point(n, rng, rng.uniform_int(n));
    std::vector<double> grad(static_cast<std::size_t>(n));
    for (double& e : grad) e = rng.uniform() * 4.0 - 2.0;
    const std::vector<double> got = project_tangent_cone_block(p, grad);
    const std::vector<double> want = oracle::project_tangent_enumerate(grad, p, kSupportTol);
    REQUIRE(want.size() == got.size());
    for (std::size_t j = 0; j < got.size(); ++j)
      REQUIRE(got[j] == Catch::Approx(want[j]).margin(1e-9));
  }
}

TEST_CASE("uniform simplex sampling is feasible and symmetric", "[domain]") {
  Rng rng(35);
  std::vector<double> one(1);
  sample_uniform_block(one, rng);
  CHECK(one[0] == 1.0);

  const int n = 4;
  const int draws = 20000;
  std::vector<double> mean(n, 0.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < draws; ++i) {
    sample_uniform_block(x, rng);
    REQUIRE(is_feasible_block(x));
    for (int j = 0; j < n; ++j) mean[static_cast<std::size_t>(j)] += x[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < n; ++j)
    CHECK(mean[static_cast<std::size_t>(j)] / draws == Catch::Approx(0.25).margin(0.01));

  // For a 2-simplex the first coordinate is uniform on [0, 1].
  Rng rng2(36);
  std::vector<double> pair(2);
  int below = 0;
  for (int i = 0; i < 20000; ++i) {
    sample_uniform_block(pair, rng2);
    if (pair[0] < 0.5) ++below;
  }
  CHECK(below / 20000.0 == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("clamp removes only rounding-level negatives", "[domain]") {
  std::vector<double> x = {-5e-10, 0.5, 0.5};
  clamp_block(x);
  CHECK(x[0] == 0.0);
  double sum = 0.0;
  for (double v : x) sum += v;
  CHECK(sum == Catch::Approx(1.0).margin(1e-15));
  CHECK(is_feasible_block(x));

  std::vector<double> bad = {-1e-3, 0.5, 0.5 + 1e-3};
  clamp_block(bad);
  CHECK(bad[0] == -1e-3);
  CHECK_FALSE(is_feasible_block(bad));
}

TEST_CASE("feasibility and support respect their tolerances", "[domain]") {
  CHECK(is_feasible_block(std::vector<double>{0.5, 0.5}));
  CHECK(is_feasible_block(std::vector<double>{0.5 + 4e-10, 0.5}));
  CHECK_FALSE(is_feasible_block(std::vector<double>{0.5 + 1e-8, 0.5}));
  CHECK_FALSE(is_feasible_block(std::vector<double>{-1e-8, 0.5, 0.5}));

  CHECK(support_size_block(std::vector<double>{1.0, 0.0, 5e-11}) == 1);
  CHECK(support_size_block(std::vector<double>{0.5, 0.5, 2e-10}) == 3);
}

TEST_CASE("support sets track per-block patterns", "[domain]") {
  const LayoutPtr layout = BlockLayout::make({2, 3});
  BlockVector x(layout);
  x.data() = {1.0, 0.0, 0.0, 0.25, 0.75};
  const SupportSet s(layout, x);
  CHECK(s.count() == 3);
  CHECK(s.count_block(0) == 1);
  CHECK(s.count_block(1) == 2);
  CHECK(s.contains(0));
  CHECK_FALSE(s.contains(1));
  CHECK(s.block_indices(1) == std::vector<int>{1, 2});

  BlockVector y = x;
  const SupportSet t(layout, y);
  CHECK(s == t);
  y.data()[1] = 0.3;
  y.data()[0] = 0.7;
  CHECK_FALSE(s == SupportSet(layout, y));
}

TEST_CASE("product domain combines per-block operations", "[domain]") {
  const LayoutPtr layout = BlockLayout::make({2, 3});
  const ProductSimplexDomain dom(layout);
  BlockVector x(layout);
  x.data() = {0.5, 0.5, 0.2, 0.3, 0.5};
  CHECK(dom.contains(x));
  CHECK(dom.l0_norm(x) == 5);
  x.data()[0] = 0.6;
  CHECK_FALSE(dom.contains(x));

  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const BlockVector s = dom.sample_uniform(rng);
    REQUIRE(dom.contains(s));
  }

  BlockVector near(layout);
  near.data() = {-5e-10, 1.0 + 5e-10, 0.2, 0.3, 0.5};
  dom.clamp(near);
  CHECK(dom.contains(near));
  CHECK(near.data()[0] == 0.0);
}
