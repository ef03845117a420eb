#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "oracles.hpp"
#include "sfw/ssc.hpp"

using namespace sfw;

namespace {

// Independent chain simulator: first-principles direction selection plus
// bisection ball exits. Flags near-ties between beta and alpha_max so the
// battle can skip trials where branch choice is numerically fragile.
struct SimOutcome {
  std::vector<double> y;
  int steps = 0;
  SSCStop stop = SSCStop::IterCap;
  bool fragile = false;
};

SimOutcome simulate_chain(const std::vector<double>& x_bar, const std::vector<double>& g,
                          Method method, double lipschitz, int cap) {
  const std::size_t n = x_bar.size();
  std::vector<double> big_center(n);
  double g2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    big_center[j] = x_bar[j] + g[j] / (2.0 * lipschitz);
    g2 += g[j] * g[j];
  }
  const double big_radius = std::sqrt(g2) / (2.0 * lipschitz);

  SimOutcome out;
  out.y = x_bar;
  for (int it = 0; it < cap; ++it) {
    const int s = oracle::argmax_first(g);
    const std::optional<int> q = oracle::argmin_on_support(g, out.y, 1e-10);
    std::vector<double> d(n, 0.0);
    bool use_toward = method == Method::FW;
    if ((method == Method::AFW || method == Method::FDFW) && q) {
      double toward_slope = g[static_cast<std::size_t>(s)];
      double away_slope = -g[static_cast<std::size_t>(*q)];
      for (std::size_t j = 0; j < n; ++j) {
        toward_slope -= g[j] * out.y[j];
        away_slope += g[j] * out.y[j];
      }
      use_toward = toward_slope >= away_slope;
    }
    if (method == Method::PFW) {
      if (!q || s == *q) {
        out.stop = SSCStop::ZeroDirection;
        return out;
      }
      d[static_cast<std::size_t>(s)] = 1.0;
      d[static_cast<std::size_t>(*q)] -= 1.0;
    } else if (use_toward) {
      for (std::size_t j = 0; j < n; ++j) d[j] = -out.y[j];
      d[static_cast<std::size_t>(s)] += 1.0;
    } else {
      d = out.y;
      d[static_cast<std::size_t>(*q)] -= 1.0;
    }
    double norm2 = 0.0, slope = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      norm2 += d[j] * d[j];
      slope += g[j] * d[j];
    }
    const double norm = std::sqrt(norm2);
    if (norm <= 1e-12) {
      out.stop = SSCStop::ZeroDirection;
      return out;
    }
    double alpha_max;
    if (method == Method::PFW) {
      alpha_max = out.y[static_cast<std::size_t>(*q)];
    } else if (use_toward) {
      alpha_max = 1.0;
    } else {
      alpha_max = oracle::max_step_bisect(out.y, d);
    }
    std::vector<double> d_unit(n);
    for (std::size_t j = 0; j < n; ++j) d_unit[j] = d[j] / norm;
    const double exit_big = oracle::ball_exit_bisect(out.y, big_center, big_radius, d_unit);
    const double small_radius = slope / norm / lipschitz;
    const double exit_small = oracle::ball_exit_bisect(out.y, x_bar, small_radius, d_unit);
    const double beta = std::min(exit_big, exit_small) / norm;
    if (std::fabs(beta - alpha_max) <= 1e-7 * std::max(1.0, alpha_max)) out.fragile = true;
    const bool clipped = beta <= alpha_max;
    const double alpha = clipped ? beta : alpha_max;
    for (std::size_t j = 0; j < n; ++j) out.y[j] += alpha * d[j];
    double sum = 0.0;
    for (double& v : out.y) {
      if (v < 0.0 && v > -1e-9) v = 0.0;
      sum += v;
    }
    if (sum > 0.0 && sum != 1.0)
      for (double& v : out.y) v /= sum;
    ++out.steps;
    if (clipped) {
      out.stop = SSCStop::BetaStep;
      return out;
    }
  }
  out.stop = SSCStop::IterCap;
  return out;
}

std::vector<double> random_point(int n, Rng& rng, bool vertexish) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  if (vertexish) {
    x[static_cast<std::size_t>(rng.uniform_int(n))] = 1.0;
    return x;
  }
  sample_uniform_block(x, rng);
  if (n > 2 && rng.uniform() < 0.5) {
    x[static_cast<std::size_t>(rng.uniform_int(n))] = 0.0;
    double sum = 0.0;
    for (double v : x) sum += v;
    for (double& v : x) v /= sum;
  }
  return x;
}

}  // namespace

TEST_CASE("trust region geometry follows the anchor data", "[ssc]") {
  const std::vector<double> x = {0.2, 0.5, 0.3};
  const std::vector<double> g = {1.0, 3.0, 2.0};
  const TrustRegion tr = make_trust_region(x, g, 2.0);
  CHECK(tr.big_center == std::vector<double>{0.45, 1.25, 0.8});
  CHECK(tr.big_radius == Catch::Approx(std::sqrt(14.0) / 4.0));
  CHECK_THROWS_AS(make_trust_region(x, g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_trust_region(x, g, -1.0), std::invalid_argument);
}

TEST_CASE("ball exit matches bisection", "[ssc]") {
  Rng rng(51);
  for (int trial = 0; trial < 4000; ++trial) {
    const int n = 1 + rng.uniform_int(6);
    std::vector<double> y(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n)),
        u(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      y[static_cast<std::size_t>(j)] = rng.uniform() * 2.0 - 1.0;
      c[static_cast<std::size_t>(j)] = rng.uniform() * 2.0 - 1.0;
    }
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      u[static_cast<std::size_t>(j)] = rng.gaussian();
      norm2 += u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
    }
    if (norm2 <= 0.0) continue;
    for (double& v : u) v /= std::sqrt(norm2);
    const double r = rng.uniform() * 2.0;
    const double got = ball_exit_step(y, c, r, u);
    const double want = oracle::ball_exit_bisect(y, c, r, u);
    REQUIRE(got == Catch::Approx(want).margin(1e-9));
  }
}

TEST_CASE("first stepsize of a chain is slope over L norm squared", "[ssc]") {
  Rng rng(52);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    const std::vector<double> x = random_point(n, rng, false);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (double& e : g) e = rng.uniform() * 4.0 - 2.0;
    const double lipschitz = 0.5 + rng.uniform() * 5.0;
    const TrustRegion tr = make_trust_region(x, g, lipschitz);
    const Direction dir = afw_direction(x, g);
    if (dir.kind == DirectionKind::Zero || dir.slope <= 1e-12) continue;
    const double beta0 = auxiliary_stepsize(tr, x, dir);
    REQUIRE(beta0 ==
            Catch::Approx(dir.slope / (lipschitz * dir.norm * dir.norm)).margin(1e-10));
  }
}

TEST_CASE("two-step chain fixture is reproduced exactly", "[ssc]") {
  const std::vector<double> x = {0.2, 0.5, 0.3};
  const std::vector<double> g = {1.0, 3.0, 2.0};
  const double lipschitz = 2.0;
  const SSCResult res = ssc_run(x, g, Method::AFW, lipschitz, {.iter_cap = 0,
                                                               .record_iterates = true});

  REQUIRE(res.trace.steps.size() == 2);
  CHECK(res.trace.stop == SSCStop::BetaStep);

  // Step 1: away direction (-0.8, 0.5, 0.3), maximal step 0.25.
  const SSCStepRow& s1 = res.trace.steps[0];
  CHECK(s1.kind == DirectionKind::Away);
  CHECK(s1.alpha_max == Catch::Approx(0.25));
  CHECK(s1.alpha == Catch::Approx(0.25));
  CHECK(s1.beta == Catch::Approx(1.3 / (2.0 * 0.98)).margin(1e-12));
  REQUIRE(res.trace.iterates.size() == 3);
  CHECK(res.trace.iterates[1][0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(res.trace.iterates[1][1] == Catch::Approx(0.625));
  CHECK(res.trace.iterates[1][2] == Catch::Approx(0.375));

  // Step 2: away direction (0, 0.625, -0.625); the refreshed small ball binds
  // with arc sqrt(0.065) - 0.05/sqrt(2), the frozen-model ball would allow
  // 0.2/sqrt(2) + sqrt(0.12125).
  const double arc_small = std::sqrt(0.065) - 0.05 / std::sqrt(2.0);
  const double arc_big = 0.2 / std::sqrt(2.0) + std::sqrt(0.12125);
  REQUIRE(arc_small < arc_big);
  const double norm2step = 0.625 * std::sqrt(2.0);
  const double beta1 = arc_small / norm2step;
  const SSCStepRow& s2 = res.trace.steps[1];
  CHECK(s2.kind == DirectionKind::Away);
  CHECK(s2.alpha_max == Catch::Approx(0.6).margin(1e-12));
  CHECK(s2.unit_slope == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
  CHECK(s2.beta == Catch::Approx(beta1).margin(1e-12));
  CHECK(s2.alpha == Catch::Approx(beta1).margin(1e-12));

  CHECK(res.endpoint[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(res.endpoint[1] == Catch::Approx(0.625 + beta1 * 0.625).margin(1e-12));
  CHECK(res.endpoint[2] == Catch::Approx(0.375 - beta1 * 0.625).margin(1e-12));

  // The endpoint certificate holds with room to spare.
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double dy = res.endpoint[j] - x[j];
    lhs += dy * dy;
    rhs += g[j] * dy;
  }
  CHECK(lipschitz * lhs <= rhs + 1e-12);
}

TEST_CASE("chains stop on zero directions and iteration caps", "[ssc]") {
  const std::vector<double> vertex = {1.0, 0.0};
  const std::vector<double> flat = {3.0, 3.0};
  const SSCResult zero = ssc_run(vertex, flat, Method::AFW, 1.0);
  CHECK(zero.trace.stop == SSCStop::ZeroDirection);
  CHECK(zero.trace.steps.empty());
  CHECK(zero.endpoint == vertex);

  const std::vector<double> x = {0.2, 0.5, 0.3};
  const std::vector<double> g = {1.0, 3.0, 2.0};
  const SSCResult capped = ssc_run(x, g, Method::AFW, 2.0, {.iter_cap = 1});
  CHECK(capped.trace.stop == SSCStop::IterCap);
  CHECK(capped.trace.steps.size() == 1);
  CHECK(capped.endpoint[1] == Catch::Approx(0.625));
}

TEST_CASE("chains agree with an independent simulator", "[ssc]") {
  Rng rng(53);
  int compared = 0, skipped = 0;
  const Method methods[] = {Method::FW, Method::AFW, Method::PFW, Method::FDFW};
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + rng.uniform_int(5);
    const std::vector<double> x = random_point(n, rng, rng.uniform() < 0.15);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (double& e : g) e = rng.uniform() * 4.0 - 2.0;
    const double lipschitz = 0.3 + rng.uniform() * 8.0;
    const Method method = methods[trial % 4];
    const int cap = 10 * n;

    const SimOutcome sim = simulate_chain(x, g, method, lipschitz, cap);
    if (sim.fragile) {
      ++skipped;
      continue;
    }
    const SSCResult res = ssc_run(x, g, method, lipschitz, {.iter_cap = cap});
    ++compared;
    REQUIRE(res.trace.stop == sim.stop);
    REQUIRE(static_cast<int>(res.trace.steps.size()) == sim.steps);
    for (std::size_t j = 0; j < x.size(); ++j)
      REQUIRE(res.endpoint[j] == Catch::Approx(sim.y[j]).margin(1e-9));
  }
  INFO("compared " << compared << ", skipped " << skipped);
  CHECK(compared > 1500);
}
