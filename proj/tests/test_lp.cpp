#include <doctest.h>

#include <cmath>

#include "lp.hpp"
#include "measures.hpp"
#include "oracles.hpp"

using namespace calib;

TEST_CASE("smooth_ce_scalar closed-form examples") {
  SmoothCeSolution one = smooth_ce_scalar({0.5}, {0.5});
  CHECK(one.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(one.phi[0] == doctest::Approx(1.0).epsilon(1e-9));

  SmoothCeSolution box = smooth_ce_scalar({0.0, 1.0}, {1.0, -1.0});
  CHECK(box.value == doctest::Approx(1.0).epsilon(1e-12));

  SmoothCeSolution lip = smooth_ce_scalar({0.3, 0.4}, {0.5, -0.5});
  CHECK(lip.value == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(lip.phi[0] - lip.phi[1] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("smooth_ce_scalar optimizer is feasible and attains the value") {
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<double> t(n), c(n);
    for (int i = 0; i < n; ++i) {
      t[i] = uniform01(rng);
      c[i] = 2.0 * uniform01(rng) - 1.0;
    }
    SmoothCeSolution sol = smooth_ce_scalar(t, c);
    CHECK(sol.value >= -1e-12);
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(sol.phi[i]) <= 1.0 + 1e-9);
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(sol.phi[i] - sol.phi[j]) <=
              std::abs(t[i] - t[j]) + 1e-9);
      obj += c[i] * sol.phi[i];
    }
    CHECK(obj == doctest::Approx(sol.value).epsilon(1e-9));
  }
}

TEST_CASE("smooth_ce_scalar matches the value-grid brute force") {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<double> t(n), c(n);
    double cabs = 0.0;
    for (int i = 0; i < n; ++i) {
      t[i] = uniform01(rng);
      c[i] = (2.0 * uniform01(rng) - 1.0) / n;
      cabs += std::abs(c[i]);
    }
    const double lp = smooth_ce_scalar(t, c).value;
    const double dp = oracle::smooth_ce_grid_dp(t, c);
    CHECK(std::abs(lp - dp) <= 2e-3);
  }
}

TEST_CASE("metric LP agrees with the dense simplex oracle") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int k = 2 + static_cast<int>(rng() % 2);
    std::vector<SimplexVec> pts;
    for (int i = 0; i < n; ++i) pts.push_back(oracle::random_simplex(k, rng));
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist[i][j] = l1_dist(pts[i], pts[j]);
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = (2.0 * uniform01(rng) - 1.0) / n;

    const double flow = lipschitz_lp_metric(dist, c).value;
    const double simplex = oracle::lipschitz_lp_simplex(dist, c);
    CHECK(flow == doctest::Approx(simplex).epsilon(1e-8));
  }
}

TEST_CASE("metric LP handles duplicate points (zero distances)") {
  std::vector<std::vector<double>> dist{{0.0, 0.0}, {0.0, 0.0}};
  LipschitzLpResult r = lipschitz_lp_metric(dist, {0.5, -0.5});
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("small dense simplex solves a textbook LP") {
  // max 3x + 2y st x + y <= 4, x + 3y <= 6, x,y >= 0 -> 12 at (4, 0).
  std::vector<double> x;
  const double opt = small_lp_maximize({{1, 1}, {1, 3}}, {4, 6}, {3, 2}, x);
  CHECK(opt == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(x[0] == doctest::Approx(4.0).epsilon(1e-9));

  // Infeasible: x <= -1, x >= 0.
  const double inf = small_lp_maximize({{1.0}}, {-1.0}, {1.0}, x);
  CHECK(std::isinf(inf));
  CHECK(inf < 0);

  // Unbounded: max x with no constraints binding.
  const double unb = small_lp_maximize({{-1.0}}, {0.0}, {1.0}, x);
  CHECK(std::isinf(unb));
  CHECK(unb > 0);
}
