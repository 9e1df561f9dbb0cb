// Test-only oracles, independent of the library's solver paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "lp.hpp"
#include "simplex.hpp"

namespace oracle {

// Discretized brute force for max sum c_i phi_i over 1-Lipschitz
// phi:[0,1]->[-1,1]: dynamic program over sorted positions with phi values
// on a uniform grid of step `step` (Lipschitz windows rounded outward).
inline double smooth_ce_grid_dp(std::vector<double> t, std::vector<double> c,
                                double step = 1e-3) {
  // Merge duplicate positions; equal t forces equal phi.
  std::map<double, double> merged;
  for (size_t i = 0; i < t.size(); ++i) merged[t[i]] += c[i];
  std::vector<double> tt, cc;
  for (auto& [pos, coef] : merged) {
    tt.push_back(pos);
    cc.push_back(coef);
  }
  const int n = static_cast<int>(tt.size());
  if (n == 0) return 0.0;
  const int levels = static_cast<int>(std::lround(2.0 / step)) + 1;
  auto value = [&](int g) { return -1.0 + g * step; };

  std::vector<double> best(levels);
  for (int g = 0; g < levels; ++g) best[g] = cc[0] * value(g);
  for (int i = 1; i < n; ++i) {
    const double dt = tt[i] - tt[i - 1];
    // Outward Lipschitz rounding: one extra grid step keeps every continuous
    // optimum representable; the slack is covered by the 2e-3 tolerance.
    const int window = static_cast<int>(std::floor(dt / step + 1e-9)) + 1;
    // Sliding-window max over the previous layer.
    std::vector<double> prev_max(levels);
    std::vector<int> dq(levels);
    int head = 0, tail = 0;
    for (int g = 0; g < levels; ++g) {
      const int lo = std::max(0, g - window);
      while (head < tail && dq[head] < lo) ++head;
      while (head < tail && best[dq[tail - 1]] <= best[g]) --tail;
      dq[tail++] = g;
      prev_max[g] = best[dq[head]];
    }
    // prev_max[g] currently covers [g-window, g]; fold in the upper side by
    // scanning backwards.
    std::vector<double> upper(levels);
    head = tail = 0;
    for (int g = levels - 1; g >= 0; --g) {
      const int hi = std::min(levels - 1, g + window);
      while (head < tail && dq[head] > hi) ++head;
      while (head < tail && best[dq[tail - 1]] <= best[g]) --tail;
      dq[tail++] = g;
      upper[g] = best[dq[head]];
    }
    std::vector<double> next(levels);
    for (int g = 0; g < levels; ++g)
      next[g] = std::max(prev_max[g], upper[g]) + cc[i] * value(g);
    best = std::move(next);
  }
  return *std::max_element(best.begin(), best.end());
}

// Primal LP oracle for the box-constrained Lipschitz maximization over an
// arbitrary distance matrix, shifted to x = h + 1 >= 0 for the tableau
// simplex. Independent of the min-cost-flow route.
inline double lipschitz_lp_simplex(const std::vector<std::vector<double>>& dist,
                                   const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(n, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      A.push_back(std::move(row));
      b.push_back(dist[i][j]);
    }
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    A.push_back(std::move(row));
    b.push_back(2.0);
  }
  std::vector<double> x;
  double shift = 0.0;
  for (double ci : c) shift += ci;
  const double opt = calib::small_lp_maximize(A, b, c, x);
  return opt - shift;
}

// Min eigenvalue of a small symmetric matrix by cyclic Jacobi sweeps.
inline double min_eigenvalue(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double sign = theta >= 0 ? 1.0 : -1.0;
        const double tt =
            sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(tt * tt + 1.0);
        const double sn = tt * cs;
        for (int i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = cs * aip - sn * aiq;
          a[i][q] = sn * aip + cs * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = cs * api - sn * aqi;
          a[q][i] = sn * api + cs * aqi;
        }
      }
  }
  double mn = a[0][0];
  for (int i = 1; i < n; ++i) mn = std::min(mn, a[i][i]);
  return mn;
}

// Monomial coefficients of the Chebyshev polynomial T_n via the recurrence.
inline std::vector<double> chebyshev_T(int n) {
  std::vector<double> prev{1.0}, cur{0.0, 1.0};
  if (n == 0) return prev;
  for (int m = 2; m <= n; ++m) {
    std::vector<double> next(m + 1, 0.0);
    for (size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
    for (size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// l2 norm of the explicit feature expansion of v -> p(a.v): coefficient
// eta_i * prod_j a_{t_j} on each tuple t, enumerated directly.
inline double feature_expansion_norm(const std::vector<double>& eta,
                                     const std::vector<double>& a) {
  const int k = static_cast<int>(a.size());
  double sum = eta.empty() ? 0.0 : eta[0] * eta[0];
  std::vector<double> block{1.0};
  for (size_t deg = 1; deg < eta.size(); ++deg) {
    std::vector<double> next;
    next.reserve(block.size() * k);
    for (double b : block)
      for (int j = 0; j < k; ++j) next.push_back(b * a[j]);
    for (double x : next) sum += eta[deg] * eta[deg] * x * x;
    block = std::move(next);
  }
  return std::sqrt(sum);
}

// Uniform random simplex point / label pair streams for property tests.
inline calib::SimplexVec random_simplex(int k, calib::Rng& rng) {
  return calib::SimplexVec(calib::dirichlet_flat(k, rng));
}

}  // namespace oracle
