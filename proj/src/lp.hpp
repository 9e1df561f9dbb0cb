#pragma once

#include <vector>

#include "common.hpp"

namespace calib {

// Exact maximizer of sum_i c_i h_i over {h : |h_i| <= 1, h_i - h_j <= d_ij}.
// Solved as the dual of an uncapacitated min-cost flow (successive shortest
// paths with potentials); the potentials recover an optimal h.
struct LipschitzLpResult {
  double value = 0.0;
  std::vector<double> h;
};

// Line metric d_ij = |t_i - t_j| with box |h| <= 1. Positions must be
// strictly increasing (merge duplicates first).
LipschitzLpResult lipschitz_lp_line(const std::vector<double>& t,
                                    const std::vector<double>& c);

// General symmetric distance matrix with entries in [0, 2] and box |h| <= 1.
LipschitzLpResult lipschitz_lp_metric(const std::vector<std::vector<double>>& dist,
                                      const std::vector<double>& c);

// Small dense LP: maximize c.x subject to A x <= b, x >= 0.
// Returns +inf when unbounded and -inf when infeasible; otherwise the
// optimum, with a solution written to x. Tableau simplex for problems with a
// few dozen rows; not meant for anything larger.
double small_lp_maximize(const std::vector<std::vector<double>>& A,
                         const std::vector<double>& b,
                         const std::vector<double>& c, std::vector<double>& x);

}  // namespace calib
