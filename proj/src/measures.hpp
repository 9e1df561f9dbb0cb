#pragma once

#include <functional>
#include <vector>

#include "dataset.hpp"
#include "lp.hpp"

namespace calib {

// E[<y - v, w(v)>] under the empirical weights; the weighted calibration
// correlation of a candidate weight function.
using WeightFn = std::function<std::vector<double>(const SimplexVec&)>;
double weighted_correlation(const EmpiricalDistribution& emp,
                            const WeightFn& w);

// Exact sup over all bounded test functions via grouping: class-wise,
// confidence and top-label calibration errors, plus the plug-in canonical
// ECE on exact prediction groups.
CalibrationReport classwise_ce(const EmpiricalDistribution& emp);
CalibrationReport confidence_ce(const EmpiricalDistribution& emp);
CalibrationReport toplabel_ce(const EmpiricalDistribution& emp);
CalibrationReport ece_canonical(const EmpiricalDistribution& emp);

// max sum_i c_i phi_i over 1-Lipschitz phi:[0,1] -> [-1,1], solved exactly.
// phi is reported at every input point (duplicated t share one value).
struct SmoothCeSolution {
  double value = 0.0;
  std::vector<double> phi;
};
SmoothCeSolution smooth_ce_scalar(const std::vector<double>& t,
                                  const std::vector<double>& c);

// Smooth calibration error restricted to one subset T of [k] (0-based).
struct SubsetSmoothResult {
  CalibrationReport report;
  SmoothCeSolution solution;
};
SubsetSmoothResult subset_smooth_ce(const EmpiricalDistribution& emp,
                                    const std::vector<int>& T);

// Max of subset_smooth_ce over all nonempty subsets of size <= m; the
// report records the argmax subset.
struct SsceResult {
  CalibrationReport report;
  std::vector<int> argmax_T;
  SmoothCeSolution solution;
};
SsceResult ssce_m(const EmpiricalDistribution& emp, int m);

// Lower-bound oracle for m-projected smooth calibration: per coordinate,
// best scalar LP value over subset indicators with |T| <= m, +/- e_j, and
// random directions with ||a||^2 <= m. Directions outside [0,1] are mapped
// through t -> (t+1)/2, which halves their effective Lipschitz budget; the
// report flags this.
CalibrationReport psce_oracle(const EmpiricalDistribution& emp, double m,
                              int directions, std::uint64_t seed);

// Exact full smooth calibration error: per coordinate an LP over vectors
// 1-Lipschitz w.r.t. pairwise l1 distances (McShane-extendable off-sample).
CalibrationReport fsce_exact(const EmpiricalDistribution& emp);

// Exact decision calibration by enumerating halfspace-realizable
// dichotomies; realizability is an LP with margin 1e-7, so boundary ties
// are tried on both sides.
CalibrationReport decision_ce_bruteforce(const EmpiricalDistribution& emp);

}  // namespace calib
