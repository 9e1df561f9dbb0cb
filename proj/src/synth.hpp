#pragma once

#include "dataset.hpp"

namespace calib {

// Calibrated baselines: draw v from a prior, then y ~ Categorical(v).
struct CalibratedPrior {
  enum class Kind { Dirichlet, UniformVertices, FixedPoints };
  Kind kind = Kind::Dirichlet;
  std::vector<double> alpha;         // Dirichlet concentration, length k
  std::vector<SimplexVec> points;    // FixedPoints support
  // FixedPoints only: spread samples and labels in exact proportions so the
  // empirical distribution is exactly group-balanced when n divides evenly.
  bool stratified = false;

  static CalibratedPrior dirichlet(std::vector<double> alpha);
  static CalibratedPrior uniform_vertices();
  static CalibratedPrior fixed_points(std::vector<SimplexVec> pts,
                                      bool stratified = false);
};

EmpiricalDistribution gen_calibrated(const CalibratedPrior& prior, int k,
                                     int n, std::uint64_t seed);

// A planted violation together with the exact population value it certifies.
struct PlantedDataset {
  EmpiricalDistribution emp;
  double certified_alpha = 0.0;
};

// Two prediction points whose probability mass on T is over/under-stated by
// gamma; certified_alpha is the exact population smCE_T. When `exact` is
// set, the empirical distribution carries the population weights
// (one record per support point and label); otherwise n samples are drawn.
PlantedDataset gen_subset_violation(int k, const std::vector<int>& T,
                                    double gamma, int n, std::uint64_t seed,
                                    bool exact = false);

// Residuals along e_1 - e_2 modulated by tanh(L<a,v> + b) on a two-point
// support; certified_alpha is the exact population correlation with the
// planted weight function.
PlantedDataset gen_sigmoid_violation(int k, const std::vector<double>& a,
                                     double b, double L, double gamma, int n,
                                     std::uint64_t seed, bool exact = false);

// The planted weight function of gen_sigmoid_violation, for cross-checks.
std::vector<double> sigmoid_plant_weight(const std::vector<double>& a,
                                         double b, double L,
                                         const SimplexVec& v);

}  // namespace calib
