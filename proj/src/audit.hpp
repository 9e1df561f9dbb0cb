#pragma once

#include <functional>
#include <optional>

#include "dataset.hpp"
#include "kernel.hpp"

namespace calib {

// Output of an auditing run: a bounded vector-valued weight function with
// measured certificates. Correlation is always estimated on data held out
// from the fit (or on the exact population weights when those are given).
struct Witness {
  VectorDualFunction function;
  double achieved_correlation = 0.0;
  double range_certificate = 0.0;          // max |component| over a seeded sample
  std::vector<double> norm_certificate;    // per-component RKHS norm

  std::vector<double> eval(const SimplexVec& v) const {
    return function.eval(v);
  }
};

struct LearnerOutput {
  std::function<double(const SimplexVec&)> hypothesis;
  // Present when the hypothesis is natively a dual RKHS function (it is for
  // the kernel learner; reductions that post-compose the lift map cannot
  // express themselves this way).
  std::optional<DualRkhsFunction> dual;
  double achieved_correlation = 0.0;
};

// Signed one-hot residual draw with E[z | v, y] = (y - v)/2.
struct ResidualSample {
  int ell = 0;
  int sign = +1;
};
ResidualSample residual_sample(const SimplexVec& v, const OneHot& y, Rng& rng);

struct AuditConfig {
  double c0 = 4.0;  // projected-smooth degree: d = ceil(c0 / alpha)
  double c1 = 4.0;  // competitor norm r = (c1 sqrt(m))^(c2 / alpha)
  double c2 = 4.0;
  double c3 = 1.0;  // sigmoid degree: d = ceil(c3 L log(L / alpha))
  // Overrides the worst-case competitor norm r (and with it the reported
  // detection threshold beta = alpha / (3 r s)). The default constants above
  // produce astronomically small thresholds at desk scale.
  std::optional<double> r_override;
  double n_max = 200000;  // budget guard for the implied sample size
  double delta = 0.1;     // failure probability in the implied-n formula

  double split_fraction = 0.7;
  std::uint64_t split_seed = 17;
  // Exact-population inputs carry their weights; no split, certificates and
  // correlation are computed on the full distribution.
  bool exact_population = false;

  int range_cert_points = 10000;
  std::uint64_t range_cert_seed = 4242;
};

// Algorithm: lambda = sqrt(sum_ij z_i z_j ker(v_i, v_j)),
// h(u) = (1/(lambda s)) sum_i z_i ker(v_i, u); zero function when
// lambda <= 1e-12. Output always lies in the RKHS ball of radius 1/s.
LearnerOutput kernel_weak_learn(
    const std::vector<std::pair<SimplexVec, double>>& data,
    const MultinomialKernel& kern);

// Vector version, one component per coordinate of the residual y - v.
Witness kernel_audit(const EmpiricalDistribution& emp,
                     const MultinomialKernel& kern,
                     const AuditConfig& cfg = {});

struct AuditResult {
  Witness witness;
  CalibrationReport report;
  double beta = 0.0;  // reported detection threshold alpha / (3 r s)
  int degree = 0;
};

AuditResult audit_projected_smooth(const EmpiricalDistribution& emp, double m,
                                   double alpha, double delta,
                                   AuditConfig cfg = {});

AuditResult audit_sigmoid(const EmpiricalDistribution& emp, double L,
                          double alpha, AuditConfig cfg = {});

// Low-degree polynomial weight class P(d,1)^k: the kernel auditor at the
// stated degree with competitor norm r = 1.
AuditResult audit_low_degree(const EmpiricalDistribution& emp, int degree,
                             double alpha, AuditConfig cfg = {});

using WeakLearner = std::function<LearnerOutput(
    const std::vector<std::pair<SimplexVec, double>>&)>;

// Residual-sampling reduction: partitions draws by their signed one-hot
// coordinate, learns per coordinate, embeds each hypothesis into its
// coordinate, and keeps the best estimate on held-out data.
AuditResult auditor_from_learner(const EmpiricalDistribution& emp,
                                 const WeakLearner& learner, double alpha,
                                 int n0, double delta, std::uint64_t seed,
                                 const AuditConfig& cfg = {});

using Auditor =
    std::function<Witness(const EmpiricalDistribution&, std::uint64_t seed)>;

// Reverse reduction: labels y_i ~ lift(x_i) + (z_i/3)(e_1 - e_2), audits the
// lifted data, and extracts h'(x) = (w(lift(x))_1 - w(lift(x))_2) / 2.
LearnerOutput learner_from_auditor(
    const std::vector<std::pair<SimplexVec, double>>& data,
    const Auditor& auditor, std::uint64_t seed);

// Halfspace transport along the lift: a' = 3a, b' = b - a_1 - a_2 satisfies
// <a', lift(v)> + b' = <a, v> + b.
std::pair<std::vector<double>, double> lift_halfspace(
    const std::vector<double>& a, double b);

// Witness document IO (dual-function serialization plus certificates).
void save_witness(const std::string& path, const Witness& w);
Witness load_witness(const std::string& path);
std::string witness_to_text(const Witness& w);
Witness witness_from_text(const std::string& text);

}  // namespace calib
