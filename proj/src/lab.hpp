#pragma once

#include <functional>

#include "dataset.hpp"
#include "simplex.hpp"

namespace calib {

// A packing together with a frozen labeler w: one one-hot outcome per
// packing point, drawn once with E[w(v)] = v. The scaled labeler
// (eps/2) * w is the 1-Lipschitz witness behind the fsCE lower bound.
struct HardFamily {
  Packing packing;
  std::vector<int> labels;  // labels[i] answers packing.points[i]
  double witness_scale = 0.0;  // eps / 2
};

HardFamily build_hard_family(int k, double eps, std::uint64_t seed,
                             int candidate_budget = 0);

// Exact E[<y - v, (eps/2) e_{w(v)}>] over the family's finite support;
// at least eps/12 by construction.
double certified_witness_value(const HardFamily& family);

// Full-support empirical of D_w: uniform over packing points, y = w(v).
EmpiricalDistribution full_support_dw(const HardFamily& family);

// v_i uniform over the packing, y_i ~ Categorical(v_i).
EmpiricalDistribution sample_calibrated_on_v(const Packing& packing, int n,
                                             std::uint64_t seed);

// v_i uniform over the packing, y_i = w(v_i) from the frozen labeler.
EmpiricalDistribution sample_dw(const HardFamily& family, int n,
                                std::uint64_t seed);

using AcceptTest = std::function<bool(const EmpiricalDistribution&)>;

struct BirthdayOutcome {
  double p1 = 0.0;  // acceptance rate on calibrated draws
  double p2 = 0.0;  // acceptance rate on fresh-labeler D_w draws
  double gap = 0.0;
};

// Acceptance-rate gap of `test` between calibrated sampling and D_w
// sampling. The labeler is redrawn per trial unless freeze_labeler is set,
// matching the indistinguishability setup; trials use derived seeds.
BirthdayOutcome birthday_experiment(const Packing& packing, int n, int trials,
                                    const AcceptTest& test, std::uint64_t seed,
                                    bool freeze_labeler = false);

// Built-in test: accept iff samples that repeat a prediction agree on the
// label. D_w always passes; calibrated data fails once a collision draws
// two different labels.
bool collision_consistency_test(const EmpiricalDistribution& emp);

}  // namespace calib
