#include <doctest.h>

#include <cmath>
#include <map>

#include "lab.hpp"
#include "measures.hpp"
#include "oracles.hpp"

using namespace calib;

TEST_CASE("hard family invariants") {
  HardFamily fam = build_hard_family(4, 1.0 / 3, 5);
  REQUIRE(fam.packing.size() > 0);
  CHECK(fam.witness_scale == doctest::Approx(1.0 / 6.0));
  for (int i = 0; i < fam.packing.size(); ++i) {
    const SimplexVec& v = fam.packing.points[i];
    // ||v - e_label||_1 = 2 (1 - v_label) >= 1/3.
    CHECK(2.0 * (1.0 - v[fam.labels[i]]) >= 1.0 / 3);
  }
  const double witness = certified_witness_value(fam);
  CHECK(witness >= fam.packing.eps / 12.0);
  CHECK(fsce_exact(full_support_dw(fam)).value >= fam.packing.eps / 12.0);
}

TEST_CASE("frozen labeler makes D_w deterministic") {
  HardFamily fam = build_hard_family(3, 0.25, 9);
  EmpiricalDistribution a = sample_dw(fam, 200, 4);
  EmpiricalDistribution b = sample_dw(fam, 200, 4);
  std::map<std::vector<double>, int> seen;
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.sample(i).v.coords() == b.sample(i).v.coords());
    CHECK(a.sample(i).y.label == b.sample(i).y.label);
    auto [it, fresh] = seen.try_emplace(a.sample(i).v.coords(),
                                        a.sample(i).y.label);
    CHECK(it->second == a.sample(i).y.label);  // repeats agree
  }
  // ECE of a full-support D_w sample: every group is deterministic and far
  // from its prediction, so the plug-in value is at least 1/3.
  CHECK(ece_canonical(full_support_dw(fam)).value >= 1.0 / 3);
}

TEST_CASE("calibrated sampling hits the packing uniformly") {
  Packing pk = greedy_packing(3, 0.2, 0, 13);
  REQUIRE(pk.size() >= 5);
  const int n = 4000;
  EmpiricalDistribution emp = sample_calibrated_on_v(pk, n, 17);
  std::map<std::vector<double>, int> counts;
  for (int i = 0; i < emp.size(); ++i) counts[emp.sample(i).v.coords()]++;
  CHECK(static_cast<int>(counts.size()) <= pk.size());
  for (const auto& [coords, cnt] : counts) {
    bool in_packing = false;
    for (const SimplexVec& p : pk.points)
      if (p.coords() == coords) in_packing = true;
    CHECK(in_packing);  // support is contained in the packing
  }
  const double p = 1.0 / pk.size();
  const double sigma = std::sqrt(n * p * (1 - p));
  for (const auto& [v, c] : counts)
    CHECK(std::abs(c - n * p) <= 4.0 * sigma);

  // Grouped plug-in ECE stays near zero for calibrated draws.
  const double min_group = n * p - 4.0 * sigma;
  CHECK(ece_canonical(emp).value <= 3.0 * std::sqrt(3.0 / min_group));
}

TEST_CASE("single draws from the two worlds are identically distributed") {
  Packing pk = greedy_packing(4, 0.12, 0, 23);
  REQUIRE(pk.size() >= 100);
  BirthdayOutcome out = birthday_experiment(pk, 1, 600,
                                            collision_consistency_test, 3);
  CHECK(out.p1 == 1.0);  // one sample can never be inconsistent
  CHECK(out.p2 == 1.0);
  CHECK(out.gap == 0.0);
}

TEST_CASE("collision test separates the worlds only after collisions") {
  Packing pk = greedy_packing(4, 0.15, 0, 29);
  REQUIRE(pk.size() >= 100);
  const int V = pk.size();

  BirthdayOutcome small = birthday_experiment(
      pk, 5, 600, collision_consistency_test, 31);
  CHECK(small.p2 == 1.0);  // D_w is always self-consistent
  const double sigma = std::sqrt(0.25 / 600);
  CHECK(small.gap <= 25.0 / (2.0 * V) + 3.0 * sigma);

  const int n_big = static_cast<int>(3.0 * std::sqrt(double(V)));
  BirthdayOutcome big = birthday_experiment(
      pk, n_big, 600, collision_consistency_test, 37);
  CHECK(big.gap >= 0.5);
}

TEST_CASE("empty packings are rejected where sampling needs support") {
  Packing empty({}, 0.3, 3);
  CHECK_THROWS_AS(sample_calibrated_on_v(empty, 5, 1), CalibError);
  HardFamily fam{empty, {}, 0.15};
  CHECK_THROWS_AS(sample_dw(fam, 5, 1), CalibError);
}

TEST_CASE("birthday trial budget guard") {
  Packing pk = greedy_packing(3, 0.3, 0, 41);
  CHECK_THROWS_AS(
      birthday_experiment(pk, 5, 10, collision_consistency_test, 1),
      CalibError);
}
