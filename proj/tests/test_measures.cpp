#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "measures.hpp"
#include "oracles.hpp"

using namespace calib;

namespace {

EmpiricalDistribution single(std::vector<double> v, int label) {
  const int k = static_cast<int>(v.size());
  return EmpiricalDistribution({Sample{make_simplex(v), OneHot(label, k)}});
}

// Exactly balanced groups: every v appears with labels in proportion v.
EmpiricalDistribution balanced_two_group() {
  std::vector<Sample> s;
  SimplexVec a = make_simplex({0.5, 0.5});
  SimplexVec b = make_simplex({0.25, 0.75});
  s.push_back(Sample{a, OneHot(0, 2)});
  s.push_back(Sample{a, OneHot(1, 2)});
  for (int i = 0; i < 4; ++i) s.push_back(Sample{b, OneHot(i < 1 ? 0 : 1, 2)});
  return EmpiricalDistribution(std::move(s));
}

EmpiricalDistribution random_emp(int k, int n, Rng& rng) {
  std::vector<Sample> s;
  for (int i = 0; i < n; ++i) {
    SimplexVec v = oracle::random_simplex(k, rng);
    s.push_back(Sample{v, OneHot(static_cast<int>(rng() % k), k)});
  }
  return EmpiricalDistribution(std::move(s));
}

}  // namespace

TEST_CASE("classwise examples") {
  CHECK(classwise_ce(balanced_two_group()).value <= 1e-12);
  CHECK(classwise_ce(single({0.5, 0.5}, 0)).value ==
        doctest::Approx(0.5).epsilon(1e-12));

  std::vector<Sample> pair;
  pair.push_back(Sample{make_simplex({0.5, 0.5}), OneHot(0, 2)});
  pair.push_back(Sample{make_simplex({0.5, 0.5}), OneHot(1, 2)});
  CHECK(classwise_ce(EmpiricalDistribution(std::move(pair))).value <= 1e-12);
}

TEST_CASE("confidence and top-label examples") {
  CHECK(confidence_ce(balanced_two_group()).value <= 1e-12);
  CHECK(toplabel_ce(balanced_two_group()).value <= 1e-12);
  CHECK(confidence_ce(single({0.8, 0.2}, 1)).value ==
        doctest::Approx(0.8).epsilon(1e-12));

  // Argmax ties break toward the smaller index: with v = (0.4, 0.4, 0.2)
  // and y = e_1 the tracked coordinate must be 0 (residual 0.6, not 0.4).
  CHECK(confidence_ce(single({0.4, 0.4, 0.2}, 0)).value ==
        doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("plug-in ECE examples") {
  CHECK(ece_canonical(balanced_two_group()).value <= 1e-12);
  CHECK(ece_canonical(single({0.5, 0.5}, 0)).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("subset smooth calibration examples") {
  EmpiricalDistribution one = single({0.5, 0.5}, 0);
  CHECK(subset_smooth_ce(one, {0, 1}).report.value <= 1e-12);  // full set
  CHECK(subset_smooth_ce(one, {0}).report.value ==
        doctest::Approx(0.5).epsilon(1e-12));
  EmpiricalDistribution cal = balanced_two_group();
  for (const std::vector<int>& T :
       {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 1}})
    CHECK(subset_smooth_ce(cal, T).report.value <= 1e-9);
  CHECK_THROWS_AS(subset_smooth_ce(one, {}), CalibError);
}

TEST_CASE("ssce examples and monotonicity in m") {
  SsceResult r = ssce_m(single({0.5, 0.5}, 0), 2);
  CHECK(r.report.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.argmax_T.size() == 1);

  CHECK(ssce_m(balanced_two_group(), 2).report.value <= 1e-9);

  Rng rng = make_rng(9);
  EmpiricalDistribution emp = random_emp(4, 15, rng);
  double prev = 0.0;
  for (int m = 1; m <= 4; ++m) {
    const double cur = ssce_m(emp, m).report.value;
    CHECK(cur + 1e-12 >= prev);
    prev = cur;
  }
}

TEST_CASE("psce oracle examples") {
  EmpiricalDistribution one = single({0.5, 0.5}, 0);
  CHECK(psce_oracle(one, 2.0, 16, 1).value ==
        doctest::Approx(1.0).epsilon(1e-9));  // ||y - v||_1
  CHECK(psce_oracle(balanced_two_group(), 2.0, 16, 1).value <= 1e-9);

  Rng rng = make_rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    EmpiricalDistribution emp = random_emp(3, 12, rng);
    const double ss = ssce_m(emp, 2).report.value;
    const double ps = psce_oracle(emp, 2.0, 8, trial).value;
    CHECK(ps >= ss - 1e-9);
  }
}

TEST_CASE("fsce examples") {
  CHECK(fsce_exact(single({0.5, 0.5}, 0)).value ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fsce_exact(balanced_two_group()).value <= 1e-9);
}

TEST_CASE("ordering law on random empirical distributions") {
  Rng rng = make_rng(29);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const int n = 5 + static_cast<int>(rng() % 36);
    const int m = 1 + static_cast<int>(rng() % k);
    EmpiricalDistribution emp = random_emp(k, n, rng);
    const double ss = ssce_m(emp, m).report.value;
    const double ps = psce_oracle(emp, std::max(1.0, double(m)), 32, trial).value;
    const double fs = fsce_exact(emp).value;
    CHECK(ss <= ps + 1e-9);
    CHECK(ps <= fs + 1e-9);
  }
}

TEST_CASE("decision calibration examples") {
  std::vector<Sample> exact;
  exact.push_back(Sample{make_simplex({1.0, 0.0}), OneHot(0, 2)});
  exact.push_back(Sample{make_simplex({0.0, 1.0}), OneHot(1, 2)});
  CHECK(decision_ce_bruteforce(EmpiricalDistribution(std::move(exact))).value <=
        1e-12);

  CHECK(decision_ce_bruteforce(single({0.5, 0.5}, 0)).value ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

  // Max over all realizable dichotomies dominates any fixed split.
  Rng rng = make_rng(31);
  EmpiricalDistribution emp = random_emp(3, 8, rng);
  const double dec = decision_ce_bruteforce(emp).value;
  std::vector<double> in(3, 0.0), out(3, 0.0);
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    auto& side = (s.v[0] > 0.4) ? in : out;
    for (int j = 0; j < 3; ++j)
      side[j] += emp.weight(i) * (s.y.coord(j) - s.v[j]);
  }
  double lo = 0.0;
  for (auto& v : {in, out}) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    lo += std::sqrt(n2);
  }
  CHECK(dec + 1e-9 >= lo);
}

TEST_CASE("fsce matches the dense simplex oracle at small n") {
  Rng rng = make_rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 2);
    const int n = 2 + static_cast<int>(rng() % 5);
    EmpiricalDistribution emp = random_emp(k, n, rng);

    // Re-derive per coordinate with the independent simplex LP.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    bool dup = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dist[i][j] = l1_dist(emp.sample(i).v, emp.sample(j).v);
        if (i != j && dist[i][j] == 0.0) dup = true;
      }
    if (dup) continue;
    double want = 0.0;
    for (int ell = 0; ell < k; ++ell) {
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i)
        c[i] = emp.weight(i) *
               (emp.sample(i).y.coord(ell) - emp.sample(i).v[ell]);
      want += oracle::lipschitz_lp_simplex(dist, c);
    }
    CHECK(fsce_exact(emp).value == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("all measures vanish on exactly balanced groups") {
  EmpiricalDistribution emp = balanced_two_group();
  CHECK(classwise_ce(emp).value <= 1e-9);
  CHECK(confidence_ce(emp).value <= 1e-9);
  CHECK(toplabel_ce(emp).value <= 1e-9);
  CHECK(ece_canonical(emp).value <= 1e-9);
  CHECK(ssce_m(emp, 2).report.value <= 1e-9);
  CHECK(psce_oracle(emp, 2.0, 32, 0).value <= 1e-9);
  CHECK(fsce_exact(emp).value <= 1e-9);
  CHECK(decision_ce_bruteforce(emp).value <= 1e-9);
}

TEST_CASE("measures are invariant under sample permutation") {
  Rng rng = make_rng(41);
  EmpiricalDistribution emp = random_emp(3, 14, rng);
  std::vector<Sample> shuffled(emp.samples());
  std::reverse(shuffled.begin(), shuffled.end());
  EmpiricalDistribution emp2(std::move(shuffled));

  CHECK(classwise_ce(emp).value == doctest::Approx(classwise_ce(emp2).value));
  CHECK(ece_canonical(emp).value == doctest::Approx(ece_canonical(emp2).value));
  CHECK(ssce_m(emp, 2).report.value ==
        doctest::Approx(ssce_m(emp2, 2).report.value).epsilon(1e-12));
  CHECK(fsce_exact(emp).value ==
        doctest::Approx(fsce_exact(emp2).value).epsilon(1e-10));
  CHECK(decision_ce_bruteforce(emp).value ==
        doctest::Approx(decision_ce_bruteforce(emp2).value).epsilon(1e-10));
}

TEST_CASE("guards refuse oversized inputs") {
  Rng rng = make_rng(43);
  CHECK_THROWS_AS(psce_oracle(random_emp(9, 4, rng), 2.0, 4, 0), CalibError);

  std::vector<Sample> big;
  for (int i = 0; i < 17; ++i) {
    SimplexVec v = oracle::random_simplex(2, rng);
    big.push_back(Sample{v, OneHot(0, 2)});
  }
  CHECK_THROWS_AS(decision_ce_bruteforce(EmpiricalDistribution(std::move(big))),
                  CalibError);
}

TEST_CASE("shipped example dataset: frozen golden value, oracle-checked") {
  EmpiricalDistribution emp =
      load_dataset(std::string(TEST_DATA_DIR) + "/example.jsonl");
  SsceResult r = ssce_m(emp, 2);
  CHECK(r.report.value == doctest::Approx(0.031666666666666662).epsilon(1e-9));

  // Re-derive the argmax subset's value with the grid DP.
  std::vector<double> t(emp.size()), c(emp.size());
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    double proj = 0.0, resid = 0.0;
    for (int j : r.argmax_T) {
      proj += s.v[j];
      resid += s.y.coord(j) - s.v[j];
    }
    t[i] = proj;
    c[i] = emp.weight(i) * resid;
  }
  CHECK(std::abs(oracle::smooth_ce_grid_dp(t, c) - r.report.value) <= 2e-3);
}

TEST_CASE("weighted correlation evaluates the calibration functional") {
  EmpiricalDistribution one = single({0.5, 0.5}, 0);
  const double corr = weighted_correlation(one, [](const SimplexVec&) {
    return std::vector<double>{1.0, -1.0};
  });
  CHECK(corr == doctest::Approx(1.0).epsilon(1e-12));
}
