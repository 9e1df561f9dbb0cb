#include "lab.hpp"

#include <cmath>
#include <map>

namespace calib {

namespace {

int categorical(const std::vector<double>& p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    acc += p[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(p.size()) - 1;
}

std::vector<int> draw_labeler(const Packing& packing, Rng& rng) {
  std::vector<int> labels;
  labels.reserve(packing.size());
  for (const SimplexVec& v : packing.points)
    labels.push_back(categorical(v.coords(), rng));
  return labels;
}

}  // namespace

HardFamily build_hard_family(int k, double eps, std::uint64_t seed,
                             int candidate_budget) {
  if (k < 3) fail(ErrorCode::DimensionTooSmall, "hard family needs k >= 3");
  if (!(eps > 0.0 && eps < 0.5))
    fail(ErrorCode::InvalidMagnitude, "hard family needs 0 < eps < 1/2");
  Packing packing = greedy_packing(k, eps, candidate_budget, seed);
  if (packing.size() == 0)
    fail(ErrorCode::EmptyPacking, "greedy packing came back empty");
  Rng rng = make_rng(mix_seed(seed, 0x1abe1e5));
  std::vector<int> labels = draw_labeler(packing, rng);
  return HardFamily{std::move(packing), std::move(labels), eps / 2.0};
}

double certified_witness_value(const HardFamily& family) {
  double acc = 0.0;
  const int n = family.packing.size();
  for (int i = 0; i < n; ++i) {
    const SimplexVec& v = family.packing.points[i];
    acc += family.witness_scale * (1.0 - v[family.labels[i]]) / n;
  }
  return acc;
}

EmpiricalDistribution full_support_dw(const HardFamily& family) {
  const int k = family.packing.k;
  std::vector<Sample> samples;
  for (int i = 0; i < family.packing.size(); ++i)
    samples.push_back(
        Sample{family.packing.points[i], OneHot(family.labels[i], k)});
  return EmpiricalDistribution(std::move(samples));
}

EmpiricalDistribution sample_calibrated_on_v(const Packing& packing, int n,
                                             std::uint64_t seed) {
  if (packing.size() == 0)
    fail(ErrorCode::EmptyPacking, "sampling from an empty packing");
  Rng rng = make_rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int p = static_cast<int>(rng() % packing.points.size());
    const SimplexVec& v = packing.points[p];
    samples.push_back(Sample{v, OneHot(categorical(v.coords(), rng), packing.k)});
  }
  return EmpiricalDistribution(std::move(samples));
}

EmpiricalDistribution sample_dw(const HardFamily& family, int n,
                                std::uint64_t seed) {
  if (family.packing.size() == 0)
    fail(ErrorCode::EmptyPacking, "sampling from an empty packing");
  Rng rng = make_rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int p = static_cast<int>(rng() % family.packing.points.size());
    samples.push_back(Sample{family.packing.points[p],
                             OneHot(family.labels[p], family.packing.k)});
  }
  return EmpiricalDistribution(std::move(samples));
}

BirthdayOutcome birthday_experiment(const Packing& packing, int n, int trials,
                                    const AcceptTest& test, std::uint64_t seed,
                                    bool freeze_labeler) {
  if (trials < 100)
    fail(ErrorCode::InvalidMagnitude, "birthday_experiment needs >= 100 trials");
  if (packing.size() == 0)
    fail(ErrorCode::EmptyPacking, "birthday_experiment on empty packing");

  std::vector<int> frozen;
  if (freeze_labeler) {
    Rng rng = make_rng(mix_seed(seed, 0x1abe1e5));
    frozen = draw_labeler(packing, rng);
  }

  int acc1 = 0, acc2 = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s1 = mix_seed(seed, 2 * t);
    const std::uint64_t s2 = mix_seed(seed, 2 * t + 1);
    if (test(sample_calibrated_on_v(packing, n, s1))) ++acc1;

    HardFamily fam{packing, {}, packing.eps / 2.0};
    if (freeze_labeler) {
      fam.labels = frozen;
    } else {
      Rng rng = make_rng(mix_seed(s2, 0x1abe1e5));
      fam.labels = draw_labeler(packing, rng);
    }
    if (test(sample_dw(fam, n, s2))) ++acc2;
  }
  BirthdayOutcome out;
  out.p1 = static_cast<double>(acc1) / trials;
  out.p2 = static_cast<double>(acc2) / trials;
  out.gap = std::abs(out.p1 - out.p2);
  return out;
}

bool collision_consistency_test(const EmpiricalDistribution& emp) {
  std::map<std::vector<double>, int> seen;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    auto [it, fresh] = seen.try_emplace(s.v.coords(), s.y.label);
    if (!fresh && it->second != s.y.label) return false;
  }
  return true;
}

}  // namespace calib
