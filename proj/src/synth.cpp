#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace calib {

namespace {

int sample_categorical(const std::vector<double>& p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (size_t j = 0; j < p.size(); ++j) {
    acc += p[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(p.size()) - 1;
}

// Largest remainder apportionment of n into proportions p.
std::vector<int> apportion(int n, const std::vector<double>& p) {
  const int m = static_cast<int>(p.size());
  std::vector<int> counts(m, 0);
  std::vector<std::pair<double, int>> rem(m);
  int assigned = 0;
  for (int j = 0; j < m; ++j) {
    const double exact = n * p[j];
    counts[j] = static_cast<int>(std::floor(exact + 1e-12));
    assigned += counts[j];
    rem[j] = {-(exact - counts[j]), j};
  }
  std::sort(rem.begin(), rem.end());
  for (int j = 0; assigned < n; ++j, ++assigned) counts[rem[j % m].second]++;
  return counts;
}

PlantedDataset make_planted(const std::vector<SimplexVec>& support,
                            const std::vector<std::vector<double>>& cond,
                            double certified, int n, std::uint64_t seed,
                            bool exact) {
  const int k = support[0].dim();
  std::vector<Sample> samples;
  if (exact) {
    std::vector<double> weights;
    for (size_t p = 0; p < support.size(); ++p)
      for (int j = 0; j < k; ++j)
        if (cond[p][j] > 0.0) {
          samples.push_back(Sample{support[p], OneHot(j, k)});
          weights.push_back(cond[p][j] / support.size());
        }
    return PlantedDataset{
        EmpiricalDistribution(std::move(samples), std::move(weights)),
        certified};
  }
  Rng rng = make_rng(seed);
  for (int i = 0; i < n; ++i) {
    const int p = sample_categorical(
        std::vector<double>(support.size(), 1.0 / support.size()), rng);
    samples.push_back(Sample{support[p], OneHot(sample_categorical(cond[p], rng), k)});
  }
  return PlantedDataset{EmpiricalDistribution(std::move(samples)), certified};
}

}  // namespace

CalibratedPrior CalibratedPrior::dirichlet(std::vector<double> alpha) {
  CalibratedPrior p;
  p.kind = Kind::Dirichlet;
  p.alpha = std::move(alpha);
  return p;
}

CalibratedPrior CalibratedPrior::uniform_vertices() {
  CalibratedPrior p;
  p.kind = Kind::UniformVertices;
  return p;
}

CalibratedPrior CalibratedPrior::fixed_points(std::vector<SimplexVec> pts,
                                              bool stratified) {
  CalibratedPrior p;
  p.kind = Kind::FixedPoints;
  p.points = std::move(pts);
  p.stratified = stratified;
  return p;
}

EmpiricalDistribution gen_calibrated(const CalibratedPrior& prior, int k,
                                     int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::BadPrior, "gen_calibrated needs n >= 1");
  Rng rng = make_rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);

  switch (prior.kind) {
    case CalibratedPrior::Kind::Dirichlet: {
      if (static_cast<int>(prior.alpha.size()) != k)
        fail(ErrorCode::BadPrior, "dirichlet prior needs k concentrations");
      for (double a : prior.alpha)
        if (!(a > 0.0)) fail(ErrorCode::BadPrior, "concentration must be > 0");
      bool flat = std::all_of(prior.alpha.begin(), prior.alpha.end(),
                              [](double a) { return a == 1.0; });
      for (int i = 0; i < n; ++i) {
        std::vector<double> v;
        if (flat) {
          v = dirichlet_flat(k, rng);
        } else {
          // Gamma draws via Marsaglia-Tsang would drag in more machinery
          // than the priors used here need; mixture of flat draws biased by
          // concentration covers alpha >= 1 only.
          v.resize(k);
          double sum = 0.0;
          for (int j = 0; j < k; ++j) {
            double g = 0.0;
            const int reps = static_cast<int>(std::round(prior.alpha[j]));
            if (std::abs(prior.alpha[j] - reps) > 1e-9 || reps < 1)
              fail(ErrorCode::BadPrior,
                   "only integer concentrations >= 1 are supported");
            for (int r = 0; r < reps; ++r) {
              double u = uniform01(rng);
              if (u <= 0.0) u = 0x1.0p-53;
              g += -std::log(u);
            }
            v[j] = g;
            sum += g;
          }
          for (double& x : v) x /= sum;
        }
        SimplexVec sv(std::move(v));
        samples.push_back(Sample{sv, OneHot(sample_categorical(sv.coords(), rng), k)});
      }
      break;
    }
    case CalibratedPrior::Kind::UniformVertices: {
      for (int i = 0; i < n; ++i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
        std::vector<double> v(k, 0.0);
        v[j] = 1.0;
        samples.push_back(Sample{SimplexVec(std::move(v)), OneHot(j, k)});
      }
      break;
    }
    case CalibratedPrior::Kind::FixedPoints: {
      if (prior.points.empty())
        fail(ErrorCode::BadPrior, "fixed_points prior needs support points");
      for (const auto& p : prior.points)
        if (p.dim() != k) fail(ErrorCode::BadPrior, "support dim mismatch");
      if (prior.stratified) {
        const auto per_point = apportion(
            n, std::vector<double>(prior.points.size(),
                                   1.0 / prior.points.size()));
        for (size_t p = 0; p < prior.points.size(); ++p) {
          const auto labels = apportion(per_point[p], prior.points[p].coords());
          for (int j = 0; j < k; ++j)
            for (int c = 0; c < labels[j]; ++c)
              samples.push_back(Sample{prior.points[p], OneHot(j, k)});
        }
      } else {
        for (int i = 0; i < n; ++i) {
          const size_t p = rng() % prior.points.size();
          samples.push_back(Sample{
              prior.points[p],
              OneHot(sample_categorical(prior.points[p].coords(), rng), k)});
        }
      }
      break;
    }
  }
  return EmpiricalDistribution(std::move(samples));
}

PlantedDataset gen_subset_violation(int k, const std::vector<int>& T,
                                    double gamma, int n, std::uint64_t seed,
                                    bool exact) {
  if (T.empty()) fail(ErrorCode::EmptySubset, "gen_subset_violation: empty T");
  const int tsz = static_cast<int>(T.size());
  if (tsz >= k)
    fail(ErrorCode::InvalidMagnitude, "T must be a proper subset of [k]");
  for (int j : T)
    if (j < 0 || j >= k)
      fail(ErrorCode::DimensionMismatch, "subset index out of range");

  // Support: mass a on T at the plus point, mass b at the minus point, the
  // remainder spread evenly off T. Residuals move +/- gamma of probability
  // onto/off T.
  const double a = 0.1, b = 0.9;
  if (gamma < 0.0 || gamma > std::min(1.0 - a, b) + 1e-12)
    fail(ErrorCode::InvalidMagnitude,
         "gamma must lie in [0, " + format_double(std::min(1.0 - a, b)) + "]");

  auto build = [&](double mass_T, double resid) {
    std::vector<double> v(k), q(k);
    for (int j = 0; j < k; ++j) {
      v[j] = (1.0 - mass_T) / (k - tsz);
      q[j] = (1.0 - mass_T - resid) / (k - tsz);
    }
    for (int j : T) {
      v[j] = mass_T / tsz;
      q[j] = (mass_T + resid) / tsz;
    }
    return std::make_pair(SimplexVec(std::move(v)), q);
  };
  auto [vp, qp] = build(a, gamma);
  auto [vm, qm] = build(b, -gamma);

  // smCE_T of the two-point population: maximize (gamma/2)(phi+ - phi-)
  // under |phi+ - phi-| <= b - a and the [-1,1] box.
  const double certified = 0.5 * gamma * std::min(2.0, b - a);
  return make_planted({vp, vm}, {qp, qm}, certified, n, seed, exact);
}

std::vector<double> sigmoid_plant_weight(const std::vector<double>& a,
                                         double b, double L,
                                         const SimplexVec& v) {
  double ip = 0.0;
  for (int j = 0; j < v.dim(); ++j) ip += a[j] * v[j];
  const double g = std::tanh(L * ip + b);
  std::vector<double> w(v.dim(), 0.0);
  w[0] = g;
  w[1] = -g;
  return w;
}

PlantedDataset gen_sigmoid_violation(int k, const std::vector<double>& a,
                                     double b, double L, double gamma, int n,
                                     std::uint64_t seed, bool exact) {
  if (k < 2) fail(ErrorCode::DimensionTooSmall, "need k >= 2");
  if (static_cast<int>(a.size()) != k)
    fail(ErrorCode::DimensionMismatch, "direction a must have length k");
  for (double x : a)
    if (std::abs(x) > 1.0 + 1e-12)
      fail(ErrorCode::InvalidMagnitude, "a must lie in [-1,1]^k");
  if (L < 1.0) fail(ErrorCode::InvalidMagnitude, "need L >= 1");
  if (gamma < 0.0) fail(ErrorCode::InvalidMagnitude, "gamma must be >= 0");

  // Two-point support. Coordinates 1 and 2 carry the residual and get fixed
  // mass q each; the rest is tilted along a (restricted off the first two
  // coordinates) to separate the two projections.
  std::vector<SimplexVec> support;
  if (k == 2) {
    const double s = 0.15;
    support.push_back(SimplexVec({0.5 + s, 0.5 - s}));
    support.push_back(SimplexVec({0.5 - s, 0.5 + s}));
  } else {
    const double q = 0.3;
    const int rest = k - 2;
    std::vector<double> tilt(rest, 0.0);
    double mean = 0.0;
    for (int j = 0; j < rest; ++j) mean += a[j + 2] / rest;
    double norm = 0.0;
    for (int j = 0; j < rest; ++j) {
      tilt[j] = a[j + 2] - mean;
      norm = std::max(norm, std::abs(tilt[j]));
    }
    if (norm > 0.0)
      for (double& x : tilt) x /= norm;
    const double base = (1.0 - 2.0 * q) / rest;
    for (int sgn : {+1, -1}) {
      std::vector<double> v(k, q);
      for (int j = 0; j < rest; ++j) v[j + 2] = base * (1.0 + sgn * tilt[j]);
      support.push_back(SimplexVec(std::move(v)));
    }
  }

  double certified = 0.0;
  std::vector<std::vector<double>> cond;
  for (const SimplexVec& v : support) {
    double ip = 0.0;
    for (int j = 0; j < k; ++j) ip += a[j] * v[j];
    const double g = std::tanh(L * ip + b);
    std::vector<double> qv(v.coords());
    qv[0] += gamma * g;
    qv[1] -= gamma * g;
    if (qv[0] < -1e-12 || qv[0] > 1.0 + 1e-12 || qv[1] < -1e-12 ||
        qv[1] > 1.0 + 1e-12)
      fail(ErrorCode::InvalidMagnitude,
           "gamma too large for the support headroom");
    qv[0] = std::clamp(qv[0], 0.0, 1.0);
    qv[1] = std::clamp(qv[1], 0.0, 1.0);
    // <residual, plant> = 2 * gamma * g^2 at this point.
    certified += 2.0 * gamma * g * g / support.size();
    cond.push_back(std::move(qv));
  }
  return make_planted(support, cond, certified, n, seed, exact);
}

}  // namespace calib
