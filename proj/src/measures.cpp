#include "measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace calib {

namespace {

std::string subset_to_string(const std::vector<int>& T) {
  std::ostringstream os;
  for (size_t i = 0; i < T.size(); ++i) os << (i ? "," : "") << T[i];
  return os.str();
}

// Groups with identical prediction vector; weights and label mass pooled.
struct VGroup {
  SimplexVec v;
  double weight = 0.0;
  std::vector<double> ymass;  // sum of weight * one-hot
};

std::vector<VGroup> group_by_v(const EmpiricalDistribution& emp) {
  std::map<std::vector<double>, int> index;
  std::vector<VGroup> groups;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    auto [it, fresh] = index.try_emplace(s.v.coords(),
                                         static_cast<int>(groups.size()));
    if (fresh)
      groups.push_back(VGroup{s.v, 0.0, std::vector<double>(emp.dim(), 0.0)});
    VGroup& g = groups[it->second];
    g.weight += emp.weight(i);
    g.ymass[s.y.label] += emp.weight(i);
  }
  return groups;
}

int argmax_label(const SimplexVec& v) {
  int best = 0;
  for (int j = 1; j < v.dim(); ++j)
    if (v[j] > v[best]) best = j;  // ties go to the smallest index
  return best;
}

}  // namespace

double weighted_correlation(const EmpiricalDistribution& emp,
                            const WeightFn& w) {
  double acc = 0.0;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    const std::vector<double> wv = w(s.v);
    if (static_cast<int>(wv.size()) != emp.dim())
      fail(ErrorCode::DimensionMismatch, "weight function dimension");
    double ip = 0.0;
    for (int j = 0; j < emp.dim(); ++j)
      ip += (s.y.coord(j) - s.v[j]) * wv[j];
    acc += emp.weight(i) * ip;
  }
  return acc;
}

CalibrationReport classwise_ce(const EmpiricalDistribution& emp) {
  const int k = emp.dim();
  double best = 0.0;
  int best_ell = 0;
  for (int ell = 0; ell < k; ++ell) {
    std::map<double, double> residual;  // v^ell value -> summed residual
    for (int i = 0; i < emp.size(); ++i) {
      const Sample& s = emp.sample(i);
      residual[s.v[ell]] += emp.weight(i) * (s.y.coord(ell) - s.v[ell]);
    }
    double total = 0.0;
    for (const auto& [t, r] : residual) total += std::abs(r);
    if (total > best) {
      best = total;
      best_ell = ell;
    }
  }
  CalibrationReport rep;
  rep.measure = "classwise";
  rep.value = best;
  rep.add_meta("argmax_class", static_cast<long long>(best_ell));
  return rep;
}

CalibrationReport confidence_ce(const EmpiricalDistribution& emp) {
  std::map<double, double> residual;  // confidence value -> summed residual
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    const int ell = argmax_label(s.v);
    residual[s.v[ell]] += emp.weight(i) * (s.y.coord(ell) - s.v[ell]);
  }
  double total = 0.0;
  for (const auto& [t, r] : residual) total += std::abs(r);
  CalibrationReport rep;
  rep.measure = "confidence";
  rep.value = total;
  return rep;
}

CalibrationReport toplabel_ce(const EmpiricalDistribution& emp) {
  std::map<std::pair<int, double>, double> residual;  // (label, conf) -> res
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    const int ell = argmax_label(s.v);
    residual[{ell, s.v[ell]}] +=
        emp.weight(i) * (s.y.coord(ell) - s.v[ell]);
  }
  double total = 0.0;
  for (const auto& [key, r] : residual) total += std::abs(r);
  CalibrationReport rep;
  rep.measure = "toplabel";
  rep.value = total;
  return rep;
}

CalibrationReport ece_canonical(const EmpiricalDistribution& emp) {
  double acc = 0.0;
  for (const VGroup& g : group_by_v(emp)) {
    if (g.weight <= 0.0) continue;
    double l1 = 0.0;
    for (int j = 0; j < emp.dim(); ++j)
      l1 += std::abs(g.ymass[j] / g.weight - g.v[j]);
    acc += g.weight * l1;
  }
  CalibrationReport rep;
  rep.measure = "ece";
  rep.value = acc;
  return rep;
}

SmoothCeSolution smooth_ce_scalar(const std::vector<double>& t,
                                  const std::vector<double>& c) {
  if (t.size() != c.size())
    fail(ErrorCode::DimensionMismatch, "smooth_ce_scalar lengths");
  SmoothCeSolution out;
  out.phi.assign(t.size(), 0.0);
  if (t.empty()) return out;

  std::map<double, double> merged;  // equal t forces equal phi, so pool c
  for (size_t i = 0; i < t.size(); ++i) merged[t[i]] += c[i];
  std::vector<double> tt, cc;
  for (const auto& [pos, coef] : merged) {
    tt.push_back(pos);
    cc.push_back(coef);
  }
  LipschitzLpResult lp = lipschitz_lp_line(tt, cc);
  out.value = lp.value;
  std::map<double, double> phi_at;
  for (size_t g = 0; g < tt.size(); ++g) phi_at[tt[g]] = lp.h[g];
  for (size_t i = 0; i < t.size(); ++i) out.phi[i] = phi_at[t[i]];
  return out;
}

SubsetSmoothResult subset_smooth_ce(const EmpiricalDistribution& emp,
                                    const std::vector<int>& T) {
  if (T.empty()) fail(ErrorCode::EmptySubset, "subset_smooth_ce: empty T");
  for (int j : T)
    if (j < 0 || j >= emp.dim())
      fail(ErrorCode::DimensionMismatch, "subset index out of range");

  std::vector<double> t(emp.size()), c(emp.size());
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    double proj = 0.0, resid = 0.0;
    for (int j : T) {
      proj += s.v[j];
      resid += s.y.coord(j) - s.v[j];
    }
    t[i] = proj;
    c[i] = emp.weight(i) * resid;
  }
  SubsetSmoothResult res;
  res.solution = smooth_ce_scalar(t, c);
  res.report.measure = "smce_subset";
  res.report.value = res.solution.value;
  res.report.add_meta("T", subset_to_string(T));
  return res;
}

namespace {

long long subset_count_guard(int k, int m) {
  long long total = 0;
  long long binom = 1;
  for (int j = 1; j <= m; ++j) {
    binom = binom * (k - j + 1) / j;
    total += binom;
    if (total > 1000000) return total;
  }
  return total;
}

// Enumerates nonempty subsets of [k] with at most m elements.
template <class F>
void for_each_subset(int k, int m, F&& fn) {
  std::vector<int> T;
  std::function<void(int)> rec = [&](int start) {
    if (!T.empty()) fn(T);
    if (static_cast<int>(T.size()) == m) return;
    for (int j = start; j < k; ++j) {
      T.push_back(j);
      rec(j + 1);
      T.pop_back();
    }
  };
  rec(0);
}

}  // namespace

SsceResult ssce_m(const EmpiricalDistribution& emp, int m) {
  const int k = emp.dim();
  if (m < 1) fail(ErrorCode::EmptySubset, "ssce_m needs m >= 1");
  m = std::min(m, k);
  if (subset_count_guard(k, m) > 1000000)
    fail(ErrorCode::TooManySubsets, "ssce_m: too many subsets");

  SsceResult best;
  best.report.measure = "ssce";
  best.report.value = 0.0;
  for_each_subset(k, m, [&](const std::vector<int>& T) {
    SubsetSmoothResult cur = subset_smooth_ce(emp, T);
    if (cur.report.value > best.report.value || best.argmax_T.empty()) {
      best.report.value = cur.report.value;
      best.argmax_T = T;
      best.solution = cur.solution;
    }
  });
  best.report.metadata.clear();
  best.report.add_meta("m", static_cast<long long>(m));
  best.report.add_meta("argmax_T", subset_to_string(best.argmax_T));
  return best;
}

CalibrationReport psce_oracle(const EmpiricalDistribution& emp, double m,
                              int directions, std::uint64_t seed) {
  const int k = emp.dim();
  if (k > 8) fail(ErrorCode::TooLarge, "psce_oracle guard: k > 8");
  if (m < 1.0) fail(ErrorCode::InvalidMagnitude, "psce_oracle needs m >= 1");

  // Candidate directions. Subset indicators with |T| <= m keep their native
  // [0,1] projection; everything else goes through t -> (t+1)/2.
  struct Candidate {
    std::vector<double> a;
    bool rescale = false;
  };
  std::vector<Candidate> cands;
  const int msub = std::min(k, static_cast<int>(std::floor(m)));
  for_each_subset(k, msub, [&](const std::vector<int>& T) {
    std::vector<double> a(k, 0.0);
    for (int j : T) a[j] = 1.0;
    cands.push_back({std::move(a), false});
  });
  for (int j = 0; j < k; ++j) {
    std::vector<double> a(k, 0.0);
    a[j] = -1.0;
    cands.push_back({std::move(a), true});
  }
  Rng rng = make_rng(seed);
  for (int d = 0; d < directions; ++d) {
    std::vector<double> a(k);
    double norm2 = 0.0;
    for (int j = 0; j < k; ++j) {
      a[j] = 2.0 * uniform01(rng) - 1.0;
      norm2 += a[j] * a[j];
    }
    if (norm2 > m) {
      const double f = std::sqrt(m / norm2);
      for (double& x : a) x *= f;
    }
    cands.push_back({std::move(a), true});
  }

  // Projections are shared across coordinates; only c changes with ell.
  std::vector<std::vector<double>> ts(cands.size(),
                                      std::vector<double>(emp.size()));
  for (size_t ci = 0; ci < cands.size(); ++ci) {
    for (int i = 0; i < emp.size(); ++i) {
      double p = 0.0;
      for (int j = 0; j < k; ++j) p += cands[ci].a[j] * emp.sample(i).v[j];
      ts[ci][i] = cands[ci].rescale ? (p + 1.0) / 2.0 : p;
    }
  }

  double total = 0.0;
  for (int ell = 0; ell < k; ++ell) {
    std::vector<double> c(emp.size());
    for (int i = 0; i < emp.size(); ++i) {
      const Sample& s = emp.sample(i);
      c[i] = emp.weight(i) * (s.y.coord(ell) - s.v[ell]);
    }
    double best = 0.0;
    for (size_t ci = 0; ci < cands.size(); ++ci)
      best = std::max(best, smooth_ce_scalar(ts[ci], c).value);
    total += best;
  }

  CalibrationReport rep;
  rep.measure = "psce";
  rep.value = total;
  rep.add_meta("m", m);
  rep.add_meta("directions", static_cast<long long>(directions));
  rep.add_meta("seed", static_cast<long long>(seed));
  rep.add_meta("direction_domain", "rescaled [-1,1]->[0,1]");
  return rep;
}

CalibrationReport fsce_exact(const EmpiricalDistribution& emp) {
  std::vector<VGroup> groups = group_by_v(emp);
  const int n = static_cast<int>(groups.size());
  if (n > 500) fail(ErrorCode::TooLarge, "fsce_exact guard: > 500 groups");
  const int k = emp.dim();

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = l1_dist(groups[i].v, groups[j].v);

  double total = 0.0;
  for (int ell = 0; ell < k; ++ell) {
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i)
      c[i] = groups[i].ymass[ell] - groups[i].weight * groups[i].v[ell];
    total += lipschitz_lp_metric(dist, c).value;
  }

  CalibrationReport rep;
  rep.measure = "fsce";
  rep.value = total;
  rep.add_meta("groups", static_cast<long long>(n));
  return rep;
}

namespace {

// Max-margin separation of groups S vs the rest by <a, v> > b with
// a in [-1,1]^k, b in [-2,2]. Realizable when the margin clears 1e-7.
bool halfspace_realizable(const std::vector<VGroup>& groups,
                          unsigned long mask) {
  const int n = static_cast<int>(groups.size());
  const int k = groups[0].v.dim();
  // Variables: y_j = a_j + 1 in [0,2] (j<k), u = b + 2 in [0,4], eps >= 0.
  const int nv = k + 2;
  std::vector<std::vector<double>> A;
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(nv, 0.0);
    const bool in_s = (mask >> i) & 1u;
    for (int j = 0; j < k; ++j)
      row[j] = in_s ? -groups[i].v[j] : groups[i].v[j];
    row[k] = in_s ? 1.0 : -1.0;
    row[k + 1] = 1.0;
    // <a,v> - b >= eps becomes -<y,v> + u + eps <= 1 (since sum v = 1);
    // the reverse side becomes <y,v> - u + eps <= -1.
    rhs.push_back(in_s ? 1.0 : -1.0);
    A.push_back(std::move(row));
  }
  for (int j = 0; j < k; ++j) {
    std::vector<double> row(nv, 0.0);
    row[j] = 1.0;
    A.push_back(std::move(row));
    rhs.push_back(2.0);
  }
  {
    std::vector<double> row(nv, 0.0);
    row[k] = 1.0;
    A.push_back(std::move(row));
    rhs.push_back(4.0);
  }
  {
    std::vector<double> row(nv, 0.0);
    row[k + 1] = 1.0;
    A.push_back(std::move(row));
    rhs.push_back(8.0);
  }
  std::vector<double> obj(nv, 0.0);
  obj[k + 1] = 1.0;
  std::vector<double> x;
  const double margin = small_lp_maximize(A, rhs, obj, x);
  return margin >= 1e-7;
}

}  // namespace

CalibrationReport decision_ce_bruteforce(const EmpiricalDistribution& emp) {
  std::vector<VGroup> groups = group_by_v(emp);
  const int n = static_cast<int>(groups.size());
  if (n > 16) fail(ErrorCode::TooLarge, "decision_ce guard: > 16 groups");
  const int k = emp.dim();

  std::vector<std::vector<double>> r(n, std::vector<double>(k));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      r[i][j] = groups[i].ymass[j] - groups[i].weight * groups[i].v[j];

  double best = 0.0;
  unsigned long best_mask = 0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    if (!halfspace_realizable(groups, mask)) continue;
    double in2 = 0.0, out2 = 0.0;
    for (int j = 0; j < k; ++j) {
      double si = 0.0, so = 0.0;
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1u)
          si += r[i][j];
        else
          so += r[i][j];
      }
      in2 += si * si;
      out2 += so * so;
    }
    const double val = std::sqrt(in2) + std::sqrt(out2);
    if (val > best) {
      best = val;
      best_mask = mask;
    }
  }

  CalibrationReport rep;
  rep.measure = "decision";
  rep.value = best;
  rep.add_meta("groups", static_cast<long long>(n));
  rep.add_meta("argmax_mask", static_cast<long long>(best_mask));
  return rep;
}

}  // namespace calib
