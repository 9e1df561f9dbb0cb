#include "audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace calib {

namespace {

constexpr double kLambdaCutoff = 1e-12;

struct Split {
  std::vector<int> fit, eval;
};

Split split_indices(int n, const AuditConfig& cfg) {
  Split sp;
  if (cfg.exact_population || n < 2) {
    sp.fit.resize(n);
    std::iota(sp.fit.begin(), sp.fit.end(), 0);
    sp.eval = sp.fit;
    return sp;
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(cfg.split_seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  int nfit = std::clamp(static_cast<int>(std::ceil(cfg.split_fraction * n)), 1,
                        n - 1);
  sp.fit.assign(idx.begin(), idx.begin() + nfit);
  sp.eval.assign(idx.begin() + nfit, idx.end());
  return sp;
}

double held_out_correlation(const EmpiricalDistribution& emp,
                            const std::vector<int>& eval,
                            const VectorDualFunction& fn) {
  double wsum = 0.0;
  for (int i : eval) wsum += emp.weight(i);
  if (wsum <= 0.0) return 0.0;
  double acc = 0.0;
  for (int i : eval) {
    const Sample& s = emp.sample(i);
    const std::vector<double> wv = fn.eval(s.v);
    double ip = 0.0;
    for (int j = 0; j < s.v.dim(); ++j)
      ip += (s.y.coord(j) - s.v[j]) * wv[j];
    acc += emp.weight(i) * ip;
  }
  return acc / wsum;
}

double range_certificate(const VectorDualFunction& fn, int k,
                         const AuditConfig& cfg) {
  Rng rng = make_rng(cfg.range_cert_seed);
  double worst = 0.0;
  for (int i = 0; i < cfg.range_cert_points; ++i) {
    SimplexVec v(dirichlet_flat(k, rng));
    for (double x : fn.eval(v)) worst = std::max(worst, std::abs(x));
  }
  return worst;
}

}  // namespace

ResidualSample residual_sample(const SimplexVec& v, const OneHot& y,
                               Rng& rng) {
  if (uniform01(rng) < 0.5) return ResidualSample{y.label, +1};
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int j = 0; j < v.dim(); ++j) {
    acc += v[j];
    if (u < acc) return ResidualSample{j, -1};
  }
  return ResidualSample{v.dim() - 1, -1};
}

LearnerOutput kernel_weak_learn(
    const std::vector<std::pair<SimplexVec, double>>& data,
    const MultinomialKernel& kern) {
  if (data.empty()) fail(ErrorCode::InsufficientData, "kernel_weak_learn: no data");
  const int n = static_cast<int>(data.size());
  auto anchors = std::make_shared<std::vector<SimplexVec>>();
  anchors->reserve(n);
  for (const auto& [v, z] : data) anchors->push_back(v);

  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    quad += data[i].second * data[i].second *
            kern.eval((*anchors)[i], (*anchors)[i]);
    for (int j = i + 1; j < n; ++j)
      quad += 2.0 * data[i].second * data[j].second *
              kern.eval((*anchors)[i], (*anchors)[j]);
  }
  const double lambda = std::sqrt(std::max(0.0, quad));

  LearnerOutput out;
  std::vector<double> coeffs(n, 0.0);
  double scale = 1.0;
  if (lambda > kLambdaCutoff) {
    for (int i = 0; i < n; ++i) coeffs[i] = data[i].second;
    scale = 1.0 / (lambda * kern.s());
  }
  out.dual = DualRkhsFunction(kern, anchors, std::move(coeffs), scale);
  const DualRkhsFunction dual = *out.dual;
  out.hypothesis = [dual](const SimplexVec& v) { return dual_eval(dual, v); };
  double corr = 0.0;
  for (const auto& [v, z] : data) corr += z * out.hypothesis(v) / n;
  out.achieved_correlation = corr;
  return out;
}

Witness kernel_audit(const EmpiricalDistribution& emp,
                     const MultinomialKernel& kern, const AuditConfig& cfg) {
  const int k = emp.dim();
  const Split sp = split_indices(emp.size(), cfg);
  const int n = static_cast<int>(sp.fit.size());

  auto anchors = std::make_shared<std::vector<SimplexVec>>();
  anchors->reserve(n);
  for (int i : sp.fit) anchors->push_back(emp.sample(i).v);

  // Weighted residual embedding per coordinate; one Gram pass shared by all
  // coordinates. Normalization removes the overall weight scale, so uniform
  // weights reproduce the plain sample-mean form.
  std::vector<std::vector<double>> z(static_cast<size_t>(k),
                                     std::vector<double>(n));
  for (int a = 0; a < n; ++a) {
    const Sample& s = emp.sample(sp.fit[a]);
    const double w = emp.weight(sp.fit[a]);
    for (int ell = 0; ell < k; ++ell)
      z[ell][a] = w * (s.y.coord(ell) - s.v[ell]);
  }
  std::vector<double> quad(k, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double kv = kern.eval((*anchors)[a], (*anchors)[b]);
      const double f = (a == b) ? 1.0 : 2.0;
      for (int ell = 0; ell < k; ++ell)
        quad[ell] += f * z[ell][a] * z[ell][b] * kv;
    }
  }

  Witness w;
  w.norm_certificate.resize(k);
  const double s = kern.s();
  for (int ell = 0; ell < k; ++ell) {
    const double lambda = std::sqrt(std::max(0.0, quad[ell]));
    std::vector<double> coeffs(n, 0.0);
    double scale = 1.0;
    if (lambda > kLambdaCutoff) {
      coeffs = z[ell];
      scale = 1.0 / (lambda * s);
      w.norm_certificate[ell] = 1.0 / s;
    } else {
      w.norm_certificate[ell] = 0.0;
    }
    w.function.components.emplace_back(kern, anchors, std::move(coeffs), scale);
  }

  w.achieved_correlation = held_out_correlation(emp, sp.eval, w.function);
  w.range_certificate = range_certificate(w.function, k, cfg);
  return w;
}

namespace {

AuditResult run_kernel_family(const EmpiricalDistribution& emp,
                              const char* family, int degree, double alpha,
                              double r, const AuditConfig& cfg) {
  MultinomialKernel kern(degree);
  const double s = kern.s();
  const double implied_n = std::ceil(emp.dim() * r * r * s * s *
                                     std::log(1.0 / cfg.delta) /
                                     (alpha * alpha));
  if (!(implied_n <= cfg.n_max))
    fail(ErrorCode::BudgetExceeded,
         std::string(family) + ": implied sample size " +
             format_double(implied_n) + " exceeds budget " +
             format_double(cfg.n_max));

  AuditResult res;
  res.degree = degree;
  res.beta = alpha / (3.0 * r * s);
  res.witness = kernel_audit(emp, kern, cfg);
  res.report.measure = std::string("audit_") + family;
  res.report.value = res.witness.achieved_correlation;
  res.report.add_meta("alpha", alpha);
  res.report.add_meta("degree", static_cast<long long>(degree));
  res.report.add_meta("r", r);
  res.report.add_meta("beta", res.beta);
  res.report.add_meta("implied_n", implied_n);
  res.report.add_meta("correlation", res.witness.achieved_correlation);
  res.report.add_meta("range_certificate", res.witness.range_certificate);
  res.report.add_meta("detected",
                      res.witness.achieved_correlation >= res.beta ? "yes"
                                                                   : "no");
  return res;
}

}  // namespace

AuditResult audit_projected_smooth(const EmpiricalDistribution& emp, double m,
                                   double alpha, double delta,
                                   AuditConfig cfg) {
  if (!(alpha > 0.0 && alpha < 0.5))
    fail(ErrorCode::InvalidMagnitude, "need 0 < alpha < 1/2");
  if (!(m >= 2.0 && m <= emp.dim()))
    fail(ErrorCode::InvalidMagnitude, "need m in [2, k]");
  cfg.delta = delta;
  const int degree = static_cast<int>(std::ceil(cfg.c0 / alpha));
  const double r = cfg.r_override
                       ? *cfg.r_override
                       : std::pow(cfg.c1 * std::sqrt(m), cfg.c2 / alpha);
  AuditResult res = run_kernel_family(emp, "psmooth", degree, alpha, r, cfg);
  res.report.add_meta("m", m);
  return res;
}

AuditResult audit_sigmoid(const EmpiricalDistribution& emp, double L,
                          double alpha, AuditConfig cfg) {
  if (!(alpha > 0.0 && alpha < 0.5))
    fail(ErrorCode::InvalidMagnitude, "need 0 < alpha < 1/2");
  if (!(L > 1.0)) fail(ErrorCode::InvalidMagnitude, "need L > 1");
  const int degree =
      static_cast<int>(std::ceil(cfg.c3 * L * std::log(L / alpha)));
  const double r =
      cfg.r_override
          ? *cfg.r_override
          : std::pow(cfg.c1 * std::sqrt(static_cast<double>(emp.dim())),
                     degree);
  AuditResult res = run_kernel_family(emp, "sigmoid", degree, alpha, r, cfg);
  res.report.add_meta("L", L);
  return res;
}

AuditResult audit_low_degree(const EmpiricalDistribution& emp, int degree,
                             double alpha, AuditConfig cfg) {
  if (!(alpha > 0.0 && alpha < 0.5))
    fail(ErrorCode::InvalidMagnitude, "need 0 < alpha < 1/2");
  if (degree < 0) fail(ErrorCode::InvalidMagnitude, "need degree >= 0");
  const double r = cfg.r_override ? *cfg.r_override : 1.0;
  return run_kernel_family(emp, "lowdeg", degree, alpha, r, cfg);
}

AuditResult auditor_from_learner(const EmpiricalDistribution& emp,
                                 const WeakLearner& learner, double alpha,
                                 int n0, double delta, std::uint64_t seed,
                                 const AuditConfig& cfg) {
  (void)delta;
  const int k = emp.dim();
  const int n = emp.size();
  Split sp = split_indices(n, cfg);

  Rng rng = make_rng(seed);
  std::vector<std::vector<std::pair<SimplexVec, double>>> buckets(k);
  for (int i : sp.fit) {
    const Sample& s = emp.sample(i);
    const ResidualSample z = residual_sample(s.v, s.y, rng);
    buckets[z.ell].push_back({s.v, static_cast<double>(z.sign)});
  }

  struct Candidate {
    int coord;
    LearnerOutput learned;
    double estimate;
  };
  std::vector<Candidate> cands;
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(buckets[j].size()) < n0) continue;
    LearnerOutput h = learner(buckets[j]);
    double wsum = 0.0, est = 0.0;
    for (int i : sp.eval) {
      const Sample& s = emp.sample(i);
      est += emp.weight(i) * (s.y.coord(j) - s.v[j]) * h.hypothesis(s.v);
      wsum += emp.weight(i);
    }
    cands.push_back(Candidate{j, std::move(h), wsum > 0 ? est / wsum : 0.0});
  }
  if (cands.empty())
    fail(ErrorCode::InsufficientData,
         "auditor_from_learner: no residual bucket reached n0 = " +
             std::to_string(n0));

  const Candidate* best = &cands[0];
  for (const Candidate& c : cands)
    if (c.estimate > best->estimate) best = &c;
  if (!best->learned.dual)
    fail(ErrorCode::SolverFailure,
         "auditor_from_learner needs a dual-representable learner");

  // Embed the winning hypothesis into its coordinate; the other components
  // are identically zero over the same anchors.
  const DualRkhsFunction& h = *best->learned.dual;
  Witness w;
  w.norm_certificate.assign(k, 0.0);
  for (int j = 0; j < k; ++j) {
    if (j == best->coord) {
      w.function.components.push_back(h);
      w.norm_certificate[j] = rkhs_norm(h);
    } else {
      w.function.components.emplace_back(
          h.kernel, h.anchors, std::vector<double>(h.coeffs.size(), 0.0), 1.0);
    }
  }
  w.achieved_correlation = best->estimate;
  w.range_certificate = range_certificate(w.function, k, cfg);

  AuditResult res;
  res.witness = std::move(w);
  res.degree = h.kernel.degree;
  res.beta = 0.0;
  res.report.measure = "audit_from_learner";
  res.report.value = res.witness.achieved_correlation;
  res.report.add_meta("alpha", alpha);
  res.report.add_meta("selected_coordinate",
                      static_cast<long long>(best->coord));
  res.report.add_meta("buckets", [&] {
    std::ostringstream os;
    for (int j = 0; j < k; ++j) os << (j ? "," : "") << buckets[j].size();
    return os.str();
  }());
  res.report.add_meta("correlation", res.witness.achieved_correlation);
  return res;
}

LearnerOutput learner_from_auditor(
    const std::vector<std::pair<SimplexVec, double>>& data,
    const Auditor& auditor, std::uint64_t seed) {
  if (data.empty())
    fail(ErrorCode::InsufficientData, "learner_from_auditor: no data");
  const int k = data[0].first.dim();
  if (k < 2) fail(ErrorCode::DimensionTooSmall, "learner_from_auditor: k >= 2");

  Rng rng = make_rng(seed);
  std::vector<Sample> samples;
  samples.reserve(data.size());
  for (const auto& [x, zval] : data) {
    if (std::abs(zval) > 1.0 + 1e-12)
      fail(ErrorCode::InvalidMagnitude, "labels must lie in [-1,1]");
    const SimplexVec v = lift(x);
    std::vector<double> target(v.coords());
    target[0] += zval / 3.0;
    target[1] -= zval / 3.0;
    const double u = uniform01(rng);
    double acc = 0.0;
    int label = k - 1;
    for (int j = 0; j < k; ++j) {
      acc += target[j];
      if (u < acc) {
        label = j;
        break;
      }
    }
    samples.push_back(Sample{v, OneHot(label, k)});
  }

  Witness w = auditor(EmpiricalDistribution(std::move(samples)),
                      mix_seed(seed, 1));
  auto fn = std::make_shared<VectorDualFunction>(std::move(w.function));
  LearnerOutput out;
  out.hypothesis = [fn](const SimplexVec& x) {
    const std::vector<double> vals = fn->eval(lift(x));
    return 0.5 * (vals[0] - vals[1]);
  };
  double corr = 0.0;
  for (const auto& [x, zval] : data)
    corr += zval * out.hypothesis(x) / data.size();
  out.achieved_correlation = corr;
  return out;
}

std::pair<std::vector<double>, double> lift_halfspace(
    const std::vector<double>& a, double b) {
  if (a.size() < 2)
    fail(ErrorCode::DimensionTooSmall, "lift_halfspace: k >= 2");
  std::vector<double> ap(a.size());
  for (size_t j = 0; j < a.size(); ++j) ap[j] = 3.0 * a[j];
  return {std::move(ap), b - a[0] - a[1]};
}

std::string witness_to_text(const Witness& w) {
  std::ostringstream os;
  os << "calib-witness v1\n";
  os << "correlation " << format_double(w.achieved_correlation) << "\n";
  os << "range_certificate " << format_double(w.range_certificate) << "\n";
  os << "norm_certificate";
  for (double x : w.norm_certificate) os << " " << format_double(x);
  os << "\n";
  write_vector_dual(os, w.function);
  return os.str();
}

Witness witness_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "calib-witness" || version != "v1")
    fail(ErrorCode::ParseError, "not a witness document");
  std::string key;
  Witness w;
  if (!(is >> key) || key != "correlation")
    fail(ErrorCode::ParseError, "expected correlation");
  is >> w.achieved_correlation;
  if (!(is >> key) || key != "range_certificate")
    fail(ErrorCode::ParseError, "expected range_certificate");
  is >> w.range_certificate;
  if (!(is >> key) || key != "norm_certificate")
    fail(ErrorCode::ParseError, "expected norm_certificate");
  // Norm entries run until the "degree" keyword of the function block.
  std::streampos mark = is.tellg();
  std::string tok;
  while (is >> tok) {
    if (tok == "degree") {
      is.seekg(mark);
      break;
    }
    try {
      w.norm_certificate.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad norm certificate entry");
    }
    mark = is.tellg();
  }
  if (!is) fail(ErrorCode::ParseError, "truncated witness document");
  w.function = read_vector_dual(is);
  if (w.norm_certificate.size() != static_cast<size_t>(w.function.dim()))
    fail(ErrorCode::ParseError, "norm certificate length mismatch");
  return w;
}

void save_witness(const std::string& path, const Witness& w) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path);
  out << witness_to_text(w);
}

Witness load_witness(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return witness_from_text(ss.str());
}

}  // namespace calib
