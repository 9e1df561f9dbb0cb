#include "calib.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

#include "audit.hpp"
#include "dataset.hpp"
#include "lab.hpp"
#include "measures.hpp"
#include "recal.hpp"
#include "synth.hpp"

using namespace calib;

struct calib_dataset {
  EmpiricalDistribution emp;
};
struct calib_report {
  CalibrationReport rep;
};
struct calib_witness {
  Witness w;
};

namespace {

thread_local std::string g_last_error;

int map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooLarge:
    case ErrorCode::TooManySubsets:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::DegreeBudgetExceeded:
    case ErrorCode::InsufficientData:
      return CALIB_EGUARD;
    case ErrorCode::SolverFailure:
    case ErrorCode::NoProgress:
      return CALIB_EFAIL;
    default:
      return CALIB_EPARSE;
  }
}

template <class F>
int guarded(F&& fn) {
  try {
    fn();
    return CALIB_OK;
  } catch (const CalibError& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CALIB_EFAIL;
  }
}

// key=value parameter lists.
class Params {
 public:
  explicit Params(const char* text) {
    if (!text) return;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        fail(ErrorCode::ParseError, "bad parameter token '" + tok + "'");
      kv_[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  double get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    return parse_double(key, it->second);
  }

  long long get_int(const std::string& key, long long dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
      size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "parameter " + key + " must be an integer");
    }
  }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  std::vector<double> get_list(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    std::vector<double> out;
    std::istringstream is(it->second);
    std::string item;
    while (std::getline(is, item, ','))
      out.push_back(parse_double(key, item));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double x : get_list(key)) out.push_back(static_cast<int>(x));
    return out;
  }

  std::vector<SimplexVec> get_points(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    std::vector<SimplexVec> out;
    std::istringstream is(it->second);
    std::string point;
    while (std::getline(is, point, ';')) {
      std::vector<double> coords;
      std::istringstream ps(point);
      std::string item;
      while (std::getline(ps, item, ','))
        coords.push_back(parse_double(key, item));
      out.push_back(make_simplex(coords));
    }
    return out;
  }

 private:
  static double parse_double(const std::string& key, const std::string& text) {
    try {
      size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size() || !std::isfinite(v))
        throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "parameter " + key + " must be a real number");
    }
  }

  std::map<std::string, std::string> kv_;
};

AuditConfig audit_config_from(const Params& p) {
  AuditConfig cfg;
  cfg.c0 = p.get_double("c0", cfg.c0);
  cfg.c1 = p.get_double("c1", cfg.c1);
  cfg.c2 = p.get_double("c2", cfg.c2);
  cfg.c3 = p.get_double("c3", cfg.c3);
  if (p.has("r")) cfg.r_override = p.get_double("r", 1.0);
  cfg.n_max = p.get_double("nmax", cfg.n_max);
  cfg.delta = p.get_double("delta", cfg.delta);
  cfg.split_fraction = p.get_double("split", cfg.split_fraction);
  cfg.split_seed = p.get_int("split_seed", cfg.split_seed);
  cfg.exact_population = p.get_int("exact", 0) != 0;
  return cfg;
}

AuditResult run_audit(const EmpiricalDistribution& emp,
                      const std::string& family, double alpha,
                      const Params& p) {
  AuditConfig cfg = audit_config_from(p);
  if (family == "psmooth") {
    const double m = p.get_double("m", emp.dim());
    return audit_projected_smooth(emp, m, alpha, cfg.delta, cfg);
  }
  if (family == "sigmoid") {
    const double L = p.get_double("L", 2.0);
    return audit_sigmoid(emp, L, alpha, cfg);
  }
  if (family == "lowdeg") {
    const int degree = static_cast<int>(p.get_int("degree", 2));
    return audit_low_degree(emp, degree, alpha, cfg);
  }
  fail(ErrorCode::ParseError, "unknown audit family '" + family + "'");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* calib_last_error(void) { return g_last_error.c_str(); }

int calib_dataset_load(const char* path, calib_dataset** out) {
  return guarded([&] {
    if (!path || !out) fail(ErrorCode::ParseError, "null argument");
    *out = new calib_dataset{load_dataset(path)};
  });
}

int calib_dataset_parse(const char* text, calib_dataset** out) {
  return guarded([&] {
    if (!text || !out) fail(ErrorCode::ParseError, "null argument");
    *out = new calib_dataset{parse_dataset(text)};
  });
}

int calib_dataset_save(const calib_dataset* ds, const char* path) {
  return guarded([&] {
    if (!ds || !path) fail(ErrorCode::ParseError, "null argument");
    save_dataset(path, ds->emp);
  });
}

int calib_dataset_size(const calib_dataset* ds) {
  return ds ? ds->emp.size() : 0;
}

int calib_dataset_dim(const calib_dataset* ds) {
  return ds ? ds->emp.dim() : 0;
}

void calib_dataset_free(calib_dataset* ds) { delete ds; }

int calib_synth(const char* generator, const char* params,
                calib_dataset** out, double* certified_alpha) {
  return guarded([&] {
    if (!generator || !out) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    const std::string gen = generator;
    const int k = static_cast<int>(p.get_int("k", 0));
    const int n = static_cast<int>(p.get_int("n", 0));
    const std::uint64_t seed = p.get_int("seed", 0);
    if (gen == "calibrated") {
      const std::string prior = p.get_string("prior", "dirichlet");
      CalibratedPrior cp;
      if (prior == "dirichlet") {
        std::vector<double> alpha = p.get_list("alpha");
        if (alpha.empty()) alpha.assign(k, 1.0);
        cp = CalibratedPrior::dirichlet(std::move(alpha));
      } else if (prior == "vertices") {
        cp = CalibratedPrior::uniform_vertices();
      } else if (prior == "fixed") {
        cp = CalibratedPrior::fixed_points(p.get_points("points"),
                                           p.get_int("stratified", 0) != 0);
      } else {
        fail(ErrorCode::BadPrior, "unknown prior '" + prior + "'");
      }
      const int kk = k > 0 ? k
                           : (cp.kind == CalibratedPrior::Kind::FixedPoints &&
                                      !cp.points.empty()
                                  ? cp.points[0].dim()
                                  : 0);
      *out = new calib_dataset{gen_calibrated(cp, kk, n, seed)};
      if (certified_alpha) *certified_alpha = 0.0;
      return;
    }
    PlantedDataset planted = [&] {
      const bool exact = p.get_int("exact", 0) != 0;
      const double gamma = p.get_double("gamma", 0.0);
      if (gen == "subset-violation")
        return gen_subset_violation(k, p.get_int_list("T"), gamma, n, seed,
                                    exact);
      if (gen == "sigmoid-violation")
        return gen_sigmoid_violation(k, p.get_list("a"),
                                     p.get_double("b", 0.0),
                                     p.get_double("L", 2.0), gamma, n, seed,
                                     exact);
      fail(ErrorCode::ParseError, "unknown generator '" + gen + "'");
    }();
    if (certified_alpha) *certified_alpha = planted.certified_alpha;
    *out = new calib_dataset{std::move(planted.emp)};
  });
}

int calib_measure(const calib_dataset* ds, const char* measure,
                  const char* params, calib_report** out) {
  return guarded([&] {
    if (!ds || !measure || !out) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    const std::string name = measure;
    CalibrationReport rep;
    if (name == "classwise") {
      rep = classwise_ce(ds->emp);
    } else if (name == "confidence") {
      rep = confidence_ce(ds->emp);
    } else if (name == "toplabel") {
      rep = toplabel_ce(ds->emp);
    } else if (name == "ece") {
      rep = ece_canonical(ds->emp);
    } else if (name == "ssce") {
      rep = ssce_m(ds->emp, static_cast<int>(p.get_int("m", ds->emp.dim())))
                .report;
    } else if (name == "smce-subset") {
      rep = subset_smooth_ce(ds->emp, p.get_int_list("T")).report;
    } else if (name == "psce") {
      rep = psce_oracle(ds->emp, p.get_double("m", ds->emp.dim()),
                        static_cast<int>(p.get_int("directions", 64)),
                        p.get_int("seed", 0));
    } else if (name == "fsce") {
      rep = fsce_exact(ds->emp);
    } else if (name == "decision") {
      rep = decision_ce_bruteforce(ds->emp);
    } else {
      fail(ErrorCode::ParseError, "unknown measure '" + name + "'");
    }
    *out = new calib_report{std::move(rep)};
  });
}

double calib_report_value(const calib_report* rep) {
  return rep ? rep->rep.value : 0.0;
}

int calib_report_text(const calib_report* rep, char* buf, size_t cap) {
  if (!rep) return -1;
  const std::string text = rep->rep.to_kv_text();
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return static_cast<int>(text.size());
}

void calib_report_free(calib_report* rep) { delete rep; }

int calib_audit(const calib_dataset* ds, const char* family, double alpha,
                const char* params, calib_witness** w_out,
                calib_report** rep_out) {
  return guarded([&] {
    if (!ds || !family) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    AuditResult res = run_audit(ds->emp, family, alpha, p);
    if (w_out) *w_out = new calib_witness{std::move(res.witness)};
    if (rep_out) *rep_out = new calib_report{std::move(res.report)};
  });
}

int calib_witness_save(const calib_witness* w, const char* path) {
  return guarded([&] {
    if (!w || !path) fail(ErrorCode::ParseError, "null argument");
    save_witness(path, w->w);
  });
}

int calib_witness_load(const char* path, calib_witness** out) {
  return guarded([&] {
    if (!path || !out) fail(ErrorCode::ParseError, "null argument");
    *out = new calib_witness{load_witness(path)};
  });
}

double calib_witness_correlation(const calib_witness* w) {
  return w ? w->w.achieved_correlation : 0.0;
}

int calib_witness_eval(const calib_witness* w, const double* v, int k,
                       double* out) {
  return guarded([&] {
    if (!w || !v || !out) fail(ErrorCode::ParseError, "null argument");
    const std::vector<double> vals =
        w->w.eval(make_simplex(std::vector<double>(v, v + k)));
    std::memcpy(out, vals.data(), vals.size() * sizeof(double));
  });
}

void calib_witness_free(calib_witness* w) { delete w; }

int calib_recalibrate(const calib_dataset* ds, const char* family,
                      double alpha, double beta_stop, const char* params,
                      calib_dataset** out, char** trace_csv,
                      char** pipeline_doc) {
  return guarded([&] {
    if (!ds || !family) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    Auditor auditor = [&](const EmpiricalDistribution& emp,
                          std::uint64_t seed) {
      Params pp(params);
      AuditConfig cfg = audit_config_from(pp);
      cfg.split_seed = seed;
      const std::string fam = family;
      if (fam == "psmooth")
        return audit_projected_smooth(emp, pp.get_double("m", emp.dim()),
                                      alpha, cfg.delta, cfg)
            .witness;
      if (fam == "sigmoid")
        return audit_sigmoid(emp, pp.get_double("L", 2.0), alpha, cfg).witness;
      if (fam == "lowdeg")
        return audit_low_degree(
                   emp, static_cast<int>(pp.get_int("degree", 2)), alpha, cfg)
            .witness;
      fail(ErrorCode::ParseError, "unknown audit family");
    };
    RecalResult res = recalibrate(ds->emp, auditor, beta_stop,
                                  p.get_int("max_iters", 0));
    if (trace_csv) {
      std::ostringstream os;
      os << "iter,squared_loss,witness_correlation,step_size\n";
      os << "0," << format_double(res.trace.initial_loss) << ",,\n";
      for (size_t i = 0; i < res.trace.iterations.size(); ++i) {
        const RecalIteration& it = res.trace.iterations[i];
        os << (i + 1) << "," << format_double(it.squared_loss) << ","
           << format_double(it.witness_correlation) << ","
           << format_double(it.step_size) << "\n";
      }
      *trace_csv = dup_string(os.str());
    }
    if (pipeline_doc) *pipeline_doc = dup_string(pipeline_to_text(res.trace));
    if (out) *out = new calib_dataset{std::move(res.emp)};
  });
}

int calib_apply_pipeline(const char* pipeline_doc, const calib_dataset* ds,
                         calib_dataset** out) {
  return guarded([&] {
    if (!pipeline_doc || !ds || !out)
      fail(ErrorCode::ParseError, "null argument");
    const auto pipeline = pipeline_from_text(pipeline_doc);
    std::vector<Sample> samples;
    samples.reserve(ds->emp.size());
    for (int i = 0; i < ds->emp.size(); ++i)
      samples.push_back(Sample{apply_pipeline(pipeline, ds->emp.sample(i).v),
                               ds->emp.sample(i).y});
    if (ds->emp.has_weights()) {
      std::vector<double> w(ds->emp.size());
      for (int i = 0; i < ds->emp.size(); ++i) w[i] = ds->emp.weight(i);
      *out = new calib_dataset{
          EmpiricalDistribution(std::move(samples), std::move(w))};
    } else {
      *out = new calib_dataset{EmpiricalDistribution(std::move(samples))};
    }
  });
}

int calib_lab_packing(const char* params, char** csv) {
  return guarded([&] {
    if (!csv) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    const int k = static_cast<int>(p.get_int("k", 3));
    const double eps = p.get_double("eps", 1.0 / 3.0);
    const std::uint64_t seed = p.get_int("seed", 0);
    Packing pk = greedy_packing(
        k, eps, static_cast<int>(p.get_int("budget", 0)), seed);
    double min_pair = 2.0, min_vertex = 2.0;
    for (int i = 0; i < pk.size(); ++i) {
      for (int j = i + 1; j < pk.size(); ++j)
        min_pair = std::min(min_pair, l1_dist(pk.points[i], pk.points[j]));
      for (int c = 0; c < k; ++c)
        min_vertex =
            std::min(min_vertex, 2.0 * (1.0 - pk.points[i][c]));
    }
    std::ostringstream os;
    os << "k,eps,size,min_pair_l1,min_vertex_l1,seed\n";
    os << k << "," << format_double(eps) << "," << pk.size() << ","
       << format_double(pk.size() > 1 ? min_pair : 2.0) << ","
       << format_double(pk.size() > 0 ? min_vertex : 2.0) << "," << seed
       << "\n";
    *csv = dup_string(os.str());
  });
}

int calib_lab_hardfamily(const char* params, char** csv) {
  return guarded([&] {
    if (!csv) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    const int k = static_cast<int>(p.get_int("k", 4));
    const double eps = p.get_double("eps", 1.0 / 3.0);
    const std::uint64_t seed = p.get_int("seed", 0);
    HardFamily fam = build_hard_family(
        k, eps, seed, static_cast<int>(p.get_int("budget", 0)));
    const double witness = certified_witness_value(fam);
    const EmpiricalDistribution emp = full_support_dw(fam);
    const double fsce = fsce_exact(emp).value;
    std::ostringstream os;
    os << "k,eps,V,certified_witness_value,fsce,eps_over_12,seed\n";
    os << k << "," << format_double(eps) << "," << fam.packing.size() << ","
       << format_double(witness) << "," << format_double(fsce) << ","
       << format_double(eps / 12.0) << "," << seed << "\n";
    *csv = dup_string(os.str());
  });
}

int calib_lab_birthday(const char* params, char** csv) {
  return guarded([&] {
    if (!csv) fail(ErrorCode::ParseError, "null argument");
    Params p(params);
    const int k = static_cast<int>(p.get_int("k", 4));
    const double eps = p.get_double("eps", 0.1);
    const int trials = static_cast<int>(p.get_int("trials", 2000));
    const std::uint64_t seed = p.get_int("seed", 0);
    const bool freeze = p.get_int("freeze", 0) != 0;
    std::vector<double> ns = p.get_list("n");
    if (ns.empty()) ns.push_back(5);
    Packing pk = greedy_packing(
        k, eps, static_cast<int>(p.get_int("budget", 0)), seed);
    std::ostringstream os;
    os << "k,eps,V,n,trials,p1,p2,gap,seed\n";
    for (double nd : ns) {
      const int n = static_cast<int>(nd);
      BirthdayOutcome bo = birthday_experiment(
          pk, n, trials, collision_consistency_test, mix_seed(seed, n), freeze);
      os << k << "," << format_double(eps) << "," << pk.size() << "," << n
         << "," << trials << "," << format_double(bo.p1) << ","
         << format_double(bo.p2) << "," << format_double(bo.gap) << "," << seed
         << "\n";
    }
    *csv = dup_string(os.str());
  });
}

void calib_string_free(char* s) { std::free(s); }

}  // extern "C"
