// Command-line front door for the calibration library. Links the C API only.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "calib.h"

namespace {

int fail_with(int code, const std::string& context) {
  std::cerr << "calibtool: " << context << ": " << calib_last_error() << "\n";
  return code;
}

std::string report_text(const calib_report* rep) {
  const int need = calib_report_text(rep, nullptr, 0);
  std::string buf(need + 1, '\0');
  calib_report_text(rep, buf.data(), buf.size());
  buf.resize(need);
  return buf;
}

bool write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path);
  if (!out) return false;
  out << text;
  return out.good();
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  long long max_n = 0;  // 0 = unlimited
  double tolerance = 1e-9;
};

// Owned handles released on scope exit.
struct DatasetGuard {
  calib_dataset* ds = nullptr;
  ~DatasetGuard() { calib_dataset_free(ds); }
};
struct ReportGuard {
  calib_report* rep = nullptr;
  ~ReportGuard() { calib_report_free(rep); }
};
struct WitnessGuard {
  calib_witness* w = nullptr;
  ~WitnessGuard() { calib_witness_free(w); }
};
struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { calib_string_free(s); }
};

int load_guarded(const std::string& path, const GlobalOpts& g,
                 DatasetGuard& ds) {
  if (int rc = calib_dataset_load(path.c_str(), &ds.ds); rc != CALIB_OK)
    return fail_with(rc, "loading " + path);
  if (g.max_n > 0 && calib_dataset_size(ds.ds) > g.max_n) {
    std::cerr << "calibtool: dataset exceeds --max-n (" << g.max_n << ")\n";
    return CALIB_EGUARD;
  }
  return CALIB_OK;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string join_params(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-class calibration toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global random seed");
  app.add_option("--threads", g.threads,
                 "upper bound on worker threads (current build runs 1)");
  app.add_option("--max-n", g.max_n, "refuse datasets larger than this");
  auto* tol_opt = app.add_option("--tolerance", g.tolerance,
                                 "numeric tolerance recorded with reports");

  // measure
  auto* measure = app.add_subcommand("measure", "compute a calibration error");
  std::string m_in, m_name, m_out, m_subset;
  long long m_m = 0, m_dirs = 64;
  measure->add_option("--in", m_in, "dataset (JSON lines)")->required();
  measure->add_option("--name", m_name,
                      "classwise|confidence|toplabel|ece|ssce|smce-subset|"
                      "psce|fsce|decision")
      ->required();
  measure->add_option("--m", m_m, "subset size bound for ssce/psce");
  measure->add_option("--T", m_subset, "comma-separated subset for smce-subset");
  measure->add_option("--directions", m_dirs, "random directions for psce");
  measure->add_option("--out", m_out, "report file (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "run a calibration auditor");
  std::string a_in, a_family, a_witness_out, a_report_out, a_params;
  double a_alpha = 0.1, a_m = 0.0, a_L = 2.0, a_r = 0.0;
  long long a_degree = -1;
  bool a_exact = false;
  audit->add_option("--in", a_in, "dataset")->required();
  audit->add_option("--family", a_family, "psmooth|sigmoid|lowdeg")
      ->required();
  audit->add_option("--alpha", a_alpha, "violation size to detect")
      ->required();
  audit->add_option("--m", a_m, "projection norm bound (psmooth)");
  audit->add_option("--L", a_L, "sigmoid sharpness (sigmoid)");
  audit->add_option("--degree", a_degree, "kernel degree (lowdeg)");
  audit->add_option("--r", a_r, "competitor norm override");
  audit->add_flag("--exact", a_exact,
                  "treat the dataset as exact population weights");
  audit->add_option("--params", a_params, "extra key=value parameters");
  audit->add_option("--witness-out", a_witness_out, "witness document file");
  audit->add_option("--out", a_report_out, "report file (default stdout)");

  // recalibrate
  auto* recal = app.add_subcommand("recalibrate",
                                   "post-process until the auditor is silent");
  std::string r_in, r_family, r_out, r_trace, r_pipeline, r_params;
  double r_alpha = 0.1, r_beta = 0.05;
  bool r_exact = false;
  recal->add_option("--in", r_in, "dataset")->required();
  recal->add_option("--family", r_family, "psmooth|sigmoid|lowdeg")
      ->required();
  recal->add_option("--alpha", r_alpha, "auditor alpha");
  recal->add_option("--beta", r_beta, "stopping correlation")->required();
  recal->add_flag("--exact", r_exact, "exact population weights");
  recal->add_option("--params", r_params, "extra key=value parameters");
  recal->add_option("--out", r_out, "recalibrated dataset file")->required();
  recal->add_option("--trace", r_trace, "iteration trace CSV");
  recal->add_option("--pipeline-out", r_pipeline, "replayable pipeline file");

  // apply
  auto* apply = app.add_subcommand("apply", "replay a recalibration pipeline");
  std::string ap_in, ap_pipeline, ap_out;
  apply->add_option("--in", ap_in, "dataset")->required();
  apply->add_option("--pipeline", ap_pipeline, "pipeline file")->required();
  apply->add_option("--out", ap_out, "output dataset")->required();

  // lab
  auto* lab = app.add_subcommand("lab", "lower-bound constructions");
  lab->require_subcommand(1);
  std::string lb_out, lb_n = "5";
  long long lb_k = 4, lb_trials = 2000, lb_budget = 0;
  double lb_eps = 1.0 / 3.0;
  bool lb_freeze = false;
  auto add_lab_common = [&](CLI::App* sub) {
    sub->add_option("--k", lb_k, "number of classes");
    sub->add_option("--eps", lb_eps, "packing separation");
    sub->add_option("--budget", lb_budget, "consecutive-rejection budget");
    sub->add_option("--out", lb_out, "CSV file (default stdout)");
  };
  auto* lab_packing = lab->add_subcommand("packing", "greedy simplex packing");
  add_lab_common(lab_packing);
  auto* lab_hard = lab->add_subcommand("hardfamily",
                                       "frozen-labeler miscalibrated family");
  add_lab_common(lab_hard);
  auto* lab_birthday =
      lab->add_subcommand("birthday", "collision indistinguishability sweep");
  add_lab_common(lab_birthday);
  lab_birthday->add_option("--n", lb_n, "sample sizes, comma separated");
  lab_birthday->add_option("--trials", lb_trials, "trials per point");
  lab_birthday->add_flag("--freeze", lb_freeze, "freeze one labeler");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic datasets");
  std::string s_gen, s_out, s_prior = "dirichlet", s_alpha, s_points, s_T,
              s_a;
  long long s_k = 3, s_n = 1000;
  double s_gamma = 0.0, s_L = 2.0, s_b = 0.0;
  bool s_exact = false, s_stratified = false;
  synth->add_option("--gen", s_gen,
                    "calibrated|subset-violation|sigmoid-violation")
      ->required();
  synth->add_option("--out", s_out, "dataset file")->required();
  synth->add_option("--k", s_k, "number of classes");
  synth->add_option("--n", s_n, "sample count");
  synth->add_option("--prior", s_prior, "dirichlet|vertices|fixed");
  synth->add_option("--alpha", s_alpha, "Dirichlet concentrations");
  synth->add_option("--points", s_points,
                    "fixed support, e.g. 0.5,0.5;0.3,0.7");
  synth->add_flag("--stratified", s_stratified, "exact label proportions");
  synth->add_option("--T", s_T, "subset for subset-violation");
  synth->add_option("--a", s_a, "direction for sigmoid-violation");
  synth->add_option("--b", s_b, "sigmoid offset");
  synth->add_option("--L", s_L, "sigmoid sharpness");
  synth->add_option("--gamma", s_gamma, "violation magnitude");
  synth->add_flag("--exact", s_exact, "emit exact population weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : CALIB_EPARSE;
  }

  if (measure->parsed()) {
    DatasetGuard ds;
    if (int rc = load_guarded(m_in, g, ds); rc != CALIB_OK) return rc;
    std::vector<std::string> parts;
    if (m_m > 0) parts.push_back("m=" + std::to_string(m_m));
    if (!m_subset.empty()) parts.push_back("T=" + m_subset);
    if (m_name == "psce") {
      parts.push_back("directions=" + std::to_string(m_dirs));
      parts.push_back("seed=" + std::to_string(g.seed));
    }
    ReportGuard rep;
    if (int rc = calib_measure(ds.ds, m_name.c_str(),
                               join_params(parts).c_str(), &rep.rep);
        rc != CALIB_OK) {
      if (rc == CALIB_EPARSE)
        std::cerr << "usage: calibtool measure --name "
                     "classwise|confidence|toplabel|ece|ssce|smce-subset|"
                     "psce|fsce|decision (see --help)\n";
      return fail_with(rc, "measure " + m_name);
    }
    std::string text = report_text(rep.rep);
    if (tol_opt->count() > 0) text += "tolerance=" + fmt(g.tolerance) + "\n";
    if (!write_file(m_out, text)) {
      std::cerr << "calibtool: cannot write " << m_out << "\n";
      return CALIB_EPARSE;
    }
    return 0;
  }

  if (audit->parsed()) {
    DatasetGuard ds;
    if (int rc = load_guarded(a_in, g, ds); rc != CALIB_OK) return rc;
    std::vector<std::string> parts{a_params};
    if (a_m > 0) parts.push_back("m=" + fmt(a_m));
    parts.push_back("L=" + fmt(a_L));
    if (a_degree >= 0) parts.push_back("degree=" + std::to_string(a_degree));
    if (a_r > 0) parts.push_back("r=" + fmt(a_r));
    if (a_exact) parts.push_back("exact=1");
    parts.push_back("split_seed=" + std::to_string(g.seed + 17));
    WitnessGuard w;
    ReportGuard rep;
    if (int rc = calib_audit(ds.ds, a_family.c_str(), a_alpha,
                             join_params(parts).c_str(), &w.w, &rep.rep);
        rc != CALIB_OK)
      return fail_with(rc, "audit " + a_family);
    if (!a_witness_out.empty()) {
      if (int rc = calib_witness_save(w.w, a_witness_out.c_str());
          rc != CALIB_OK)
        return fail_with(rc, "writing witness");
    }
    std::string text = report_text(rep.rep);
    if (!a_witness_out.empty()) text += "witness_file=" + a_witness_out + "\n";
    if (tol_opt->count() > 0) text += "tolerance=" + fmt(g.tolerance) + "\n";
    if (!write_file(a_report_out, text)) {
      std::cerr << "calibtool: cannot write " << a_report_out << "\n";
      return CALIB_EPARSE;
    }
    return 0;
  }

  if (recal->parsed()) {
    DatasetGuard ds;
    if (int rc = load_guarded(r_in, g, ds); rc != CALIB_OK) return rc;
    std::vector<std::string> parts{r_params};
    if (r_exact) parts.push_back("exact=1");
    DatasetGuard out;
    StringGuard trace, pipeline;
    if (int rc = calib_recalibrate(ds.ds, r_family.c_str(), r_alpha, r_beta,
                                   join_params(parts).c_str(), &out.ds,
                                   &trace.s, &pipeline.s);
        rc != CALIB_OK)
      return fail_with(rc, "recalibrate");
    if (int rc = calib_dataset_save(out.ds, r_out.c_str()); rc != CALIB_OK)
      return fail_with(rc, "writing " + r_out);
    if (!r_trace.empty() && !write_file(r_trace, trace.s)) {
      std::cerr << "calibtool: cannot write " << r_trace << "\n";
      return CALIB_EPARSE;
    }
    if (!r_pipeline.empty() && !write_file(r_pipeline, pipeline.s)) {
      std::cerr << "calibtool: cannot write " << r_pipeline << "\n";
      return CALIB_EPARSE;
    }
    return 0;
  }

  if (apply->parsed()) {
    DatasetGuard ds;
    if (int rc = load_guarded(ap_in, g, ds); rc != CALIB_OK) return rc;
    std::ifstream in(ap_pipeline);
    if (!in) {
      std::cerr << "calibtool: cannot open " << ap_pipeline << "\n";
      return CALIB_EPARSE;
    }
    std::ostringstream doc;
    doc << in.rdbuf();
    DatasetGuard out;
    if (int rc = calib_apply_pipeline(doc.str().c_str(), ds.ds, &out.ds);
        rc != CALIB_OK)
      return fail_with(rc, "apply");
    if (int rc = calib_dataset_save(out.ds, ap_out.c_str()); rc != CALIB_OK)
      return fail_with(rc, "writing " + ap_out);
    return 0;
  }

  if (lab->parsed()) {
    std::ostringstream params;
    params << "k=" << lb_k << " eps=" << fmt(lb_eps) << " seed=" << g.seed
           << " budget=" << lb_budget;
    StringGuard csv;
    int rc;
    std::string what;
    if (lab_packing->parsed()) {
      what = "lab packing";
      rc = calib_lab_packing(params.str().c_str(), &csv.s);
    } else if (lab_hard->parsed()) {
      what = "lab hardfamily";
      rc = calib_lab_hardfamily(params.str().c_str(), &csv.s);
    } else {
      what = "lab birthday";
      params << " n=" << lb_n << " trials=" << lb_trials
             << " freeze=" << (lb_freeze ? 1 : 0);
      rc = calib_lab_birthday(params.str().c_str(), &csv.s);
    }
    if (rc != CALIB_OK) return fail_with(rc, what);
    if (!write_file(lb_out, csv.s)) {
      std::cerr << "calibtool: cannot write " << lb_out << "\n";
      return CALIB_EPARSE;
    }
    return 0;
  }

  if (synth->parsed()) {
    std::ostringstream params;
    params << "k=" << s_k << " n=" << s_n << " seed=" << g.seed;
    params.precision(17);
    if (s_gen == "calibrated") {
      params << " prior=" << s_prior;
      if (!s_alpha.empty()) params << " alpha=" << s_alpha;
      if (!s_points.empty()) params << " points=" << s_points;
      if (s_stratified) params << " stratified=1";
    } else {
      params << " gamma=" << fmt(s_gamma);
      if (!s_T.empty()) params << " T=" << s_T;
      if (!s_a.empty()) params << " a=" << s_a;
      params << " b=" << fmt(s_b) << " L=" << fmt(s_L);
      if (s_exact) params << " exact=1";
    }
    DatasetGuard ds;
    double certified = 0.0;
    if (int rc =
            calib_synth(s_gen.c_str(), params.str().c_str(), &ds.ds, &certified);
        rc != CALIB_OK)
      return fail_with(rc, "synth " + s_gen);
    if (int rc = calib_dataset_save(ds.ds, s_out.c_str()); rc != CALIB_OK)
      return fail_with(rc, "writing " + s_out);
    std::ostringstream msg;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", certified);
    msg << "generator=" << s_gen << "\nn=" << calib_dataset_size(ds.ds)
        << "\nk=" << calib_dataset_dim(ds.ds) << "\ncertified_alpha=" << buf
        << "\nseed=" << g.seed << "\n";
    std::cout << msg.str();
    return 0;
  }

  return CALIB_EPARSE;
}
