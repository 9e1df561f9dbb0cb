#include "recal.hpp"

#include <cmath>
#include <sstream>

namespace calib {

double squared_loss(const EmpiricalDistribution& emp) {
  double acc = 0.0;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    double d2 = 0.0;
    for (int j = 0; j < emp.dim(); ++j) {
      const double d = s.v[j] - s.y.coord(j);
      d2 += d * d;
    }
    acc += emp.weight(i) * d2;
  }
  return acc;
}

namespace {

EmpiricalDistribution with_predictions(const EmpiricalDistribution& emp,
                                       const std::vector<SimplexVec>& preds) {
  std::vector<Sample> samples;
  samples.reserve(emp.size());
  for (int i = 0; i < emp.size(); ++i)
    samples.push_back(Sample{preds[i], emp.sample(i).y});
  if (emp.has_weights()) {
    std::vector<double> w(emp.size());
    for (int i = 0; i < emp.size(); ++i) w[i] = emp.weight(i);
    return EmpiricalDistribution(std::move(samples), std::move(w));
  }
  return EmpiricalDistribution(std::move(samples));
}

double loss_at(const EmpiricalDistribution& emp,
               const std::vector<SimplexVec>& preds) {
  double acc = 0.0;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    double d2 = 0.0;
    for (int j = 0; j < emp.dim(); ++j) {
      const double d = preds[i][j] - s.y.coord(j);
      d2 += d * d;
    }
    acc += emp.weight(i) * d2;
  }
  return acc;
}

}  // namespace

RecalResult recalibrate(const EmpiricalDistribution& emp,
                        const Auditor& auditor, double beta_stop,
                        long long max_iters) {
  if (!(beta_stop > 0.0))
    fail(ErrorCode::InvalidMagnitude, "recalibrate needs beta_stop > 0");
  const int k = emp.dim();
  if (max_iters <= 0)
    max_iters = static_cast<long long>(
        std::ceil(16.0 * k / (beta_stop * beta_stop)));

  std::vector<SimplexVec> preds;
  preds.reserve(emp.size());
  for (int i = 0; i < emp.size(); ++i) preds.push_back(emp.sample(i).v);

  RecalResult result{emp, {}};
  result.trace.initial_loss = squared_loss(emp);
  double cur_loss = result.trace.initial_loss;

  std::uint64_t round_seed = 1;
  long long iters = 0;
  while (iters < max_iters) {
    EmpiricalDistribution cur = with_predictions(emp, preds);
    Witness w = auditor(cur, round_seed);
    result.trace.final_correlation = w.achieved_correlation;
    if (w.achieved_correlation < beta_stop) {
      // Silence: confirm once with an independent seed before stopping.
      Witness recheck = auditor(cur, mix_seed(round_seed, 0xACCE55));
      result.trace.final_correlation = recheck.achieved_correlation;
      if (recheck.achieved_correlation < beta_stop) {
        result.trace.silenced = true;
        result.emp = std::move(cur);
        return result;
      }
      w = std::move(recheck);
    }
    ++round_seed;

    std::vector<std::vector<double>> wv(emp.size());
    for (int i = 0; i < emp.size(); ++i) wv[i] = w.function.eval(preds[i]);

    double best_loss = cur_loss;
    double best_eta = 0.0;
    std::vector<SimplexVec> best_preds;
    for (int p = 0; p <= 20; ++p) {
      const double eta = std::ldexp(1.0, -p);
      std::vector<SimplexVec> cand;
      cand.reserve(emp.size());
      for (int i = 0; i < emp.size(); ++i) {
        std::vector<double> moved(preds[i].coords());
        for (int j = 0; j < k; ++j) moved[j] += eta * wv[i][j];
        cand.push_back(project_to_simplex(moved));
      }
      const double l = loss_at(emp, cand);
      if (l < best_loss) {
        best_loss = l;
        best_eta = eta;
        best_preds = std::move(cand);
      }
    }
    if (best_eta == 0.0) {
      if (w.achieved_correlation > 1e-9)
        fail(ErrorCode::NoProgress,
             "live witness (correlation " +
                 format_double(w.achieved_correlation) +
                 ") but no step size decreases the loss");
      break;
    }

    preds = std::move(best_preds);
    cur_loss = best_loss;
    result.trace.iterations.push_back(
        RecalIteration{cur_loss, w.achieved_correlation, best_eta});
    result.trace.pipeline.emplace_back(w.function, best_eta);
    ++iters;
  }

  result.emp = with_predictions(emp, preds);
  Witness final_w = auditor(result.emp, mix_seed(round_seed, 0xACCE55));
  result.trace.final_correlation = final_w.achieved_correlation;
  result.trace.silenced = final_w.achieved_correlation < beta_stop;
  return result;
}

SimplexVec apply_pipeline(
    const std::vector<std::pair<VectorDualFunction, double>>& pipeline,
    const SimplexVec& v) {
  SimplexVec cur = v;
  for (const auto& [fn, eta] : pipeline) {
    const std::vector<double> wv = fn.eval(cur);
    std::vector<double> moved(cur.coords());
    for (size_t j = 0; j < moved.size(); ++j) moved[j] += eta * wv[j];
    cur = project_to_simplex(moved);
  }
  return cur;
}

std::string pipeline_to_text(const RecalibrationTrace& trace) {
  std::ostringstream os;
  os << "calib-pipeline v1\n";
  os << "steps " << trace.pipeline.size() << "\n";
  for (const auto& [fn, eta] : trace.pipeline) {
    os << "step_size " << format_double(eta) << "\n";
    write_vector_dual(os, fn);
  }
  return os.str();
}

std::vector<std::pair<VectorDualFunction, double>> pipeline_from_text(
    const std::string& text) {
  std::istringstream is(text);
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "calib-pipeline" || version != "v1")
    fail(ErrorCode::ParseError, "not a pipeline document");
  std::string key;
  long steps = 0;
  if (!(is >> key >> steps) || key != "steps" || steps < 0)
    fail(ErrorCode::ParseError, "bad step count");
  std::vector<std::pair<VectorDualFunction, double>> out;
  for (long i = 0; i < steps; ++i) {
    double eta;
    if (!(is >> key >> eta) || key != "step_size")
      fail(ErrorCode::ParseError, "expected step_size");
    out.emplace_back(read_vector_dual(is), eta);
  }
  return out;
}

}  // namespace calib
