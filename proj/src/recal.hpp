#pragma once

#include "audit.hpp"
#include "dataset.hpp"

namespace calib {

// sum_i weight_i ||v_i - y_i||_2^2; always in [0, 4].
double squared_loss(const EmpiricalDistribution& emp);

struct RecalIteration {
  double squared_loss = 0.0;         // after the accepted step
  double witness_correlation = 0.0;  // that triggered the step
  double step_size = 0.0;
};

struct RecalibrationTrace {
  double initial_loss = 0.0;
  std::vector<RecalIteration> iterations;
  // The composed post-processing map: apply the steps in order,
  // v <- project_to_simplex(v + eta * w(v)).
  std::vector<std::pair<VectorDualFunction, double>> pipeline;
  bool silenced = false;  // auditor fell below beta_stop (and the recheck agreed)
  double final_correlation = 0.0;
};

struct RecalResult {
  EmpiricalDistribution emp;
  RecalibrationTrace trace;
};

// Witness-driven projected ascent. Each round asks the auditor for a
// witness; while its correlation reaches beta_stop, every prediction moves
// by project_to_simplex(v + eta * w(v)) with eta chosen over the grid
// {1, 1/2, ..., 2^-20} to maximize the squared-loss decrease. A round that
// cannot decrease the loss with a live witness throws NoProgress. Silence
// is re-checked once with an independent auditor seed. max_iters <= 0
// selects ceil(16 k / beta_stop^2).
RecalResult recalibrate(const EmpiricalDistribution& emp,
                        const Auditor& auditor, double beta_stop,
                        long long max_iters = 0);

// Replays the stored pipeline on a new prediction.
SimplexVec apply_pipeline(
    const std::vector<std::pair<VectorDualFunction, double>>& pipeline,
    const SimplexVec& v);

// Pipeline document: ordered (step size, witness function) records.
std::string pipeline_to_text(const RecalibrationTrace& trace);
std::vector<std::pair<VectorDualFunction, double>> pipeline_from_text(
    const std::string& text);

}  // namespace calib
