#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "simplex.hpp"

namespace calib {

struct Sample {
  SimplexVec v;
  OneHot y;
};

// The universal input: (prediction, one-hot outcome) pairs with optional
// nonnegative weights summing to 1 (uniform when absent).
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<Sample> samples);
  EmpiricalDistribution(std::vector<Sample> samples,
                        std::vector<double> weights);

  int size() const { return static_cast<int>(samples_.size()); }
  int dim() const { return samples_[0].v.dim(); }
  const Sample& sample(int i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  double weight(int i) const {
    return weights_ ? (*weights_)[i] : 1.0 / size();
  }
  bool has_weights() const { return weights_.has_value(); }

 private:
  std::vector<Sample> samples_;
  std::optional<std::vector<double>> weights_;
};

// One JSON object per line: {"v":[...],"y":<int>} with optional "w".
EmpiricalDistribution load_dataset(const std::string& path);
EmpiricalDistribution parse_dataset(const std::string& text);
void save_dataset(const std::string& path, const EmpiricalDistribution& emp);
std::string dataset_to_text(const EmpiricalDistribution& emp);

// Flat result record shared by all measures and the CLI.
struct CalibrationReport {
  std::string measure;
  double value = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_meta(const std::string& key, const std::string& val) {
    metadata.emplace_back(key, val);
  }
  void add_meta(const std::string& key, double val) {
    metadata.emplace_back(key, format_double(val));
  }
  void add_meta(const std::string& key, long long val) {
    metadata.emplace_back(key, std::to_string(val));
  }

  // key=value lines, one per entry, measure and value first.
  std::string to_kv_text() const;
};

}  // namespace calib
