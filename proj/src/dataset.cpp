#include "dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace calib {

namespace {

void validate(const std::vector<Sample>& samples,
              const std::optional<std::vector<double>>& weights) {
  if (samples.empty())
    fail(ErrorCode::ParseError, "empty empirical distribution");
  const int k = samples[0].v.dim();
  for (const auto& s : samples) {
    if (s.v.dim() != k || s.y.k != k)
      fail(ErrorCode::DimensionMismatch, "mixed dimensions in dataset");
  }
  if (weights) {
    if (weights->size() != samples.size())
      fail(ErrorCode::DimensionMismatch, "weight count mismatch");
    double sum = 0.0;
    for (double w : *weights) {
      if (!std::isfinite(w) || w < 0.0)
        fail(ErrorCode::ParseError, "weights must be finite and nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorCode::ParseError, "weights sum to " + format_double(sum));
  }
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<Sample> samples)
    : samples_(std::move(samples)) {
  validate(samples_, weights_);
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<Sample> samples,
                                             std::vector<double> weights)
    : samples_(std::move(samples)), weights_(std::move(weights)) {
  validate(samples_, weights_);
}

EmpiricalDistribution parse_dataset(const std::string& text) {
  std::vector<Sample> samples;
  std::vector<double> weights;
  bool any_weight = false;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("v") || !rec.contains("y"))
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": need fields v and y");
    std::vector<double> v;
    for (const auto& x : rec.at("v")) {
      if (!x.is_number())
        fail(ErrorCode::ParseError,
             "line " + std::to_string(lineno) + ": v must be numeric");
      const double d = x.get<double>();
      if (!std::isfinite(d))
        fail(ErrorCode::ParseError,
             "line " + std::to_string(lineno) + ": non-finite coordinate");
      v.push_back(d);
    }
    const int k = static_cast<int>(v.size());
    if (!rec.at("y").is_number_integer())
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": y must be an integer");
    const int y = rec.at("y").get<int>();
    if (y < 0 || y >= k)
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": label out of range");
    try {
      samples.push_back(Sample{make_simplex(v), OneHot(y, k)});
    } catch (const CalibError& e) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (rec.contains("w")) {
      const double w = rec.at("w").get<double>();
      if (!std::isfinite(w))
        fail(ErrorCode::ParseError,
             "line " + std::to_string(lineno) + ": non-finite weight");
      weights.push_back(w);
      any_weight = true;
    } else if (any_weight) {
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": missing weight");
    }
  }
  if (samples.empty()) fail(ErrorCode::ParseError, "dataset has no samples");
  if (any_weight) {
    if (weights.size() != samples.size())
      fail(ErrorCode::ParseError, "weights present on only some records");
    return EmpiricalDistribution(std::move(samples), std::move(weights));
  }
  return EmpiricalDistribution(std::move(samples));
}

EmpiricalDistribution load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

std::string dataset_to_text(const EmpiricalDistribution& emp) {
  std::ostringstream os;
  for (int i = 0; i < emp.size(); ++i) {
    const Sample& s = emp.sample(i);
    os << "{\"v\":[";
    for (int j = 0; j < s.v.dim(); ++j)
      os << (j ? "," : "") << format_double(s.v[j]);
    os << "],\"y\":" << s.y.label;
    if (emp.has_weights()) os << ",\"w\":" << format_double(emp.weight(i));
    os << "}\n";
  }
  return os.str();
}

void save_dataset(const std::string& path, const EmpiricalDistribution& emp) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path);
  out << dataset_to_text(emp);
}

std::string CalibrationReport::to_kv_text() const {
  std::ostringstream os;
  os << "measure=" << measure << "\n";
  os << "value=" << format_double(value) << "\n";
  for (const auto& [key, val] : metadata) os << key << "=" << val << "\n";
  return os.str();
}

}  // namespace calib
