#include "kernel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace calib {

MultinomialKernel::MultinomialKernel(int d) : degree(d) {
  if (d < 0) fail(ErrorCode::InvalidMagnitude, "kernel degree must be >= 0");
}

double MultinomialKernel::s() const { return std::sqrt(degree + 1.0); }

double MultinomialKernel::eval(const SimplexVec& v, const SimplexVec& u) const {
  if (v.dim() != u.dim())
    fail(ErrorCode::DimensionMismatch, "kernel_eval dims");
  const double x = dot(v, u);
  // Horner form of 1 + x + ... + x^degree.
  double acc = 1.0;
  for (int i = 0; i < degree; ++i) acc = 1.0 + x * acc;
  return acc;
}

long long feature_dim(int k, int degree) {
  long long dim = 0, pw = 1;
  for (int i = 0; i <= degree; ++i) {
    dim += pw;
    if (i < degree) pw *= k;
  }
  return dim;
}

std::vector<double> explicit_feature_map(const MultinomialKernel& kern,
                                         const SimplexVec& v) {
  const int k = v.dim();
  double kd = std::pow(static_cast<double>(k), kern.degree);
  if (kd > 1e6)
    fail(ErrorCode::TooLarge, "explicit feature map guard: k^d > 1e6");

  std::vector<double> psi;
  psi.reserve(static_cast<size_t>(feature_dim(k, kern.degree)));
  // Degree i block is the i-fold tensor power of v in row-major order; it is
  // built from the previous block.
  std::vector<double> block{1.0};
  psi.push_back(1.0);
  for (int i = 1; i <= kern.degree; ++i) {
    std::vector<double> next;
    next.reserve(block.size() * k);
    for (double b : block)
      for (int j = 0; j < k; ++j) next.push_back(b * v[j]);
    psi.insert(psi.end(), next.begin(), next.end());
    block = std::move(next);
  }
  return psi;
}

DualRkhsFunction::DualRkhsFunction(
    MultinomialKernel kern,
    std::shared_ptr<const std::vector<SimplexVec>> anchors_,
    std::vector<double> coeffs_, double scale_)
    : kernel(kern),
      anchors(std::move(anchors_)),
      coeffs(std::move(coeffs_)),
      scale(scale_) {
  if (!anchors || anchors->size() != coeffs.size())
    fail(ErrorCode::DimensionMismatch, "anchor/coefficient length mismatch");
}

double dual_eval(const DualRkhsFunction& f, const SimplexVec& u) {
  double acc = 0.0;
  for (size_t i = 0; i < f.coeffs.size(); ++i)
    acc += f.coeffs[i] * f.kernel.eval((*f.anchors)[i], u);
  return f.scale * acc;
}

double rkhs_norm(const DualRkhsFunction& f) {
  const int n = f.anchor_count();
  if (n > 10000) fail(ErrorCode::TooLarge, "rkhs_norm guard: > 1e4 anchors");
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    quad += f.coeffs[i] * f.coeffs[i] *
            f.kernel.eval((*f.anchors)[i], (*f.anchors)[i]);
    for (int j = i + 1; j < n; ++j)
      quad += 2.0 * f.coeffs[i] * f.coeffs[j] *
              f.kernel.eval((*f.anchors)[i], (*f.anchors)[j]);
  }
  if (quad < 0.0) {
    if (quad < -1e-8)
      fail(ErrorCode::SolverFailure, "negative RKHS quadratic form");
    quad = 0.0;
  }
  return std::abs(f.scale) * std::sqrt(quad);
}

std::vector<double> VectorDualFunction::eval(const SimplexVec& u) const {
  std::vector<double> out(components.size(), 0.0);
  if (components.empty()) return out;
  const auto& anchors = *components[0].anchors;
  const auto& kern = components[0].kernel;
  for (size_t i = 0; i < anchors.size(); ++i) {
    const double kv = kern.eval(anchors[i], u);
    for (size_t c = 0; c < components.size(); ++c)
      out[c] += components[c].coeffs[i] * kv;
  }
  for (size_t c = 0; c < components.size(); ++c) out[c] *= components[c].scale;
  return out;
}

void write_vector_dual(std::ostream& os, const VectorDualFunction& f) {
  if (f.components.empty())
    fail(ErrorCode::SolverFailure, "cannot serialize empty function");
  const auto& anchors = *f.components[0].anchors;
  const int k = anchors.empty() ? 0 : anchors[0].dim();
  os << "degree " << f.components[0].kernel.degree << "\n";
  os << "components " << f.components.size() << "\n";
  os << "anchors " << anchors.size() << " " << k << "\n";
  for (const auto& a : anchors) {
    for (int j = 0; j < a.dim(); ++j)
      os << (j ? " " : "") << format_double(a[j]);
    os << "\n";
  }
  for (const auto& comp : f.components) {
    os << "scale " << format_double(comp.scale) << "\n";
    os << "coeffs";
    for (double c : comp.coeffs) os << " " << format_double(c);
    os << "\n";
  }
}

namespace {

std::string expect_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) fail(ErrorCode::ParseError, std::string("expected ") + what);
  return tok;
}

void expect_keyword(std::istream& is, const std::string& kw) {
  if (expect_token(is, kw.c_str()) != kw)
    fail(ErrorCode::ParseError, "expected keyword '" + kw + "'");
}

double read_double(std::istream& is) {
  double x;
  if (!(is >> x)) fail(ErrorCode::ParseError, "expected a real number");
  if (!std::isfinite(x)) fail(ErrorCode::ParseError, "non-finite value");
  return x;
}

long read_count(std::istream& is) {
  long n;
  if (!(is >> n) || n < 0) fail(ErrorCode::ParseError, "expected a count");
  return n;
}

}  // namespace

VectorDualFunction read_vector_dual(std::istream& is) {
  expect_keyword(is, "degree");
  const int degree = static_cast<int>(read_count(is));
  expect_keyword(is, "components");
  const long ncomp = read_count(is);
  expect_keyword(is, "anchors");
  const long nanch = read_count(is);
  const long k = read_count(is);
  if (ncomp < 1 || k < 1) fail(ErrorCode::ParseError, "bad witness header");

  auto anchors = std::make_shared<std::vector<SimplexVec>>();
  anchors->reserve(nanch);
  for (long i = 0; i < nanch; ++i) {
    std::vector<double> row(k);
    for (long j = 0; j < k; ++j) row[j] = read_double(is);
    anchors->push_back(SimplexVec(std::move(row)));
  }

  VectorDualFunction f;
  MultinomialKernel kern(degree);
  for (long c = 0; c < ncomp; ++c) {
    expect_keyword(is, "scale");
    const double scale = read_double(is);
    expect_keyword(is, "coeffs");
    std::vector<double> coeffs(nanch);
    for (long i = 0; i < nanch; ++i) coeffs[i] = read_double(is);
    f.components.emplace_back(kern, anchors, std::move(coeffs), scale);
  }
  return f;
}

}  // namespace calib
