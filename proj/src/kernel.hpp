#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "common.hpp"
#include "simplex.hpp"

namespace calib {

// Degree-d multinomial kernel ker_d(v,u) = sum_{i=0}^d (v.u)^i. On the
// simplex v.v <= 1, so ker_d(v,v) <= d+1 and the feature norm is bounded by
// s = sqrt(d+1).
struct MultinomialKernel {
  int degree = 0;

  explicit MultinomialKernel(int d);
  double s() const;  // sqrt(degree + 1)
  double eval(const SimplexVec& v, const SimplexVec& u) const;
};

// Dimension of the explicit feature map: sum_{i=0}^d k^i.
long long feature_dim(int k, int degree);

// Explicit feature vector psi(v), one coordinate per tuple in
// [k]^0 u ... u [k]^d (degree-major, tuples in row-major order). Guarded to
// k^degree <= 1e6; intended for small oracle checks.
std::vector<double> explicit_feature_map(const MultinomialKernel& kern,
                                         const SimplexVec& v);

// w(u) = scale * sum_i coeffs[i] * ker(anchors[i], u). Anchors are shared by
// reference so the k components of a vector-valued function reuse them.
struct DualRkhsFunction {
  MultinomialKernel kernel{0};
  std::shared_ptr<const std::vector<SimplexVec>> anchors;
  std::vector<double> coeffs;
  double scale = 1.0;

  DualRkhsFunction() = default;
  DualRkhsFunction(MultinomialKernel kern,
                   std::shared_ptr<const std::vector<SimplexVec>> anchors_,
                   std::vector<double> coeffs_, double scale_);

  int anchor_count() const {
    return anchors ? static_cast<int>(anchors->size()) : 0;
  }
};

double dual_eval(const DualRkhsFunction& f, const SimplexVec& u);

// scale * sqrt(c^T K c); quadratic forms in [-1e-8, 0) from round-off are
// clamped to 0, anything more negative is a solver failure.
double rkhs_norm(const DualRkhsFunction& f);

// k components over one shared kernel and anchor list.
struct VectorDualFunction {
  std::vector<DualRkhsFunction> components;

  int dim() const { return static_cast<int>(components.size()); }
  // Evaluates all components with one kernel pass over the anchors.
  std::vector<double> eval(const SimplexVec& u) const;
};

// Structured text round trip; doubles are written with 17 significant digits
// so finite values survive bit-exactly.
void write_vector_dual(std::ostream& os, const VectorDualFunction& f);
VectorDualFunction read_vector_dual(std::istream& is);

}  // namespace calib
