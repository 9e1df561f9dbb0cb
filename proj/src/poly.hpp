#pragma once

#include <functional>
#include <vector>

#include "common.hpp"

namespace calib {

// Monomial-basis polynomial p(t) = sum_i coeffs[i] * t^i.
struct UnivariatePoly {
  std::vector<double> coeffs;  // length degree + 1

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double eval(double t) const;
};

// Measured guarantee attached to every emitted approximant: sup error and
// range check on a 2001-point grid of [-1,1].
struct ApproxCertificate {
  double target_eps = 0.0;
  double measured_sup_error = 0.0;
  bool range_ok = false;
  int degree = 0;
};

struct CertifiedPoly {
  UnivariatePoly poly;
  ApproxCertificate cert;
};

// Uniform approximation of a 1-Lipschitz phi:[-1,1]->[-1,1] to accuracy eps.
// Chebyshev interpolation with degree doubling until the grid error reaches
// eps/2, then rescaled by 1/(1+eps/2) to pin the range inside [-1,1].
// Throws DegreeBudgetExceeded past degree 64/eps (non-Lipschitz input).
CertifiedPoly jackson_approx(const std::function<double(double)>& phi,
                             double eps);

// Same construction for t -> tanh(L*t + b); degree budget C*L*log(L/eps).
CertifiedPoly tanh_approx(double L, double b, double eps);

double coeff_abs_sum(const UnivariatePoly& p);

// Upper bound on the Gamma(d) norm of v -> p(a.v):
// sqrt(sum_i eta_i^2 ||a||_2^{2i}).
double composed_norm_bound(const UnivariatePoly& p,
                           const std::vector<double>& a);

// The looser closed form max(4, 4*||a||_2)^degree.
double composed_norm_bound_loose(const UnivariatePoly& p,
                                 const std::vector<double>& a);

}  // namespace calib
