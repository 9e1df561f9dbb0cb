#include "poly.hpp"

#include <cmath>

namespace calib {

namespace {

constexpr int kCertGrid = 2001;

double grid_point(int i) { return -1.0 + 2.0 * i / (kCertGrid - 1); }

// Chebyshev interpolation at the degree+1 first-kind nodes, returned in the
// monomial basis. Nodes are mirrored exactly so odd/even symmetry of the
// target survives in the coefficients.
UnivariatePoly chebyshev_interpolant(const std::function<double(double)>& f,
                                     int degree) {
  const int n = degree + 1;
  std::vector<double> nodes(n);
  for (int j = 0; j < n / 2; ++j) {
    const double x = std::cos(M_PI * (j + 0.5) / n);
    nodes[j] = x;
    nodes[n - 1 - j] = -x;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;

  std::vector<double> fx(n);
  for (int j = 0; j < n; ++j) fx[j] = f(nodes[j]);

  std::vector<double> cheb(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += fx[j] * std::cos(M_PI * m * (j + 0.5) / n);
    cheb[m] = acc * (m == 0 ? 1.0 : 2.0) / n;
  }

  // T_m recurrence in monomial coordinates.
  std::vector<double> mono(n, 0.0);
  std::vector<double> tprev{1.0}, tcur{0.0, 1.0};
  mono[0] += cheb[0];
  if (n > 1)
    for (size_t i = 0; i < tcur.size(); ++i) mono[i] += cheb[1] * tcur[i];
  for (int m = 2; m < n; ++m) {
    std::vector<double> tnext(m + 1, 0.0);
    for (size_t i = 0; i < tcur.size(); ++i) tnext[i + 1] += 2.0 * tcur[i];
    for (size_t i = 0; i < tprev.size(); ++i) tnext[i] -= tprev[i];
    for (size_t i = 0; i < tnext.size(); ++i) mono[i] += cheb[m] * tnext[i];
    tprev = std::move(tcur);
    tcur = std::move(tnext);
  }
  return UnivariatePoly{std::move(mono)};
}

double grid_sup_error(const UnivariatePoly& p,
                      const std::function<double(double)>& f) {
  double sup = 0.0;
  for (int i = 0; i < kCertGrid; ++i) {
    const double t = grid_point(i);
    sup = std::max(sup, std::abs(p.eval(t) - f(t)));
  }
  return sup;
}

bool grid_range_ok(const UnivariatePoly& p) {
  for (int i = 0; i < kCertGrid; ++i)
    if (std::abs(p.eval(grid_point(i))) > 1.0 + 1e-12) return false;
  return true;
}

// Shared doubling loop: interpolate at increasing degree until the grid
// error reaches eps/2, then rescale so the range certificate holds.
CertifiedPoly certify(const std::function<double(double)>& f, double eps,
                      int degree_budget, const char* what) {
  int d = 1;
  while (true) {
    UnivariatePoly p = chebyshev_interpolant(f, d);
    if (grid_sup_error(p, f) <= eps / 2.0) {
      for (double& c : p.coeffs) c /= 1.0 + eps / 2.0;
      ApproxCertificate cert;
      cert.target_eps = eps;
      cert.degree = p.degree();
      cert.measured_sup_error = grid_sup_error(p, f);
      cert.range_ok = grid_range_ok(p);
      if (cert.measured_sup_error > eps || !cert.range_ok)
        fail(ErrorCode::DegreeBudgetExceeded,
             std::string(what) + ": certificate failed after rescaling");
      return CertifiedPoly{std::move(p), cert};
    }
    if (d >= degree_budget)
      fail(ErrorCode::DegreeBudgetExceeded,
           std::string(what) + ": degree budget " +
               std::to_string(degree_budget) + " exceeded");
    d = std::min(2 * d, degree_budget);
  }
}

}  // namespace

double UnivariatePoly::eval(double t) const {
  double acc = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
  return acc;
}

CertifiedPoly jackson_approx(const std::function<double(double)>& phi,
                             double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    fail(ErrorCode::InvalidMagnitude, "jackson_approx needs 0 < eps < 1/2");
  const int budget = static_cast<int>(std::ceil(64.0 / eps));
  return certify(phi, eps, budget, "jackson_approx");
}

CertifiedPoly tanh_approx(double L, double b, double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    fail(ErrorCode::InvalidMagnitude, "tanh_approx needs 0 < eps < 1/2");
  if (L < 1.0) fail(ErrorCode::InvalidMagnitude, "tanh_approx needs L >= 1");
  const int budget =
      static_cast<int>(std::ceil(8.0 * L * std::log(4.0 * L / eps))) + 8;
  auto f = [L, b](double t) { return std::tanh(L * t + b); };
  return certify(f, eps, budget, "tanh_approx");
}

double coeff_abs_sum(const UnivariatePoly& p) {
  double s = 0.0;
  for (double c : p.coeffs) s += std::abs(c);
  return s;
}

double composed_norm_bound(const UnivariatePoly& p,
                           const std::vector<double>& a) {
  double a2 = 0.0;
  for (double x : a) a2 += x * x;
  double sum = 0.0, pw = 1.0;
  for (double c : p.coeffs) {
    sum += c * c * pw;
    pw *= a2;
  }
  return std::sqrt(sum);
}

double composed_norm_bound_loose(const UnivariatePoly& p,
                                 const std::vector<double>& a) {
  double a2 = 0.0;
  for (double x : a) a2 += x * x;
  const double base = std::max(4.0, 4.0 * std::sqrt(a2));
  return std::pow(base, p.degree());
}

}  // namespace calib
