#include "common.hpp"

#include <cmath>
#include <cstdio>

namespace calib {

std::vector<double> dirichlet_flat(int k, Rng& rng) {
  std::vector<double> x(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    double u = uniform01(rng);
    if (u <= 0.0) u = 0x1.0p-53;
    x[i] = -std::log(u);
    sum += x[i];
  }
  for (int i = 0; i < k; ++i) x[i] /= sum;
  return x;
}

std::string format_double(double x) {
  char buf[40];
  // 17 significant digits round-trip any finite double.
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace calib
