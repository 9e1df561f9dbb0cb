#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace calib {

SimplexVec::SimplexVec(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) fail(ErrorCode::NotOnSimplex, "empty coordinate vector");
  double sum = 0.0;
  for (double& c : coords_) {
    if (!std::isfinite(c)) fail(ErrorCode::NotOnSimplex, "non-finite coordinate");
    if (c < 0.0) {
      if (c < -kCoordTol) fail(ErrorCode::NotOnSimplex, "negative coordinate");
      c = 0.0;
    }
    sum += c;
  }
  if (std::abs(sum - 1.0) > kSumTol)
    fail(ErrorCode::NotOnSimplex, "coordinates sum to " + format_double(sum));
}

OneHot::OneHot(int label_, int k_) : label(label_), k(k_) {
  if (k < 1 || label < 0 || label >= k)
    fail(ErrorCode::DimensionMismatch, "one-hot label out of range");
}

std::vector<double> OneHot::expand() const {
  std::vector<double> e(k, 0.0);
  e[label] = 1.0;
  return e;
}

double l1_dist(const SimplexVec& a, const SimplexVec& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "l1_dist dims");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double dot(const SimplexVec& a, const SimplexVec& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "dot dims");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

SimplexVec make_simplex(const std::vector<double>& x) { return SimplexVec(x); }

SimplexVec project_to_simplex(const std::vector<double>& x) {
  const int k = static_cast<int>(x.size());
  if (k < 1) fail(ErrorCode::NotOnSimplex, "empty input");
  for (double c : x)
    if (!std::isfinite(c)) fail(ErrorCode::NotOnSimplex, "non-finite input");

  std::vector<double> u(x);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (int j = 0; j < k; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / (j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> p(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = std::max(0.0, x[i] - tau);
    sum += p[i];
  }
  // Renormalize away the last ulps so the result always validates.
  if (sum > 0.0)
    for (int i = 0; i < k; ++i) p[i] /= sum;
  else
    p.assign(k, 1.0 / k);
  return SimplexVec(std::move(p));
}

SimplexVec lift(const SimplexVec& v) {
  if (v.dim() < 2)
    fail(ErrorCode::DimensionTooSmall, "lift needs k >= 2");
  std::vector<double> out(v.coords());
  for (double& c : out) c /= 3.0;
  out[0] += 1.0 / 3.0;
  out[1] += 1.0 / 3.0;
  return SimplexVec(std::move(out));
}

namespace {

bool far_from_vertices(const SimplexVec& v) {
  // ||v - e_i||_1 = 2*(1 - v_i), so the 1/3 margin is v_i <= 5/6 for all i.
  for (int i = 0; i < v.dim(); ++i)
    if (2.0 * (1.0 - v[i]) < 1.0 / 3.0) return false;
  return true;
}

}  // namespace

Packing::Packing(std::vector<SimplexVec> pts, double eps_, int k_)
    : points(std::move(pts)), eps(eps_), k(k_) {
  for (const auto& p : points) {
    if (p.dim() != k) fail(ErrorCode::DimensionMismatch, "packing point dim");
    if (!far_from_vertices(p))
      fail(ErrorCode::NotOnSimplex, "packing point too close to a vertex");
  }
  for (size_t a = 0; a < points.size(); ++a)
    for (size_t b = a + 1; b < points.size(); ++b)
      if (l1_dist(points[a], points[b]) < eps)
        fail(ErrorCode::NotOnSimplex, "packing pair below separation");
}

Packing greedy_packing(int k, double eps, int candidate_budget,
                       std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::DimensionTooSmall, "greedy_packing needs k >= 2");
  if (!(eps > 0.0 && eps < 0.5))
    fail(ErrorCode::InvalidMagnitude, "greedy_packing needs 0 < eps < 1/2");

  Rng rng = make_rng(seed);
  std::vector<SimplexVec> pts;
  long long rejections = 0;
  auto budget = [&]() -> long long {
    if (candidate_budget > 0) return candidate_budget;
    return 10 * static_cast<long long>(pts.size()) + 1000;
  };
  while (rejections < budget()) {
    SimplexVec cand(dirichlet_flat(k, rng));
    bool ok = far_from_vertices(cand);
    for (size_t i = 0; ok && i < pts.size(); ++i)
      ok = l1_dist(cand, pts[i]) >= eps;
    if (ok) {
      pts.push_back(std::move(cand));
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  return Packing(std::move(pts), eps, k);
}

}  // namespace calib
