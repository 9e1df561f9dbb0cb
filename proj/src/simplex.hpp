#pragma once

#include <vector>

#include "common.hpp"

namespace calib {

// Validation tolerances for simplex membership. Coordinates may undershoot 0
// by at most kCoordTol (clamped to 0); the coordinate sum may deviate from 1
// by at most kSumTol.
inline constexpr double kCoordTol = 1e-12;
inline constexpr double kSumTol = 1e-9;

// A point of the probability simplex. Construction validates and clamps;
// instances are immutable afterwards.
class SimplexVec {
 public:
  explicit SimplexVec(std::vector<double> coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  bool operator==(const SimplexVec& other) const {
    return coords_ == other.coords_;
  }

 private:
  std::vector<double> coords_;
};

// One-hot outcome e_label in {0,1}^k.
struct OneHot {
  int label = 0;
  int k = 0;

  OneHot() = default;
  OneHot(int label_, int k_);
  std::vector<double> expand() const;
  double coord(int i) const { return i == label ? 1.0 : 0.0; }
};

double l1_dist(const SimplexVec& a, const SimplexVec& b);
double dot(const SimplexVec& a, const SimplexVec& b);

// Validated construction; throws NotOnSimplex when the input is off the
// simplex beyond the tolerances above.
SimplexVec make_simplex(const std::vector<double>& x);

// Euclidean projection onto the simplex (sort and threshold).
SimplexVec project_to_simplex(const std::vector<double>& x);

// lift(v) = v/3 + e1/3 + e2/3. Affine embedding away from the first two
// vertices; requires k >= 2.
SimplexVec lift(const SimplexVec& v);

// A set of simplex points with pairwise l1 separation eps that also keep l1
// distance >= 1/3 from every vertex. Construction re-checks both invariants.
struct Packing {
  std::vector<SimplexVec> points;
  double eps = 0.0;
  int k = 0;

  Packing(std::vector<SimplexVec> pts, double eps_, int k_);
  int size() const { return static_cast<int>(points.size()); }
};

// Randomized greedy packing: admit flat-Dirichlet candidates until
// `candidate_budget` consecutive rejections (0 selects the adaptive default
// of 10*|packing| + 1000). May return an empty packing when eps is close to
// 1/2 and k is tiny; that is a legal outcome, not an error.
Packing greedy_packing(int k, double eps, int candidate_budget,
                       std::uint64_t seed);

}  // namespace calib
