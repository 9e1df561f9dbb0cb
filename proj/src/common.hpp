#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace calib {

enum class ErrorCode {
  NotOnSimplex,
  DimensionMismatch,
  DimensionTooSmall,
  TooLarge,
  TooManySubsets,
  EmptySubset,
  EmptyPacking,
  BadPrior,
  InvalidMagnitude,
  BudgetExceeded,
  DegreeBudgetExceeded,
  InsufficientData,
  NoProgress,
  ParseError,
  SolverFailure,
};

class CalibError : public std::runtime_error {
 public:
  CalibError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw CalibError(code, what);
}

// All randomized operations take an explicit 64-bit seed so that reruns are
// reproducible. Derived streams are produced by mixing, never by reuse.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// SplitMix64 step; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
  // 53-bit mantissa draw, identical across platforms for a given engine.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Flat Dirichlet draw via normalized exponentials.
std::vector<double> dirichlet_flat(int k, Rng& rng);

// Shortest text form that round-trips a finite double exactly.
std::string format_double(double x);

}  // namespace calib
