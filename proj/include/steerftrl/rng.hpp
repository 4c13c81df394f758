#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "steerftrl/common.hpp"

namespace steerftrl {

// Deterministic random source. All variates are derived from raw
// mt19937_64 output with fixed arithmetic, so a seed pins every byte of
// downstream artifacts regardless of standard-library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from a base seed and stream indices;
  // used so parallel workers draw reproducible per-item randomness.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = seed;
    h ^= 0x9e3779b97f4a7c15ULL + a + (h << 6) + (h >> 2);
    h ^= 0xbf58476d1ce4e5b9ULL + b + (h << 6) + (h >> 2);
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return Rng(h);
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard exponential via inversion; also a Gamma(1) draw, which is
  // the building block for Dirichlet(1) strategy sampling.
  double exponential() { return -std::log1p(-uniform()); }

  // Dirichlet(1) sample: a uniformly distributed simplex point.
  Vector simplex_point(int n) {
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = exponential();
    double s = g.sum();
    if (s <= 0) return Vector::Constant(n, 1.0 / n);
    return g / s;
  }

  // Uniform simplex point whose smallest coordinate exceeds min_coord,
  // redrawn up to max_retries times.
  Vector interior_simplex_point(int n, double min_coord, int max_retries = 10) {
    for (int r = 0; r < max_retries; ++r) {
      Vector x = simplex_point(n);
      if (x.minCoeff() > min_coord) return x;
    }
    throw DomainError("failed to draw an interior simplex point after retries");
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace steerftrl
