// Counter-based deterministic random number generation.
//
// Scheme: a 64-bit SplitMix64 finalizer applied to (key + counter*GOLDEN),
// where the per-stream key is mix(seed ^ mix(stream)).  Every draw is a pure
// function of (seed, stream, counter), so channel matrices, weights, and
// restart initializations can be generated in any order — or in parallel —
// and still be bit-identical across runs and platforms.
//
// Doubles are built from the top 53 bits; standard normals use Box–Muller on
// two uniforms, yielding two N(0, 1/2) draws per complex matrix entry so the
// entry has unit variance.

#pragma once

#include <cstdint>
#include <cmath>
#include <complex>

#include "netopt/linalg.hpp"

namespace netopt {

namespace rng_detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: bijective 64-bit mix with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace rng_detail

/// A named, counter-addressable random stream.
class CounterRng {
 public:
  /// Streams are identified by (seed, stream tag); see stream tag helpers in
  /// scenario.hpp for the library-wide assignment.
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(rng_detail::mix64(seed ^ rng_detail::mix64(stream))) {}

  /// Raw 64-bit word at a given counter.
  std::uint64_t bits(std::uint64_t counter) const {
    return rng_detail::mix64(key_ + (counter + 1) * rng_detail::kGolden);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1] — safe as a logarithm argument.
  double uniform_pos(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  /// Pair of independent N(0,1) draws via Box–Muller from counters
  /// (2*index, 2*index+1).
  void normal_pair(std::uint64_t index, double& z0, double& z1) const {
    const double u1 = uniform_pos(2 * index);
    const double u2 = uniform(2 * index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  /// Unit-variance complex Gaussian entry: two N(0, 1/2) components.
  cxd complex_normal(std::uint64_t index) const {
    double z0, z1;
    normal_pair(index, z0, z1);
    return cxd(z0 * M_SQRT1_2, z1 * M_SQRT1_2);
  }

  /// Matrix of i.i.d. unit-variance complex Gaussians, entry (i,j) drawn at
  /// counter index i*cols + j (row-major, order-independent).
  CMat complex_gaussian_matrix(int rows, int cols) const {
    CMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        m(i, j) = complex_normal(static_cast<std::uint64_t>(i) * cols + j);
    return m;
  }

 private:
  std::uint64_t key_;
};

/// Random Hermitian PSD matrix A A^H scaled to a given trace (used for random
/// initializations and test fixtures).  Deterministic in (rng, base counter).
inline CMat random_psd(const CounterRng& rng, int n, double trace,
                       std::uint64_t base_index = 0) {
  if (n == 0) return CMat(0, 0);
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = rng.complex_normal(base_index + static_cast<std::uint64_t>(i) * n + j);
  CMat m = a * a.adjoint();
  double t = m.trace().real();
  if (t > 0.0 && trace > 0.0) m *= trace / t;
  return hermitize(m);
}

}  // namespace netopt
