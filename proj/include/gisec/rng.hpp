#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gisec {

/// SplitMix64 stream.  Used instead of std:: engines so that sampled images
/// are bit-identical across platforms and standard-library versions.
struct SplitMix64 {
  std::uint64_t state{0};

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return double(next() >> 11) * 0x1.0p-53; }
};

/// Avalanche mix of a single word (the SplitMix64 output function).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for (seed, index) pairs, e.g. one stream per pixel.
/// The derivation is order-free: stream k can be created without generating
/// streams 0..k-1.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64{mix64(seed ^ mix64(index + 1))};
}

/// Portable Poisson sampler (Knuth product method, with additive splitting of
/// large means so the running product never underflows).  std::poisson_distribution
/// is implementation-defined and would break cross-platform determinism.
inline long long poisson_sample(SplitMix64 &rng, double mean) {
  if (!(mean >= 0.0))
    throw std::invalid_argument("Poisson mean must be nonnegative");
  long long total = 0;
  while (mean > 50.0) {
    // Poisson(m) = Poisson(50) + Poisson(m-50) for independent summands.
    double limit = 1.928749847963917820563444e-22; // exp(-50)
    double prod = rng.next_double();
    while (prod > limit) {
      ++total;
      prod *= rng.next_double();
    }
    mean -= 50.0;
  }
  if (mean == 0.0)
    return total;
  const double limit = std::exp(-mean);
  double prod = rng.next_double();
  while (prod > limit) {
    ++total;
    prod *= rng.next_double();
  }
  return total;
}

} // namespace gisec
