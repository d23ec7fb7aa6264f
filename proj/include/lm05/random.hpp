#pragma once

#include <cstdint>
#include <random>

namespace lm05 {

// Deterministic random stream. mt19937_64 is fully specified by the C++
// standard; the samplers below are hand-rolled because std::*_distribution
// algorithms are implementation-defined and sessions must be bit-reproducible
// from a seed across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, bound) for bound a power of two <= 2^53
  // (exact: 2^53 is divisible by bound).
  std::uint32_t uniform_pow2(std::uint32_t bound) {
    return static_cast<std::uint32_t>(next_double() * bound);
  }

  // Poisson(mu) by inversion (sequential search). Fine for the mean photon
  // numbers used here (mu = O(1)).
  int poisson(double mu);

  // Binomial(n, p) as n independent trials; n is a photon count, so small.
  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  // Derived seed for parallel chunk number `stream` (SplitMix64 mix).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lm05
