#include "lm05/random.hpp"

#include <cmath>
#include <stdexcept>

namespace lm05 {

int RandomStream::poisson(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("poisson: mu must be positive");
  const double u = next_double();
  double p = std::exp(-mu);
  double cum = p;
  int k = 0;
  while (u >= cum) {
    ++k;
    p *= mu / k;
    if (p <= 0.0) break;  // tail underflow
    cum += p;
  }
  return k;
}

std::uint64_t RandomStream::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace lm05
