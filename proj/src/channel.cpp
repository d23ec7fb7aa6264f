#include "lm05/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace lm05 {

void LinkParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("link: mu must be positive");
  if (alpha < 0.0) throw std::invalid_argument("link: alpha must be >= 0");
  if (length_km < 0.0) throw std::invalid_argument("link: length must be >= 0");
  if (gamma_c_db < 0.0) throw std::invalid_argument("link: gamma_c must be >= 0");
  if (eta_b < 0.0 || eta_b > 1.0)
    throw std::invalid_argument("link: eta_b must lie in [0,1]");
  if (d_b < 0.0 || d_b >= 1.0)
    throw std::invalid_argument("link: d_b must lie in [0,1)");
  if (cm_probability < 0.0 || cm_probability > 1.0)
    throw std::invalid_argument("link: cm_probability must lie in [0,1]");
  if (!(rep_rate_hz > 0.0))
    throw std::invalid_argument("link: rep_rate must be positive");
}

double poisson_pmf(int n, double mu) {
  if (n < 0) throw std::domain_error("poisson_pmf: n must be >= 0");
  if (!(mu > 0.0)) throw std::domain_error("poisson_pmf: mu must be positive");
  // Upward recurrence keeps the evaluation exact-ish and monotone; n stays
  // small for the photon numbers in play.
  double p = std::exp(-mu);
  for (int k = 1; k <= n; ++k) p *= mu / k;
  return p;
}

int sample_photon_number(double mu, RandomStream& rng) {
  return rng.poisson(mu);
}

double transmissivity(double alpha_db_per_km, double length_km,
                      double gamma_c_db) {
  if (alpha_db_per_km < 0.0 || length_km < 0.0 || gamma_c_db < 0.0)
    throw std::domain_error("transmissivity: inputs must be >= 0");
  return std::pow(10.0, -(alpha_db_per_km * length_km + gamma_c_db) / 10.0);
}

Pulse thin(const Pulse& pulse, double t, RandomStream& rng) {
  return Pulse{rng.binomial(pulse.n, t), pulse.state};
}

ClickRecord detect(const Pulse& pulse, Basis analysis_basis, double eta_b,
                   double d_b, RandomStream& rng) {
  ClickRecord rec;
  for (int i = 0; i < pulse.n; ++i) {
    if (!rng.bernoulli(eta_b)) continue;
    const PolarizationState outcome = measure(pulse.state, analysis_basis, rng);
    if (bit_of(outcome) == 0)
      rec.click0 = true;
    else
      rec.click1 = true;
  }
  if (d_b > 0.0) {
    rec.click0 = rec.click0 || rng.bernoulli(d_b);
    rec.click1 = rec.click1 || rng.bernoulli(d_b);
  }
  return rec;
}

}  // namespace lm05
