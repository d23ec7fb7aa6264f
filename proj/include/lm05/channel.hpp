#pragma once

#include <cstdint>

#include "lm05/quantum.hpp"
#include "lm05/random.hpp"

namespace lm05 {

// A weak pulse: n photons sharing one polarization. Nothing in the model
// needs more quantum structure than the photon count plus that label.
struct Pulse {
  int n = 0;
  PolarizationState state = PolarizationState::H;
};

// Device and channel configuration for one link.
struct LinkParams {
  double mu = 0.1;              // mean photons per pulse
  double alpha = 0.0;           // fiber absorption, dB/km
  double length_km = 0.0;       // Alice-Bob distance l
  double gamma_c_db = 0.0;      // constant apparatus loss, dB
  double eta_b = 1.0;           // detector quantum efficiency
  double d_b = 0.0;             // dark counts per gating window per detector
  double cm_probability = 0.5;  // control-mode probability c
  double rep_rate_hz = 20e6;    // pulse repetition rate

  void validate() const;  // throws std::invalid_argument
};

// P_n(mu) = mu^n e^-mu / n!
double poisson_pmf(int n, double mu);

int sample_photon_number(double mu, RandomStream& rng);

// t_link = 10^-(alpha*l + gamma_c)/10
double transmissivity(double alpha_db_per_km, double length_km,
                      double gamma_c_db);

// Per-photon independent loss: n' ~ Binomial(n, t), polarization unchanged.
Pulse thin(const Pulse& pulse, double t, RandomStream& rng);

// One gating window on the two conclusive detectors. Detector 0 collects the
// basis state carrying bit 0, detector 1 its orthogonal partner.
struct ClickRecord {
  bool click0 = false;
  bool click1 = false;

  bool no_click() const { return !click0 && !click1; }
  bool double_click() const { return click0 && click1; }
  bool single_click() const { return click0 != click1; }
  int bit() const { return click1 ? 1 : 0; }  // meaningful for single clicks
};

// Threshold detection of an already-thinned pulse: each photon registers with
// probability eta_b and is routed by a measurement in analysis_basis; each
// detector additionally dark-fires with independent probability d_b.
ClickRecord detect(const Pulse& pulse, Basis analysis_basis, double eta_b,
                   double d_b, RandomStream& rng);

}  // namespace lm05
