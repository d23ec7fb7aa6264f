#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lm05/channel.hpp"

namespace lm05 {

enum class Protocol : std::uint8_t { LM05, BB84 };
const char* name(Protocol p);

// Channel path covered by one detected pulse: the two-way protocol uses the
// quantum channel twice, so its photons travel 2l against BB84's l.
double path_km(Protocol protocol, double length_km);

// p_sign = 1 - exp(-mu * eta_B * t_link). Exact exponential; the familiar
// small-exponent approximation mu*eta_B*t_link is not used anywhere.
double signal_probability(double mu, double eta_b, double t_link);

// p_av = p_sign + p_dark - p_sign * p_dark with p_dark = 2 d_B (two
// detectors, inclusion-exclusion of a signal/dark coincidence).
double detection_probability(double p_sign, double d_b);

// Per-pulse yield available to a perfect photon-number-splitting adversary.
// Two-way protocol: P~ = P3/2 + P_{n>3} = 1 - (1+mu+mu^2/2+mu^3/12) e^-mu.
double pns_yield_lm05(double mu);
// BB84: P* = P_{n>=2} = 1 - (1+mu) e^-mu.
double pns_yield_bb84(double mu);
double pns_yield(Protocol protocol, double mu);

// Shannon binary entropy, h(0) = h(1) = 0 by continuity.
double binary_entropy(double e);

// Privacy-amplification discard fraction for single-photon pulses:
// tau(e) = log2(1 + 4e - 4e^2) on [0, 1/2], and 1 above.
double tau(double e);

// Cascade error-correction efficiency versus QBER. Linear interpolation
// through anchor points, clamped outside the table (one stderr warning the
// first time a value above the table range is requested).
class CascadeTable {
 public:
  CascadeTable();  // literature anchors {.01,1.16} {.05,1.16} {.1,1.22} {.15,1.35}

  // Two-column text file (qber efficiency), '#' comments, strictly
  // increasing first column. Throws std::runtime_error on malformed input.
  static CascadeTable from_file(const std::string& path);

  double efficiency(double e) const;
  double max_qber() const { return anchors_.back().first; }

 private:
  explicit CascadeTable(std::vector<std::pair<double, double>> anchors);
  std::vector<std::pair<double, double>> anchors_;
};

struct GainOptions {
  // Treat eta_B as already folded into the supplied t_link / Gamma_c and use
  // eta = 1 in the signal exponent (the alternative accounting).
  bool eta_in_gamma = false;
  // Charge the two-way protocol's throughput for the control-mode fraction c.
  bool account_cm = false;
};

// One full evaluation of the secure-gain formula. The fields are sufficient
// to recompute g_sec exactly (see recompute_gain).
struct GainReport {
  Protocol protocol = Protocol::LM05;
  double mu_used = 0.0;
  double total_path_km = 0.0;
  double p_sign = 0.0;
  double p_dark = 0.0;
  double p_av = 0.0;
  double yield_bound = 0.0;        // P~ or P*
  double beta = 0.0;               // (p_av - yield) / p_av
  double e = 0.0;                  // QBER
  double tau_prime = 0.0;          // tau(e / beta)
  double f_casc = 1.0;
  double h_e = 0.0;
  double throughput_factor = 1.0;  // sifting (BB84: 1/2) and optional CM share
  double g_sec = 0.0;              // 0 whenever beta <= 0 or the bracket is
};

// g_sec rebuilt from a report's own fields; used as a consistency check.
double recompute_gain(const GainReport& r);

// Gain at an explicitly supplied transmissivity (the experiment-style entry
// point where t_link is a measured number).
GainReport secure_gain_at(Protocol protocol, double mu, double eta_b,
                          double t_link, double d_b, double e,
                          const CascadeTable& cascade,
                          const GainOptions& options = {},
                          double cm_probability = 0.5,
                          double total_path_km = 0.0);

// Gain for a configured link; the path is 2l or l depending on the protocol.
GainReport secure_gain(const LinkParams& link, Protocol protocol, double e,
                       const CascadeTable& cascade,
                       const GainOptions& options = {});

// Fig.-1 style security margin p_sign(t_link) - yield(mu); positive values
// mark the secure region.
double security_margin(const LinkParams& link, Protocol protocol,
                       double t_link);

// Maps the operating point to an expected QBER during sweeps.
class QberModel {
 public:
  static QberModel constant(double e);
  // e = (e_det * p_sign + d_b) / p_av : misalignment floor plus the half of
  // the dark counts that lands in the wrong detector.
  static QberModel dark_driven(double e_det);

  double evaluate(double p_sign, double p_av, double d_b) const;
  bool is_constant() const { return kind_ == Kind::Constant; }
  double parameter() const { return value_; }

 private:
  enum class Kind : std::uint8_t { Constant, DarkDriven };
  QberModel(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

// Default misalignment floor for distance sweeps, calibrated so that with the
// 830 nm parameter set (alpha 2.5 dB/km, Gamma_c 8 dB, d_B 5e-8, eta_B 0.5)
// both protocols run out of secure gain between 6 and 7 km.
inline constexpr double kDefaultMisalignment = 0.034;

struct MuOptimum {
  double mu_star = 0.0;  // NaN when no mu gives positive gain
  double g_star = 0.0;
  bool secure = false;
};

// argmax of g_sec over mu in [1e-4, 2]: coarse log prescan plus golden
// section refinement to 1e-5 in mu.
MuOptimum optimize_mu(const LinkParams& link, Protocol protocol,
                      const QberModel& qber, const CascadeTable& cascade,
                      const GainOptions& options = {});

// Largest distance (10 m resolution) at which optimize_mu still finds
// positive gain. Returns +inf if the link never becomes insecure (alpha = 0).
double max_secure_distance(const LinkParams& link, Protocol protocol,
                           const QberModel& qber, const CascadeTable& cascade,
                           const GainOptions& options = {});

struct QberTally {
  std::uint64_t n_err = 0;
  std::uint64_t n_d = 0;
  std::uint64_t n_tot = 0;
};

// e = (n_err + n_D/2) / n_tot
double qber_estimate(const QberTally& tally);

}  // namespace lm05
