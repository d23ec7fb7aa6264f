#pragma once

#include <cstdint>
#include <optional>

#include "lm05/adversary.hpp"
#include "lm05/analytics.hpp"

namespace lm05 {

struct SessionConfig {
  LinkParams link;
  EveStrategy strategy;
  Protocol protocol = Protocol::LM05;
  std::uint64_t n_pulses = 0;
  std::uint64_t seed = 1;
  // Fraction of Gamma_c placed on the forward path (the paper only fixes the
  // total apparatus loss).
  double gamma_split = 0.5;
  bool eta_in_gamma = false;
  // Alice's control-mode apparatus; defaults to Bob's values.
  std::optional<double> alice_eta;
  std::optional<double> alice_d_b;

  void validate() const;
  // Identity of everything but seed and pulse count; merge refuses to mix
  // stats from differently shaped sessions.
  std::uint64_t fingerprint() const;
};

// Mergeable per-session tallies. `sent` counts message-mode pulses for the
// two-way protocol and all pulses for BB84; `detected` are Bob-side click
// events among them; `n_tot` the decoded (for BB84: sifted) events including
// double clicks.
struct SessionStats {
  std::uint64_t config_key = 0;  // 0 = neutral element for merge
  std::uint64_t pulses = 0;
  std::uint64_t sent = 0;
  std::uint64_t detected = 0;
  std::uint64_t n_tot = 0;
  std::uint64_t n_err = 0;
  std::uint64_t n_d = 0;
  std::uint64_t cm_trials = 0;   // same-basis single-click control measurements
  std::uint64_t cm_errors = 0;
  std::uint64_t lost_forward = 0;   // nothing reached Alice
  std::uint64_t lost_backward = 0;  // sent back but no click at Bob
  std::uint64_t eve_accepted = 0;
  std::uint64_t eve_blocked = 0;

  QberTally qber_tally() const { return {n_err, n_d, n_tot}; }
};

SessionStats run_lm05(const SessionConfig& cfg);
SessionStats run_bb84(const SessionConfig& cfg);
SessionStats run_session(const SessionConfig& cfg);

// Chunked execution with per-chunk derived seeds; the result is independent
// of the thread count (chunk layout depends only on n_pulses).
SessionStats run_session_parallel(const SessionConfig& cfg, unsigned threads);

// Field-wise sum. Throws std::invalid_argument when the configs differ;
// a default-constructed SessionStats is the identity.
SessionStats merge(const SessionStats& a, const SessionStats& b);

// Secure-gain evaluation from measured tallies: e from the QBER estimator,
// p_av from detected/sent, the rest through the analytic pipeline.
GainReport empirical_gain(const SessionStats& stats, const LinkParams& link,
                          Protocol protocol, const CascadeTable& cascade,
                          const GainOptions& options = {});

// Expected Bob-side detection fraction for the exact Monte Carlo device
// model (used by the simulate self-check; with an adversary active this is
// the strategy's acceptance yield).
double expected_detection_fraction(const SessionConfig& cfg);

}  // namespace lm05
