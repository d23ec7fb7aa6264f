#include "lm05/engine.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lm05 {

namespace {

constexpr std::uint64_t kChunkPulses = 1u << 18;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t mix(std::uint64_t h, double v) {
  return mix(h, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

void SessionConfig::validate() const {
  link.validate();
  if (n_pulses == 0) throw std::invalid_argument("session: n_pulses must be positive");
  if (gamma_split < 0.0 || gamma_split > 1.0)
    throw std::invalid_argument("session: gamma_split must lie in [0,1]");
  if (strategy.backward_block_fraction < 0.0 ||
      strategy.backward_block_fraction > 1.0)
    throw std::invalid_argument("session: backward_block_fraction must lie in [0,1]");
  if (alice_eta && (*alice_eta < 0.0 || *alice_eta > 1.0))
    throw std::invalid_argument("session: alice_eta must lie in [0,1]");
  if (alice_d_b && (*alice_d_b < 0.0 || *alice_d_b >= 1.0))
    throw std::invalid_argument("session: alice_d_b must lie in [0,1)");
}

std::uint64_t SessionConfig::fingerprint() const {
  std::uint64_t h = 0x51a05ULL;
  h = mix(h, static_cast<std::uint64_t>(protocol));
  h = mix(h, static_cast<std::uint64_t>(strategy.kind));
  h = mix(h, static_cast<std::uint64_t>(strategy.placement));
  h = mix(h, strategy.backward_block_fraction);
  h = mix(h, link.mu);
  h = mix(h, link.alpha);
  h = mix(h, link.length_km);
  h = mix(h, link.gamma_c_db);
  h = mix(h, link.eta_b);
  h = mix(h, link.d_b);
  h = mix(h, link.cm_probability);
  h = mix(h, gamma_split);
  h = mix(h, static_cast<std::uint64_t>(eta_in_gamma));
  h = mix(h, alice_eta.value_or(-1.0));
  h = mix(h, alice_d_b.value_or(-1.0));
  return h == 0 ? 1 : h;
}

SessionStats run_lm05(const SessionConfig& cfg) {
  cfg.validate();
  if (cfg.protocol != Protocol::LM05)
    throw std::invalid_argument("run_lm05: config is not an LM05 session");

  const LinkParams& lp = cfg.link;
  const double eta_bob = cfg.eta_in_gamma ? 1.0 : lp.eta_b;
  const double eta_alice =
      cfg.eta_in_gamma ? 1.0 : cfg.alice_eta.value_or(lp.eta_b);
  const double d_alice = cfg.alice_d_b.value_or(lp.d_b);
  const double t_fwd =
      transmissivity(lp.alpha, lp.length_km, cfg.gamma_split * lp.gamma_c_db);
  const double t_bwd = transmissivity(lp.alpha, lp.length_km,
                                      (1.0 - cfg.gamma_split) * lp.gamma_c_db);
  const bool eve = cfg.strategy.kind != EveKind::None;

  RandomStream rng(cfg.seed);
  SessionStats s;
  s.config_key = cfg.fingerprint();

  for (std::uint64_t i = 0; i < cfg.n_pulses; ++i) {
    ++s.pulses;

    // Bob prepares.
    const PolarizationState psi = random_state(rng);
    const Basis prep_basis = basis_of(psi);
    const Pulse source{sample_photon_number(lp.mu, rng), psi};

    // Forward transit. An active Eve grabs the pulse right at Bob's exit and
    // supplants the lossy channel with her own lossless delivery.
    Pulse at_alice{0, psi};
    ForwardDecision dec;
    EveKnowledge know;
    if (eve) {
      if (cfg.strategy.kind == EveKind::PnsM) {
        auto [d, k] = pns_m_forward(source, cfg.strategy, rng);
        dec = d;
        know = k;
      } else {
        dec = pns_m_prime_forward(source, cfg.strategy, rng);
      }
      if (dec.action == ForwardDecision::Action::Block)
        ++s.eve_blocked;
      else
        at_alice = dec.sent;
    } else {
      at_alice = thin(source, t_fwd, rng);
    }

    // Alice's station.
    const bool control_mode = rng.bernoulli(lp.cm_probability);
    if (control_mode) {
      if (at_alice.n == 0) ++s.lost_forward;
      const Basis ab = random_basis(rng);
      const ClickRecord cr = detect(at_alice, ab, eta_alice, d_alice, rng);
      if (cr.single_click() && ab == prep_basis) {
        ++s.cm_trials;
        if (cr.bit() != bit_of(psi)) ++s.cm_errors;
      }
      continue;  // pulse consumed
    }

    ++s.sent;
    if (at_alice.n == 0) ++s.lost_forward;
    const int alice_bit = static_cast<int>(rng.uniform_pow2(2));
    const EncodeOp op = alice_bit ? EncodeOp::Flip : EncodeOp::Identity;
    const PolarizationState encoded = apply_encode(op, at_alice.state);

    // Backward transit and Bob's measurement in the preparation basis.
    ClickRecord cr;
    if (eve) {
      bool deliver = false;
      PolarizationState deliver_state = encoded;
      if (dec.block_on_return) {
        ++s.eve_blocked;
      } else if (cfg.strategy.kind == EveKind::PnsM && know.conclusive) {
        auto [bit, fwd] = pns_m_backward(encoded, know);
        know.learned_bit = bit;
        deliver = true;
        deliver_state = fwd;
      } else if (cfg.strategy.kind == EveKind::PnsMPrime &&
                 dec.action == ForwardDecision::Action::ForwardSubset) {
        if (pns_m_prime_conclusive(rng)) {
          deliver = true;
          deliver_state = apply_encode(op, dec.kept.state);  // stored p3
        } else {
          ++s.eve_blocked;
        }
      }
      if (deliver) {
        ++s.eve_accepted;
        // Lossless delivery: guaranteed registration on the proper detector.
        if (bit_of(measure(deliver_state, prep_basis, rng)) == 0)
          cr.click0 = true;
        else
          cr.click1 = true;
      }
      if (lp.d_b > 0.0) {
        cr.click0 = cr.click0 || rng.bernoulli(lp.d_b);
        cr.click1 = cr.click1 || rng.bernoulli(lp.d_b);
      }
    } else {
      const Pulse arriving = thin(Pulse{at_alice.n, encoded}, t_bwd, rng);
      cr = detect(arriving, prep_basis, eta_bob, lp.d_b, rng);
    }

    if (cr.no_click()) {
      ++s.lost_backward;
      continue;
    }
    ++s.detected;
    ++s.n_tot;
    if (cr.double_click()) {
      ++s.n_d;
    } else {
      const int decoded = cr.bit() == bit_of(psi) ? 0 : 1;
      if (decoded != alice_bit) ++s.n_err;
    }
  }
  return s;
}

SessionStats run_bb84(const SessionConfig& cfg) {
  cfg.validate();
  if (cfg.protocol != Protocol::BB84)
    throw std::invalid_argument("run_bb84: config is not a BB84 session");

  const LinkParams& lp = cfg.link;
  const double eta = cfg.eta_in_gamma ? 1.0 : lp.eta_b;
  const double t = transmissivity(lp.alpha, lp.length_km, lp.gamma_c_db);
  const bool eve = cfg.strategy.kind != EveKind::None;

  RandomStream rng(cfg.seed);
  SessionStats s;
  s.config_key = cfg.fingerprint();

  for (std::uint64_t i = 0; i < cfg.n_pulses; ++i) {
    ++s.pulses;
    ++s.sent;

    const PolarizationState psi = random_state(rng);
    const Basis prep_basis = basis_of(psi);
    const int bit = bit_of(psi);
    const Pulse source{sample_photon_number(lp.mu, rng), psi};
    const Basis bob_basis = random_basis(rng);

    ClickRecord cr;
    if (eve) {
      // Splitting attack: multiphoton pulses lose one photon to Eve's memory
      // and the remainder arrives through her lossless channel.
      if (source.n >= 2) {
        ++s.eve_accepted;
        cr = detect(Pulse{source.n - 1, psi}, bob_basis, 1.0, lp.d_b, rng);
      } else {
        ++s.eve_blocked;
        cr = detect(Pulse{0, psi}, bob_basis, eta, lp.d_b, rng);
      }
    } else {
      const Pulse arriving = thin(source, t, rng);
      cr = detect(arriving, bob_basis, eta, lp.d_b, rng);
    }

    if (cr.no_click()) {
      ++s.lost_forward;
      continue;
    }
    ++s.detected;
    if (bob_basis != prep_basis) continue;  // sifted away
    ++s.n_tot;
    if (cr.double_click()) {
      ++s.n_d;
    } else if (cr.bit() != bit) {
      ++s.n_err;
    }
  }
  return s;
}

SessionStats run_session(const SessionConfig& cfg) {
  return cfg.protocol == Protocol::LM05 ? run_lm05(cfg) : run_bb84(cfg);
}

SessionStats run_session_parallel(const SessionConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::uint64_t n_chunks = (cfg.n_pulses + kChunkPulses - 1) / kChunkPulses;
  std::vector<SessionConfig> chunks;
  chunks.reserve(n_chunks);
  for (std::uint64_t i = 0; i < n_chunks; ++i) {
    SessionConfig c = cfg;
    c.n_pulses = std::min<std::uint64_t>(kChunkPulses,
                                         cfg.n_pulses - i * kChunkPulses);
    c.seed = RandomStream::derive(cfg.seed, i);
    chunks.push_back(c);
  }

  std::vector<SessionStats> results(chunks.size());
  if (threads <= 1 || chunks.size() == 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i)
      results[i] = run_session(chunks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(threads, chunks.size()));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < chunks.size();
             i = next.fetch_add(1))
          results[i] = run_session(chunks[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  SessionStats total;
  for (const auto& r : results) total = merge(total, r);
  return total;
}

SessionStats merge(const SessionStats& a, const SessionStats& b) {
  if (a.config_key != 0 && b.config_key != 0 && a.config_key != b.config_key)
    throw std::invalid_argument("merge: session stats come from different configs");
  SessionStats m;
  m.config_key = a.config_key != 0 ? a.config_key : b.config_key;
  m.pulses = a.pulses + b.pulses;
  m.sent = a.sent + b.sent;
  m.detected = a.detected + b.detected;
  m.n_tot = a.n_tot + b.n_tot;
  m.n_err = a.n_err + b.n_err;
  m.n_d = a.n_d + b.n_d;
  m.cm_trials = a.cm_trials + b.cm_trials;
  m.cm_errors = a.cm_errors + b.cm_errors;
  m.lost_forward = a.lost_forward + b.lost_forward;
  m.lost_backward = a.lost_backward + b.lost_backward;
  m.eve_accepted = a.eve_accepted + b.eve_accepted;
  m.eve_blocked = a.eve_blocked + b.eve_blocked;
  return m;
}

GainReport empirical_gain(const SessionStats& stats, const LinkParams& link,
                          Protocol protocol, const CascadeTable& cascade,
                          const GainOptions& options) {
  if (stats.sent == 0 || stats.n_tot == 0)
    throw std::invalid_argument("empirical_gain: empty session");
  const double e = qber_estimate(stats.qber_tally());
  const double p_av =
      static_cast<double>(stats.detected) / static_cast<double>(stats.sent);
  const double p_dark = std::min(2.0 * link.d_b, 1.0);
  const double p_sign = std::max((p_av - p_dark) / (1.0 - p_dark), 0.0);

  GainReport r;
  r.protocol = protocol;
  r.mu_used = link.mu;
  r.total_path_km = path_km(protocol, link.length_km);
  r.p_sign = p_sign;
  r.p_dark = p_dark;
  r.p_av = p_av;
  r.yield_bound = pns_yield(protocol, link.mu);
  r.beta = (p_av - r.yield_bound) / p_av;
  r.e = e;
  r.h_e = binary_entropy(e);
  r.f_casc = cascade.efficiency(e);
  r.tau_prime = r.beta > 0.0 ? tau(std::min(e / r.beta, 1.0)) : 1.0;
  r.throughput_factor = protocol == Protocol::BB84 ? 0.5 : 1.0;
  if (options.account_cm && protocol == Protocol::LM05)
    r.throughput_factor *= 1.0 - link.cm_probability;
  r.g_sec = recompute_gain(r);
  return r;
}

double expected_detection_fraction(const SessionConfig& cfg) {
  const LinkParams& lp = cfg.link;
  const double eta = cfg.eta_in_gamma ? 1.0 : lp.eta_b;
  const double no_dark = (1.0 - lp.d_b) * (1.0 - lp.d_b);
  if (cfg.strategy.kind == EveKind::None) {
    const double path = path_km(cfg.protocol, lp.length_km);
    const double t = transmissivity(lp.alpha, path, lp.gamma_c_db);
    return 1.0 - std::exp(-lp.mu * eta * t) * no_dark;
  }
  double yield = 0.0;
  if (cfg.protocol == Protocol::BB84)
    yield = pns_yield_bb84(lp.mu);
  else if (cfg.strategy.kind == EveKind::PnsM)
    yield = pns_yield_lm05(lp.mu);
  else
    yield = pns_m_prime_acceptance(lp.mu);
  return yield + (1.0 - yield) * (1.0 - no_dark);
}

}  // namespace lm05
