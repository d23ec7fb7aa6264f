#include "lm05/adversary.hpp"

#include <cmath>
#include <stdexcept>

namespace lm05 {

namespace {

// Discard a pulse, optionally deferring the absorption to the return leg by
// forwarding one of the untouched original photons (possible only when at
// least one photon survives unmeasured).
ForwardDecision discard(const Pulse& pulse, int spare_photons,
                        const EveStrategy& strategy, RandomStream& rng) {
  ForwardDecision dec;
  if (strategy.placement == BlockPlacement::SplitBothPaths &&
      spare_photons > 0 && rng.bernoulli(strategy.backward_block_fraction)) {
    dec.action = ForwardDecision::Action::ForwardSubset;
    dec.sent = Pulse{1, pulse.state};
    dec.kept = Pulse{spare_photons - 1, pulse.state};
    dec.block_on_return = true;
  } else {
    dec.action = ForwardDecision::Action::Block;
  }
  return dec;
}

}  // namespace

int qnd_count(const Pulse& pulse) { return pulse.n; }

std::pair<ForwardDecision, EveKnowledge> pns_m_forward(
    const Pulse& pulse, const EveStrategy& strategy, RandomStream& rng) {
  EveKnowledge know;
  const int n = qnd_count(pulse);
  if (n < 3) return {discard(pulse, n, strategy, rng), know};

  const bool conclusive = n > 3 || rng.bernoulli(0.5);
  if (!conclusive) {
    // All three photons were consumed by the measurement; nothing is left to
    // forward, so the discard always lands on the forward path.
    return {discard(pulse, 0, strategy, rng), know};
  }
  know.psi = pulse.state;
  know.conclusive = true;
  ForwardDecision dec;
  dec.action = ForwardDecision::Action::ForwardFresh;
  dec.sent = Pulse{1, pulse.state};
  dec.knows_psi = true;
  return {dec, know};
}

std::pair<int, PolarizationState> pns_m_backward(
    PolarizationState encoded, const EveKnowledge& knowledge) {
  if (!knowledge.conclusive || !knowledge.psi)
    throw std::logic_error("pns_m_backward: requires conclusive knowledge of psi");
  const int bit = encoded == orthogonal(*knowledge.psi) ? 1 : 0;
  return {bit, encoded};
}

ForwardDecision pns_m_prime_forward(const Pulse& pulse,
                                    const EveStrategy& strategy,
                                    RandomStream& rng) {
  const int n = qnd_count(pulse);
  if (n < 3) return discard(pulse, n, strategy, rng);
  ForwardDecision dec;
  dec.action = ForwardDecision::Action::ForwardSubset;
  dec.sent = Pulse{1, pulse.state};      // p2, keeps control mode clean
  dec.kept = Pulse{n - 1, pulse.state};  // p1 for the pair, p3 for delivery
  return dec;
}

bool pns_m_prime_conclusive(RandomStream& rng) { return rng.bernoulli(0.25); }

double pns_m_prime_acceptance(double mu) {
  if (!(mu > 0.0))
    throw std::domain_error("pns_m_prime_acceptance: mu must be positive");
  const double p_ge3 = 1.0 - (1.0 + mu + mu * mu / 2.0) * std::exp(-mu);
  return 0.25 * p_ge3;
}

std::pair<ForwardDecision, EveKnowledge> pns_m_prime(const Pulse& pulse,
                                                     EncodeOp alice_op,
                                                     const EveStrategy& strategy,
                                                     RandomStream& rng) {
  EveKnowledge know;
  ForwardDecision dec = pns_m_prime_forward(pulse, strategy, rng);
  if (dec.action != ForwardDecision::Action::ForwardSubset || dec.block_on_return)
    return {dec, know};
  if (!pns_m_prime_conclusive(rng)) {
    dec.action = ForwardDecision::Action::Block;  // absorbed on the way back
    dec.sent = Pulse{};
    return {dec, know};
  }
  know.conclusive = true;
  know.learned_bit = alice_op == EncodeOp::Flip ? 1 : 0;
  dec.action = ForwardDecision::Action::ForwardFresh;
  dec.sent = Pulse{1, apply_encode(alice_op, pulse.state)};  // re-encoded p3
  return {dec, know};
}

}  // namespace lm05
