#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "lm05/channel.hpp"

namespace lm05 {

enum class EveKind : std::uint8_t { None, PnsM, PnsMPrime };

// Where inconclusive pulses get absorbed. ForwardOnly drops everything
// before Alice; SplitBothPaths forwards a genuine photon for part of them and
// absorbs it on the return leg, spreading the loss over both paths without
// ever disturbing a control-mode measurement.
enum class BlockPlacement : std::uint8_t { ForwardOnly, SplitBothPaths };

struct EveStrategy {
  EveKind kind = EveKind::None;
  BlockPlacement placement = BlockPlacement::ForwardOnly;
  // Fraction of discard-bound pulses (with at least one spare photon) routed
  // to the return-leg absorption under SplitBothPaths.
  double backward_block_fraction = 0.5;
};

struct EveKnowledge {
  std::optional<PolarizationState> psi;
  bool conclusive = false;
  std::optional<int> learned_bit;
};

struct ForwardDecision {
  enum class Action : std::uint8_t { Block, ForwardFresh, ForwardSubset };
  Action action = Action::Block;
  Pulse sent{};                  // delivered toward Alice
  Pulse kept{};                  // retained in Eve's quantum memory
  bool knows_psi = false;
  bool block_on_return = false;  // absorb the pulse after Alice's station
};

// Photon-number QND measurement: reads n without touching the polarization.
int qnd_count(const Pulse& pulse);

// Forward leg of the three-photon attack. n < 3 is discarded; at n = 3 the
// absolute-polarization measurement is conclusive with probability 1/2, for
// n > 3 it is treated as always conclusive; success re-prepares one clean
// photon in the identified state.
std::pair<ForwardDecision, EveKnowledge> pns_m_forward(
    const Pulse& pulse, const EveStrategy& strategy, RandomStream& rng);

// Return leg: compare Alice's output against the known psi. Yields the
// learned bit and the state forwarded to Bob (unchanged, so the exchange
// stays error-free). Throws std::logic_error on inconclusive knowledge.
std::pair<int, PolarizationState> pns_m_backward(PolarizationState encoded,
                                                 const EveKnowledge& knowledge);

// Forward leg of the pair-measurement attack: n < 3 is discarded (two photons
// are not enough to finish the job), otherwise one photon travels on to Alice
// while two stay behind.
ForwardDecision pns_m_prime_forward(const Pulse& pulse,
                                    const EveStrategy& strategy,
                                    RandomStream& rng);

// Parallel/antiparallel discrimination on the intercepted pair, conclusive
// with probability 1/4.
bool pns_m_prime_conclusive(RandomStream& rng);

// Per-pulse acceptance probability of the pair-measurement attack,
// 1/4 * P_{n>=3}(mu).
double pns_m_prime_acceptance(double mu);

// One-shot wrapper over both legs for a message-mode pulse: on a conclusive
// outcome Eve learns Alice's operation and forwards her stored photon encoded
// to match; otherwise the pulse is absorbed.
std::pair<ForwardDecision, EveKnowledge> pns_m_prime(const Pulse& pulse,
                                                     EncodeOp alice_op,
                                                     const EveStrategy& strategy,
                                                     RandomStream& rng);

}  // namespace lm05
