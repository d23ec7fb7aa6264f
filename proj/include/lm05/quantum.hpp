#pragma once

#include <cstdint>

#include "lm05/random.hpp"

namespace lm05 {

// Measurement bases: Z holds {H, V}, X holds {D, A}.
enum class Basis : std::uint8_t { Z = 0, X = 1 };

// The four signal states. H/V are the sigma_z eigenstates, D/A the
// sigma_x ones.
enum class PolarizationState : std::uint8_t { H = 0, V = 1, D = 2, A = 3 };

// Message-mode operation: identity encodes 0, the universal equatorial NOT
// (i sigma_y) encodes 1 by flipping any of the four states to its partner.
enum class EncodeOp : std::uint8_t { Identity = 0, Flip = 1 };

Basis basis_of(PolarizationState s);

// Orthogonal partner within the same basis (H<->V, D<->A). Involution.
PolarizationState orthogonal(PolarizationState s);

// Bit carried by a state within its basis: H,D -> 0; V,A -> 1.
int bit_of(PolarizationState s);
PolarizationState state_for(Basis b, int bit);

PolarizationState apply_encode(EncodeOp op, PolarizationState s);

// Projective measurement of s in basis b: same-basis states come back
// unchanged, conjugate-basis states collapse to either outcome with
// probability 1/2. The result always lies in b.
PolarizationState measure(PolarizationState s, Basis b, RandomStream& rng);

PolarizationState random_state(RandomStream& rng);
Basis random_basis(RandomStream& rng);

const char* name(Basis b);
const char* name(PolarizationState s);

}  // namespace lm05
