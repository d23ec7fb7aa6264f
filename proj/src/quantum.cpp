#include "lm05/quantum.hpp"

namespace lm05 {

Basis basis_of(PolarizationState s) {
  return (s == PolarizationState::H || s == PolarizationState::V) ? Basis::Z
                                                                  : Basis::X;
}

PolarizationState orthogonal(PolarizationState s) {
  switch (s) {
    case PolarizationState::H: return PolarizationState::V;
    case PolarizationState::V: return PolarizationState::H;
    case PolarizationState::D: return PolarizationState::A;
    case PolarizationState::A:
    default: return PolarizationState::D;
  }
}

int bit_of(PolarizationState s) {
  return (s == PolarizationState::V || s == PolarizationState::A) ? 1 : 0;
}

PolarizationState state_for(Basis b, int bit) {
  if (b == Basis::Z)
    return bit ? PolarizationState::V : PolarizationState::H;
  return bit ? PolarizationState::A : PolarizationState::D;
}

PolarizationState apply_encode(EncodeOp op, PolarizationState s) {
  return op == EncodeOp::Identity ? s : orthogonal(s);
}

PolarizationState measure(PolarizationState s, Basis b, RandomStream& rng) {
  if (basis_of(s) == b) return s;
  return state_for(b, static_cast<int>(rng.uniform_pow2(2)));
}

PolarizationState random_state(RandomStream& rng) {
  return static_cast<PolarizationState>(rng.uniform_pow2(4));
}

Basis random_basis(RandomStream& rng) {
  return static_cast<Basis>(rng.uniform_pow2(2));
}

const char* name(Basis b) { return b == Basis::Z ? "Z" : "X"; }

const char* name(PolarizationState s) {
  switch (s) {
    case PolarizationState::H: return "H";
    case PolarizationState::V: return "V";
    case PolarizationState::D: return "D";
    case PolarizationState::A:
    default: return "A";
  }
}

}  // namespace lm05
