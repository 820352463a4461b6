#pragma once

#include <cstdint>

#include "opgrowth/exact.hpp"
#include "opgrowth/pauli.hpp"

namespace opgrowth {

/// Randomized-Pauli protocol for measuring the size generating function.
/// Each shot samples a single-qubit Pauli layer, which on average
/// implements the decoherence channel e^{-mu S}.
struct ProtocolConfig {
  int n = 0;
  double mu = 0.0;
  int shots = 1;
  uint64_t seed = 0;
  HamiltonianSpec hamiltonian;  // forward/backward evolution U = e^{-iHt}
  double t = 0.0;
  PauliString initial_operator;  // default: X at site 0

  void validate() const;
  PauliString resolved_initial() const;
};

/// Per-site i.i.d. layer: X, Y, or Z each with probability
/// p = (1 - e^{-mu})/4, identity with 1 - 3p.
PauliString sample_pauli_layer(int n, double mu, Rng& rng);

/// Closed-form expectation of the +-1 commutation sign between a sampled
/// layer and R: e^{-mu size(R)} (per non-identity site of R, 2 of the 3
/// non-identity Paulis anticommute, so the per-site mean sign is
/// 1 - 4p = e^{-mu}).
double channel_factor(const PauliString& r, double mu);

/// Unnormalized generating function sum_S P(S) e^{-mu S} = N * G_S(mu),
/// read directly off the exact coefficient vector.
double oracle_generating_function(const OperatorState& state, double mu);

struct ProtocolResult {
  double f_estimate;
  double std_error;
  double oracle;  // 1/2 [1 + N G_S(mu)] from the exact state
};

/// Simulate the full protocol in the Heisenberg picture: evolve M forward,
/// conjugate each shot's sampled layer through the Pauli components (a sign
/// flip per anticommuting component), and average
/// F_shot = 1/2 [1 + <M(t) L M(t) L>].
ProtocolResult run_protocol(const ProtocolConfig& cfg);

}  // namespace opgrowth
