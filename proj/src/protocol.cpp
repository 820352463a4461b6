#include "opgrowth/protocol.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace opgrowth {

void ProtocolConfig::validate() const {
  if (n < 1 || n > max_exact_qubits())
    throw std::invalid_argument("ProtocolConfig: n must be in [1, 10]");
  if (mu < 0) throw std::invalid_argument("ProtocolConfig: mu must be >= 0");
  if (shots < 1) throw std::invalid_argument("ProtocolConfig: shots must be >= 1");
  if (t < 0) throw std::invalid_argument("ProtocolConfig: negative time");
  if (initial_operator.n() != 0 && initial_operator.n() != n)
    throw std::invalid_argument("ProtocolConfig: initial operator length mismatch");
}

PauliString ProtocolConfig::resolved_initial() const {
  if (initial_operator.n() == n) return initial_operator;
  return PauliString::single(n, 0, Pauli::X);
}

PauliString sample_pauli_layer(int n, double mu, Rng& rng) {
  if (mu < 0) throw std::invalid_argument("sample_pauli_layer: mu must be >= 0");
  double p = -std::expm1(-mu) / 4.0;  // (1 - e^{-mu})/4
  PauliString layer(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.next_double();
    if (u < 3.0 * p) {
      Pauli choice[] = {Pauli::X, Pauli::Y, Pauli::Z};
      layer.set_site(i, choice[static_cast<int>(u / p)]);
    }
  }
  return layer;
}

double channel_factor(const PauliString& r, double mu) {
  if (mu < 0) throw std::invalid_argument("channel_factor: mu must be >= 0");
  return std::exp(-mu * r.size());
}

double oracle_generating_function(const OperatorState& state, double mu) {
  SizeDistribution d = size_distribution(state);
  double sum = 0.0;
  for (int s = 0; s <= d.n; ++s) sum += d.mass[s] * std::exp(-mu * s);
  return sum;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  OperatorState evolved =
      evolve(OperatorState::from_pauli(cfg.resolved_initial()),
             cfg.hamiltonian, LindbladSpec::none(), cfg.t);
  const int n = cfg.n;
  const Eigen::VectorXd& c = evolved.coeffs;
  const uint32_t site_mask = (1u << n) - 1;

  // Welford accumulation: exactly identical shots (e.g. mu = 0) must give
  // exactly zero variance.
  double mean = 0.0, m2 = 0.0;
  for (int shot = 0; shot < cfg.shots; ++shot) {
    Rng rng = Rng::fork(cfg.seed, static_cast<uint64_t>(shot));
    PauliString layer = sample_pauli_layer(n, cfg.mu, rng);
    uint32_t lx = layer.x_words().empty()
                      ? 0u
                      : static_cast<uint32_t>(layer.x_words()[0]);
    uint32_t lz = layer.z_words().empty()
                      ? 0u
                      : static_cast<uint32_t>(layer.z_words()[0]);
    double overlap = 0.0;
    for (int64_t idx = 0; idx < c.size(); ++idx) {
      double m = c[idx] * c[idx];
      if (m == 0.0) continue;
      uint32_t rx = static_cast<uint32_t>(idx) & site_mask;
      uint32_t rz = static_cast<uint32_t>(idx >> n) & site_mask;
      int sym = std::popcount(lx & rz) + std::popcount(lz & rx);
      overlap += (sym & 1) ? -m : m;
    }
    double f = 0.5 * (1.0 + overlap);
    double delta = f - mean;
    mean += delta / (shot + 1);
    m2 += delta * (f - mean);
  }

  double std_error =
      cfg.shots > 1
          ? std::sqrt(m2 / (cfg.shots - 1) / cfg.shots)
          : 0.0;
  double oracle = 0.5 * (1.0 + oracle_generating_function(evolved, cfg.mu));
  return {mean, std_error, oracle};
}

}  // namespace opgrowth
