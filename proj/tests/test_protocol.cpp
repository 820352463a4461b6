#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opgrowth/protocol.hpp"
#include "opgrowth/size_stats.hpp"

using namespace opgrowth;

TEST_CASE("layer sampling matches the per-site channel probabilities") {
  const int n = 3, samples = 40000;
  const double mu = 0.7;
  double p = (1.0 - std::exp(-mu)) / 4.0;
  Rng rng(1);
  int count[3][4] = {};
  for (int k = 0; k < samples; ++k) {
    PauliString layer = sample_pauli_layer(n, mu, rng);
    for (int i = 0; i < n; ++i)
      ++count[i][static_cast<int>(layer.site(i))];
  }
  for (int i = 0; i < n; ++i) {
    for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) {
      double got = double(count[i][static_cast<int>(q)]) / samples;
      double sigma = std::sqrt(p * (1 - p) / samples);
      CHECK(std::abs(got - p) < 5 * sigma);
    }
  }
  CHECK_THROWS_AS(sample_pauli_layer(n, -0.1, rng), std::invalid_argument);
}

TEST_CASE("channel factor and sampled mean commutation sign agree") {
  PauliString r = PauliString::parse("XZIYII");
  const double mu = 0.4;
  CHECK(channel_factor(r, mu) == doctest::Approx(std::exp(-3.0 * mu)));

  const int samples = 200000;
  Rng rng(5);
  double sum = 0;
  for (int k = 0; k < samples; ++k) {
    PauliString layer = sample_pauli_layer(r.n(), mu, rng);
    sum += commutes(layer, r) ? 1.0 : -1.0;
  }
  double mean = sum / samples;
  double sigma = 1.0 / std::sqrt(double(samples));
  CHECK(std::abs(mean - channel_factor(r, mu)) < 5 * sigma);
}

TEST_CASE("oracle generating function equals N * G_S") {
  ProtocolConfig cfg;
  cfg.n = 4;
  cfg.t = 1.0;
  cfg.mu = 0.6;
  cfg.hamiltonian = HamiltonianSpec::mixed_field_ising(cfg.n);
  OperatorState evolved =
      evolve(OperatorState::from_pauli(cfg.resolved_initial()),
             cfg.hamiltonian, LindbladSpec::none(), cfg.t);
  SizeDistribution d = size_distribution(evolved);
  CHECK(oracle_generating_function(evolved, cfg.mu) ==
        doctest::Approx(normalization(d) * generating_function(d, cfg.mu)));
}

TEST_CASE("protocol estimate is unbiased (3 sigma) and mu=0 is exact") {
  ProtocolConfig cfg;
  cfg.n = 5;
  cfg.t = 1.5;
  cfg.mu = 0.5;
  cfg.shots = 4000;
  cfg.seed = 11;
  cfg.hamiltonian = HamiltonianSpec::mixed_field_ising(cfg.n);
  ProtocolResult r = run_protocol(cfg);
  CHECK(r.std_error > 0.0);
  CHECK(std::abs(r.f_estimate - r.oracle) < 3.0 * r.std_error);

  cfg.mu = 0.0;
  ProtocolResult r0 = run_protocol(cfg);
  CHECK(r0.std_error == 0.0);
  CHECK(r0.f_estimate == doctest::Approx(r0.oracle).epsilon(1e-12));
  CHECK(r0.oracle == doctest::Approx(1.0));  // unitary: N = 1, F = (1+1)/2
}

TEST_CASE("protocol at t = 0: the operator is a bare Pauli") {
  ProtocolConfig cfg;
  cfg.n = 4;
  cfg.t = 0.0;
  cfg.mu = 0.8;
  cfg.shots = 5000;
  cfg.seed = 2;
  cfg.hamiltonian = HamiltonianSpec::mixed_field_ising(cfg.n);
  ProtocolResult r = run_protocol(cfg);
  // size-1 operator: F oracle = (1 + e^{-mu})/2
  CHECK(r.oracle == doctest::Approx(0.5 * (1.0 + std::exp(-0.8))));
  CHECK(std::abs(r.f_estimate - r.oracle) < 3.0 * r.std_error);
}

TEST_CASE("config validation") {
  ProtocolConfig cfg;
  cfg.n = 11;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n = 4;
  cfg.mu = -0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.mu = 0.5;
  cfg.shots = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
