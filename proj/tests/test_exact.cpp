#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "opgrowth/exact.hpp"
#include "opgrowth/size_stats.hpp"

using namespace opgrowth;

TEST_CASE("pauli index round trip") {
  const int n = 3;
  for (uint32_t idx = 0; idx < (1u << (2 * n)); ++idx) {
    PauliString p = pauli_from_index(n, idx);
    CHECK(pauli_index(p) == idx);
  }
  CHECK(max_exact_qubits() == 10);
}

TEST_CASE("state construction and normalization") {
  PauliString x0 = PauliString::parse("XII");
  OperatorState st = OperatorState::from_pauli(x0);
  CHECK(st.coeffs.squaredNorm() == doctest::Approx(1.0));
  CHECK(st.coeffs[pauli_index(x0)] == doctest::Approx(1.0));

  PauliString zzz = PauliString::parse("ZZZ");
  OperatorState mix =
      OperatorState::from_terms(3, {{x0, 2.0}, {zzz, 2.0}}, true);
  CHECK(mix.coeffs.squaredNorm() == doctest::Approx(1.0));
  CHECK(mix.coeffs[pauli_index(x0)] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("unitary Heisenberg evolution against matrix-exponential oracle") {
  const int n = 3;
  HamiltonianSpec h = HamiltonianSpec::mixed_field_ising(n);
  OperatorState m0 =
      OperatorState::from_pauli(PauliString::single(n, 1, Pauli::Z));
  for (double t : {0.3, 1.1}) {
    OperatorState mt = evolve(m0, h, LindbladSpec::none(), t, 1e-11);
    oracle::MatrixXcd dense = oracle::heisenberg(
        oracle::hamiltonian_matrix(h), oracle::state_matrix(m0), t);
    Eigen::VectorXd expect = oracle::coefficients(n, dense);
    CHECK((mt.coeffs - expect).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(echo(mt) == doctest::Approx(1.0));  // unitarity preserves the norm
  }
}

TEST_CASE("random chains evolve correctly too") {
  const int n = 3;
  Rng rng(17);
  for (int k = 0; k < 3; ++k) {
    HamiltonianSpec h = HamiltonianSpec::random_chain(n, rng);
    OperatorState m0 =
        OperatorState::from_pauli(PauliString::single(n, 0, Pauli::X));
    double t = 0.7;
    OperatorState mt = evolve(m0, h, LindbladSpec::none(), t, 1e-11);
    oracle::MatrixXcd dense = oracle::heisenberg(
        oracle::hamiltonian_matrix(h), oracle::state_matrix(m0), t);
    CHECK((mt.coeffs - oracle::coefficients(n, dense)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("effective size model: per-string damping e^{-eps S t}") {
  const int n = 4;
  PauliString p1 = PauliString::parse("XIII");
  PauliString p3 = PauliString::parse("XYZI");
  OperatorState m0 = OperatorState::from_terms(n, {{p1, 0.6}, {p3, 0.8}});
  double eps = 0.15, t = 2.0;
  OperatorState mt = evolve(m0, HamiltonianSpec{}, LindbladSpec::effective(eps), t);
  CHECK(mt.coeffs[pauli_index(p1)] ==
        doctest::Approx(0.6 * std::exp(-eps * 1 * t)));
  CHECK(mt.coeffs[pauli_index(p3)] ==
        doctest::Approx(0.8 * std::exp(-eps * 3 * t)));
}

TEST_CASE("Pauli jump dissipator against the dense Lindblad oracle") {
  const int n = 2;
  HamiltonianSpec h = HamiltonianSpec::mixed_field_ising(n);
  LindbladSpec l = LindbladSpec::jumps({
      {PauliString::parse("ZI"), 0.3},
      {PauliString::parse("XY"), 0.1},
  });
  OperatorState m0 =
      OperatorState::from_pauli(PauliString::single(n, 0, Pauli::X));
  double t = 0.8;
  OperatorState mt = evolve(m0, h, l, t, 1e-11);

  std::vector<std::pair<oracle::MatrixXcd, double>> jumps;
  for (const auto& [p, rate] : l.jump_ops)
    jumps.emplace_back(oracle::pauli_matrix(p), rate);
  oracle::MatrixXcd dense = oracle::lindblad_heisenberg(
      oracle::hamiltonian_matrix(h), jumps, oracle::state_matrix(m0), t, 4000);
  CHECK((mt.coeffs - oracle::coefficients(n, dense)).cwiseAbs().maxCoeff() <
        1e-7);
}

TEST_CASE("single-qubit depolarizing rates") {
  // X, Y, Z jumps at equal rate gamma on site 0: every non-identity Pauli on
  // that site anticommutes with exactly two of the three jump operators, so
  // its coefficient decays at 4 gamma.
  const int n = 2;
  double gamma = 0.2, t = 1.3;
  LindbladSpec l = LindbladSpec::jumps({
      {PauliString::parse("XI"), gamma},
      {PauliString::parse("YI"), gamma},
      {PauliString::parse("ZI"), gamma},
  });
  for (const char* s : {"XI", "YI", "ZI"}) {
    OperatorState m0 = OperatorState::from_pauli(PauliString::parse(s));
    OperatorState mt = evolve(m0, HamiltonianSpec{}, l, t);
    CHECK(mt.coeffs[pauli_index(PauliString::parse(s))] ==
          doctest::Approx(std::exp(-4.0 * gamma * t)));
  }
  // strings living on the other site are untouched
  OperatorState m0 = OperatorState::from_pauli(PauliString::parse("IZ"));
  OperatorState mt = evolve(m0, HamiltonianSpec{}, l, t);
  CHECK(mt.coeffs[pauli_index(PauliString::parse("IZ"))] ==
        doctest::Approx(1.0));
}

TEST_CASE("size distribution and OTOC identity at n = 4") {
  const int n = 4;
  HamiltonianSpec h = HamiltonianSpec::mixed_field_ising(n);
  OperatorState m0 =
      OperatorState::from_pauli(PauliString::single(n, 2, Pauli::X));
  OperatorState mt = evolve(m0, h, LindbladSpec::effective(0.05), 1.2);

  SizeDistribution d = size_distribution(mt);
  CHECK(normalization(d) == doctest::Approx(echo(mt)));
  double s_direct = mean_size(d);
  double s_otoc = mean_size_from_otocs(n, single_site_otocs(mt));
  CHECK(std::abs(s_direct - s_otoc) < 1e-10);
}

TEST_CASE("local energy density is normalized and conserved") {
  const int n = 4;
  HamiltonianSpec h = HamiltonianSpec::mixed_field_ising(n);
  OperatorState m = h.local_energy_density();
  CHECK(m.coeffs.squaredNorm() == doctest::Approx(1.0));
  // Overlap with H is conserved under evolution by H.
  OperatorState hop = OperatorState::from_terms(n, h.terms);
  double before = m.coeffs.dot(hop.coeffs);
  OperatorState mt = evolve(m, h, LindbladSpec::none(), 1.5, 1e-11);
  CHECK(mt.coeffs.dot(hop.coeffs) == doctest::Approx(before).epsilon(1e-8));
}

TEST_CASE("evolve_trace identities: eq5 residual vanishes, eq6 for H = 0") {
  const int n = 4;
  Rng rng(23);
  HamiltonianSpec h = HamiltonianSpec::random_chain(n, rng);
  OperatorState m0 =
      OperatorState::from_pauli(PauliString::single(n, 2, Pauli::X));
  EvolutionTrace tr =
      evolve_trace(m0, h, LindbladSpec::effective(0.08), 0.5, 1e-3, 1e-11);
  CHECK(check_eq5(tr, 0.08) < 1e-6);

  OperatorState mix = OperatorState::from_terms(
      n, {{PauliString::parse("XIII"), 1.0}, {PauliString::parse("XXXI"), 1.0}},
      true);
  EvolutionTrace tr2 = evolve_trace(mix, HamiltonianSpec{},
                                    LindbladSpec::effective(0.08), 0.5, 1e-3);
  CHECK(check_eq6(tr2, 0.08) < 1e-6);
}

TEST_CASE("otoc profile: light cone structure and normalization choices") {
  const int n = 4;
  HamiltonianSpec h = HamiltonianSpec::mixed_field_ising(n);
  OperatorState m =
      OperatorState::from_pauli(PauliString::single(n, 0, Pauli::Y));
  std::vector<int> sites{0, 1, 2, 3};
  std::vector<double> times{1e-4, 0.5};
  Eigen::MatrixXd prof = otoc_profile(m, h, h, times, sites);
  // At t ~ 0 the operator is Y on site 0: OTOC is 0 there ((1+3*(-1/3))
  // averaged over I,X,Y,Z gives (1 + 1 - 1 - 1)/4 ... for a single-site
  // Pauli the site average is (2 commute + 2 anticommute)/4 = 0) and 1 on
  // non-support sites.
  CHECK(prof(0, 0) == doctest::Approx(0.0).epsilon(1e-3));
  for (int s = 1; s < n; ++s) CHECK(prof(s, 0) == doctest::Approx(1.0).epsilon(1e-3));
  // At later times the neighbor's OTOC must have dropped below 1.
  CHECK(prof(1, 1) < 0.999);
  // With equal Hamiltonians, cross and forward normalization coincide.
  Eigen::MatrixXd fwd =
      otoc_profile(m, h, h, times, sites, OtocNormalization::forward);
  CHECK((prof - fwd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("size guard: n beyond the exact limit is rejected") {
  CHECK_THROWS_AS(
      OperatorState::from_pauli(PauliString::single(11, 0, Pauli::X)),
      std::invalid_argument);
}
