#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "opgrowth/pauli.hpp"
#include "opgrowth/size_stats.hpp"

namespace opgrowth {

/// Dense coefficient vector over all 4^n Pauli strings, M = sum_R c_R R in
/// the normalized basis <R R'> = delta_{RR'}. Hermitian operators with real
/// Pauli coefficients stay real under i[H, .] and the dissipators used
/// here, so coefficients are stored as doubles. Index = x_bits | z_bits<<n.
struct OperatorState {
  int n = 0;
  Eigen::VectorXd coeffs;

  static OperatorState from_pauli(const PauliString& p);
  /// Linear combination sum_k g_k R_k, optionally normalized to <MM> = 1.
  static OperatorState from_terms(
      int n, const std::vector<std::pair<PauliString, double>>& terms,
      bool normalize = false);
};

int max_exact_qubits();  // 10

uint32_t pauli_index(const PauliString& p);
PauliString pauli_from_index(int n, uint32_t idx);

struct HamiltonianSpec {
  int n = 0;
  std::vector<std::pair<PauliString, double>> terms;

  /// J sum Z_i Z_{i+1} + h_x sum X_i + h_z sum Z_i, open chain. The default
  /// couplings (1, 1.05, 0.5) are the standard strongly chaotic point.
  static HamiltonianSpec mixed_field_ising(int n, double J = 1.0,
                                           double hx = 1.05, double hz = 0.5);
  /// Uniform transverse perturbation sum_i X_i, for H1 = H2 + eta*dH runs.
  static HamiltonianSpec uniform_x(int n);
  /// H + eta * dH.
  HamiltonianSpec perturbed(const HamiltonianSpec& dh, double eta) const;
  /// Random chain with nearest-neighbour two-site and single-site Pauli
  /// terms, couplings uniform in [-1, 1].
  static HamiltonianSpec random_chain(int n, Rng& rng);
  /// The terms of this Hamiltonian touching the central site, as an
  /// operator normalized to <MM> = 1 (a conserved-overlap initial operator).
  OperatorState local_energy_density() const;
};

struct LindbladSpec {
  /// Pauli jump operators with rates; ignored if effective_size_model.
  std::vector<std::pair<PauliString, double>> jump_ops;
  bool effective_size_model = false;
  double epsilon = 0.0;  // rate of the effective size damping

  static LindbladSpec none() { return {}; }
  static LindbladSpec effective(double eps) { return {{}, true, eps}; }
  static LindbladSpec jumps(std::vector<std::pair<PauliString, double>> ops) {
    return {std::move(ops), false, 0.0};
  }
};

/// Matrix-free generator application d c/dt = G c for
/// dM/dt = i[H, M] + dissipator. Pauli jump dissipators and the effective
/// size damping are diagonal in the Pauli basis; the commutator is a sum of
/// signed XOR-shuffles, one per Hamiltonian term.
class Generator {
 public:
  Generator(int n, const HamiltonianSpec& h, const LindbladSpec& l);
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  int n() const { return n_; }
  const Eigen::VectorXd& diagonal() const { return diag_; }

 private:
  struct Term {
    uint32_t mask;
    std::vector<int8_t> sign;  // 0 where [Q, R] = 0, else +-1
    double scale;              // 2 * coupling
  };
  int n_;
  std::vector<Term> terms_;
  Eigen::VectorXd diag_;
};

/// Integrate the state to time t with an adaptive Dormand-Prince 4(5)
/// scheme at relative tolerance tol.
OperatorState evolve(const OperatorState& state, const HamiltonianSpec& h,
                     const LindbladSpec& l, double t, double tol = 1e-8);

double echo(const OperatorState& state);
SizeDistribution size_distribution(const OperatorState& state);

/// Normalized single-site OTOCs <M P_i M P_i>/<M M> for all 3n non-identity
/// single-site Paulis, the measurement-side input of the size-from-OTOC
/// identity.
std::map<SitePauli, double> single_site_otocs(const OperatorState& state);

/// Echo / mean size / size variance sampled on a uniform grid
/// t = 0, dt, ..., t_max.
struct EvolutionTrace {
  std::vector<double> time;
  std::vector<double> echo;
  std::vector<double> mean_size;
  std::vector<double> var_size;
};

EvolutionTrace evolve_trace(const OperatorState& state, const HamiltonianSpec& h,
                            const LindbladSpec& l, double t_max, double dt,
                            double tol = 1e-8);

/// Max over interior grid points of |d/dt log N + 2 eps S|, derivative by
/// centered differences. Vanishes identically for effective-model dynamics.
double check_eq5(const EvolutionTrace& trace, double epsilon);

/// Max over interior grid points of |d/dt S + 2 eps dS^2| (H = 0 runs).
double check_eq6(const EvolutionTrace& trace, double epsilon);

enum class OtocNormalization { cross, forward };

/// Two-Hamiltonian OTOC profile,
/// (1/4) sum_{P in {I,X,Y,Z}} <M_1(t) P_i M_2(t) P_i> / N(t),
/// rows = sites, cols = times. N(t) is <M_1(t) M_2(t)> for `cross` (the
/// default) or <M_1(t) M_1(t)> for `forward`.
Eigen::MatrixXd otoc_profile(const OperatorState& m, const HamiltonianSpec& h1,
                             const HamiltonianSpec& h2,
                             const std::vector<double>& times,
                             const std::vector<int>& sites,
                             OtocNormalization norm = OtocNormalization::cross,
                             double tol = 1e-8);

}  // namespace opgrowth
