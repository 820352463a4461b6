#pragma once

#include <cstdint>
#include <vector>

#include "opgrowth/pauli.hpp"
#include "opgrowth/size_stats.hpp"

namespace opgrowth {

enum class Geometry { brickwork_1d, all_to_all };

/// Noisy random-circuit run configuration. epsilon is the per-qubit,
/// per-layer error strength; for all_to_all, one "layer" is one unit of
/// time containing gates_per_unit_time random-pair gates.
struct CircuitConfig {
  int n = 0;
  Geometry geometry = Geometry::brickwork_1d;
  double epsilon = 0.0;
  int layers = 0;
  int trajectories = 1;
  uint64_t seed = 0;
  PauliString initial_operator;  // default: X at the central site
  int gates_per_unit_time = 0;   // all_to_all only; default n/2
  /// Resample the trajectory population from its weights after every layer
  /// (systematic resampling). Required whenever the echo decays far below
  /// 1/trajectories: without it the weighted ensemble degenerates onto a
  /// few surviving trajectories and late-time means are garbage. The echo
  /// is then accumulated as the product of per-layer mean weight factors.
  bool resample = false;

  void validate() const;
  PauliString resolved_initial() const;
  int resolved_gates_per_unit_time() const;
};

/// Per-time observables of a run: weighted mean size, weighted size
/// variance, echo N(t) (mean trajectory weight) and the standard error of
/// the mean size. time[0] = 0 is the initial operator.
struct GrowthCurve {
  std::vector<double> time;
  std::vector<double> mean_size;
  std::vector<double> variance;
  std::vector<double> echo;
  std::vector<double> stderr_mean_size;
  /// Weighted covariance of S(t) with its own past action int_0^t S dt'.
  /// At epsilon = 0 this is the linear-response susceptibility of the mean
  /// size to the noise weighting (the quadratic slowdown is
  /// 2 * eps * cov_size_action to first order). Not part of the CSV schema.
  std::vector<double> cov_size_action;
};

/// One Monte-Carlo trajectory: a Pauli string plus the deterministic noise
/// log-weight accumulated so far. Cached size stays in sync with the string.
struct Trajectory {
  PauliString string;
  double log_weight = 0.0;
  int size = 0;
};

/// Haar/Clifford-averaged two-site Pauli transfer: identity stays identity,
/// any non-identity input goes to one of the 15 non-identity two-site
/// Paulis uniformly at random. Input/output pair code is a*4 + b with
/// a = site code of the first qubit.
int gate_transfer(int pair_code, Rng& rng);

/// Heisenberg-picture per-site depolarizing layer: amplitude picks up
/// (1-epsilon) per non-identity site, so log mass weight gains
/// 2*size*ln(1-epsilon). The string itself is unchanged.
void apply_noise_layer(Trajectory& traj, double epsilon);

/// One brickwork layer (open boundary) with the per-layer noise weight
/// split symmetrically around the gates: the log-weight increment is
/// (S_before + S_after) * ln(1-epsilon), i.e. the trapezoid of the
/// continuum damping across the layer.
/// parity 0 gates pairs (0,1),(2,3),...; parity 1 gates (1,2),(3,4),...
void step_brickwork(std::vector<Trajectory>& trajs, int parity, double epsilon,
                    int n, Rng& rng);

/// One unit of all-to-all time: gates_per_unit_time random-pair gates, the
/// noise damping interleaved per gate so the total per-unit-time weight
/// increment is 2*S*ln(1-epsilon).
void step_all_to_all(std::vector<Trajectory>& trajs, double epsilon, int n,
                     int gates, Rng& rng);

/// Evolve `trajectories` independent weighted trajectories and record the
/// growth curve at every layer. Deterministic given config (per-trajectory
/// counter-based sub-seeds, fixed-order block reduction).
GrowthCurve run(const CircuitConfig& config);

/// Trajectory-resolved snapshot of the ensemble after `layers` steps, for
/// size-distribution cross-checks against exact oracles.
WeightedEnsemble run_ensemble(const CircuitConfig& config);

}  // namespace opgrowth
