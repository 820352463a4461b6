#pragma once

#include <functional>
#include <vector>

namespace opgrowth {

/// Measured constants of a gate model plus the noise and hydrodynamic
/// parameters entering the closed-form growth predictions.
struct PhenomParams {
  double v_butterfly = 0.0;  // ballistic front speed (sites/time)
  double width_coeff = 0.0;  // c in dS = c sqrt(v_B t)
  double lyapunov = 0.0;     // lambda in S ~ exp(lambda t)
  double rel_width = 0.0;    // b in dS = b S
  double epsilon = 0.0;      // error rate (1/time)
  double diffusion = 0.0;    // D (sites^2/time), conserved-density spreading
  double s0 = 1.0;           // initial size

  void validate() const;
};

/// The echo either tracks operator mass (|c|^2, rate 2*eps*S) or amplitude
/// (rate eps*S). Mass is the convention used by every simulation in this
/// project; amplitude reproduces the common 1D closed form exp(-eps int S).
enum class EchoConvention { mass, amplitude };

struct GrowthPrediction {
  double mean_size;
  double echo;
};

/// 1D ballistic growth with diffusive width:
/// S(t) = (3/2) v_B t - (c/2) eps v_B t^2, echo = exp(-k eps int_0^t S)
/// with k = 2 (mass) or 1 (amplitude). Valid while the quadratic correction
/// is a small fraction of the linear term.
GrowthPrediction predict_1d(const PhenomParams& p, double t,
                            EchoConvention conv = EchoConvention::mass);

/// Leading Gaussian form of the 1D echo, exp(-k (3/4) eps v_B t^2).
double predict_1d_echo_leading(const PhenomParams& p, double t,
                               EchoConvention conv = EchoConvention::mass);

struct AllToAllPrediction {
  double mean_size;
  double echo;
  double plateau_size;   // lambda / (eps b^2)
  double plateau_time;   // lambda^-1 log(plateau/S0)
};

/// Logistic solution of dS/dt = lambda S - eps b^2 S^2 with the echo
/// evaluated in closed form. eps = 0 degenerates to pure exponential growth
/// with echo 1.
AllToAllPrediction predict_all_to_all(const PhenomParams& p, double t,
                                      EchoConvention conv = EchoConvention::mass);

/// Predicted echo at the time open dynamics substantially deviate from
/// unitary growth: exp(-a v_B / eps) in 1D (a an O(1) constant),
/// exp(-1/b^2) for all-to-all (independent of eps).
enum class PhenomGeometry { one_dimensional, all_to_all };
double predict_nstar(const PhenomParams& p, PhenomGeometry geometry,
                     double a_1d = 1.0);

/// Bimodal conserved-overlap profile: a diffusive delta component of mass
/// 1/sqrt(D t) at S = 1 plus a ballistic tail
/// (v_B/sqrt(D)) ((3/2) v_B t - S)^{-3/2}, damped by exp(-eps S^2 / v_B)
/// when eps > 0. The delta mass is reported separately so moments of the
/// tail stay well defined.
struct ConservedProfile {
  double delta_mass;      // small-size component, ~ t^{-1/2}
  double truncation_size; // S_tr = sqrt(v_B / eps), +inf when eps = 0
};
ConservedProfile conserved_profile_summary(const PhenomParams& p, double t);
/// Tail mass density at size S, 1 <= S < (3/2) v_B t.
double predict_conserved_profile(const PhenomParams& p, double t, double s);

/// Generic integration of dS/dt = unitary(t, S) - 2 eps width^2(t, S) on
/// t_grid (RK4 per interval). The 1D and all-to-all closed forms are
/// special cases.
std::vector<double> integrate_eq6(
    const std::function<double(double, double)>& unitary_term,
    const std::function<double(double, double)>& width_model, double epsilon,
    const std::vector<double>& t_grid, double s0);

/// Fermi-golden-rule echo decay rate for forward/backward evolution under
/// Hamiltonians differing by eta * dH: -prefactor * eta^2 * tau_th * xi_th * S.
double golden_rule_rate(double eta, double tau_th, double xi_th,
                        double mean_size, double prefactor = 1.0);

}  // namespace opgrowth
