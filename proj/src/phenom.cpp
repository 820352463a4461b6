#include "opgrowth/phenom.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opgrowth {

void PhenomParams::validate() const {
  if (v_butterfly < 0 || width_coeff < 0 || lyapunov < 0 || rel_width < 0 ||
      epsilon < 0 || diffusion < 0 || s0 < 0)
    throw std::invalid_argument("PhenomParams: negative parameter");
}

namespace {

double echo_rate_factor(EchoConvention conv) {
  return conv == EchoConvention::mass ? 2.0 : 1.0;
}

}  // namespace

GrowthPrediction predict_1d(const PhenomParams& p, double t,
                            EchoConvention conv) {
  p.validate();
  if (t < 0) throw std::invalid_argument("predict_1d: negative time");
  double vb = p.v_butterfly, c = p.width_coeff, eps = p.epsilon;
  double mean = 1.5 * vb * t - 0.5 * c * eps * vb * t * t;
  // int_0^t S dt' = (3/4) v_B t^2 - (c/6) eps v_B t^3
  double integral = 0.75 * vb * t * t - c / 6.0 * eps * vb * t * t * t;
  return {mean, std::exp(-echo_rate_factor(conv) * eps * integral)};
}

double predict_1d_echo_leading(const PhenomParams& p, double t,
                               EchoConvention conv) {
  p.validate();
  return std::exp(-echo_rate_factor(conv) * 0.75 * p.epsilon * p.v_butterfly *
                  t * t);
}

AllToAllPrediction predict_all_to_all(const PhenomParams& p, double t,
                                      EchoConvention conv) {
  p.validate();
  if (t < 0) throw std::invalid_argument("predict_all_to_all: negative time");
  if (p.s0 < 1) throw std::invalid_argument("predict_all_to_all: S0 must be >= 1");
  double lam = p.lyapunov, b2 = p.rel_width * p.rel_width, eps = p.epsilon;
  double k = echo_rate_factor(conv);

  if (eps * b2 == 0.0) {
    return {p.s0 * std::exp(lam * t), 1.0,
            std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }

  double plateau = lam / (eps * b2);
  double growth = std::expm1(lam * t);  // e^{lam t} - 1
  double mean = plateau * p.s0 * (growth + 1.0) / (plateau + p.s0 * growth);
  // int_0^t S dt' = (plateau/lam) log(1 + (S0/plateau)(e^{lam t} - 1))
  double integral = plateau / lam * std::log1p(p.s0 / plateau * growth);
  return {mean, std::exp(-k * eps * integral), plateau,
          std::log(plateau / p.s0) / lam};
}

double predict_nstar(const PhenomParams& p, PhenomGeometry geometry,
                     double a_1d) {
  p.validate();
  if (p.epsilon <= 0) throw std::invalid_argument("predict_nstar: eps must be > 0");
  if (geometry == PhenomGeometry::one_dimensional)
    return std::exp(-a_1d * p.v_butterfly / p.epsilon);
  return std::exp(-1.0 / (p.rel_width * p.rel_width));
}

ConservedProfile conserved_profile_summary(const PhenomParams& p, double t) {
  p.validate();
  if (t <= 0 || p.diffusion <= 0)
    throw std::invalid_argument("conserved_profile: need t > 0 and D > 0");
  double s_tr = p.epsilon > 0 ? std::sqrt(p.v_butterfly / p.epsilon)
                              : std::numeric_limits<double>::infinity();
  return {1.0 / std::sqrt(p.diffusion * t), s_tr};
}

double predict_conserved_profile(const PhenomParams& p, double t, double s) {
  p.validate();
  if (p.diffusion <= 0)
    throw std::invalid_argument("predict_conserved_profile: D must be > 0");
  double front = 1.5 * p.v_butterfly * t;
  if (s < 1.0 || s >= front)
    throw std::out_of_range("predict_conserved_profile: S out of [1, 3/2 v_B t)");
  double tail = p.v_butterfly / std::sqrt(p.diffusion) * std::pow(front - s, -1.5);
  if (p.epsilon > 0) tail *= std::exp(-p.epsilon * s * s / p.v_butterfly);
  return tail;
}

std::vector<double> integrate_eq6(
    const std::function<double(double, double)>& unitary_term,
    const std::function<double(double, double)>& width_model, double epsilon,
    const std::vector<double>& t_grid, double s0) {
  if (t_grid.empty()) throw std::invalid_argument("integrate_eq6: empty grid");
  for (size_t k = 1; k < t_grid.size(); ++k)
    if (t_grid[k] <= t_grid[k - 1])
      throw std::invalid_argument("integrate_eq6: grid must be increasing");

  auto rhs = [&](double t, double s) {
    double w = width_model(t, s);
    return unitary_term(t, s) - 2.0 * epsilon * w * w;
  };

  std::vector<double> out;
  out.reserve(t_grid.size());
  double s = s0;
  out.push_back(s);
  for (size_t k = 1; k < t_grid.size(); ++k) {
    double t0 = t_grid[k - 1];
    double span = t_grid[k] - t0;
    int substeps = std::max(1, static_cast<int>(std::ceil(span / 1e-3)));
    double h = span / substeps;
    for (int i = 0; i < substeps; ++i) {
      double t = t0 + i * h;
      double k1 = rhs(t, s);
      double k2 = rhs(t + h / 2, s + h / 2 * k1);
      double k3 = rhs(t + h / 2, s + h / 2 * k2);
      double k4 = rhs(t + h, s + h * k3);
      s += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!std::isfinite(s))
        throw std::runtime_error(
            "integrate_eq6: diverged; retry with a finer grid");
    }
    out.push_back(s);
  }
  return out;
}

double golden_rule_rate(double eta, double tau_th, double xi_th,
                        double mean_size, double prefactor) {
  if (eta < 0 || tau_th < 0 || xi_th < 0 || mean_size < 0 || prefactor < 0)
    throw std::invalid_argument("golden_rule_rate: negative input");
  return -prefactor * eta * eta * tau_th * xi_th * mean_size;
}

}  // namespace opgrowth
