#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "opgrowth/phenom.hpp"

using namespace opgrowth;

namespace {

PhenomParams params_1d() {
  PhenomParams p;
  p.v_butterfly = 0.6;
  p.width_coeff = 2.0;
  p.epsilon = 0.01;
  return p;
}

PhenomParams params_a2a() {
  PhenomParams p;
  p.lyapunov = 0.57;
  p.rel_width = 0.9;
  p.epsilon = 0.003;
  return p;
}

}  // namespace

TEST_CASE("1D closed form against direct numerical integration") {
  PhenomParams p = params_1d();
  // dS/dt = (3/2) v_B - 2 eps dS^2 with dS^2 = (c/2) v_B t reproduces
  // S = (3/2) v_B t - (c/2) eps v_B t^2.
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.5 * k);
  std::vector<double> s = integrate_eq6(
      [&](double, double) { return 1.5 * p.v_butterfly; },
      [&](double t, double) {
        return std::sqrt(0.5 * p.width_coeff * p.v_butterfly * t);
      },
      p.epsilon, grid, 0.0);
  for (size_t k = 0; k < grid.size(); ++k)
    CHECK(s[k] == doctest::Approx(predict_1d(p, grid[k]).mean_size)
                      .epsilon(1e-6));
}

TEST_CASE("1D echo: closed form, leading Gaussian, conventions") {
  PhenomParams p = params_1d();
  double t = 8.0;
  auto mass = predict_1d(p, t, EchoConvention::mass);
  auto amp = predict_1d(p, t, EchoConvention::amplitude);
  CHECK(mass.echo == doctest::Approx(amp.echo * amp.echo));
  CHECK(mass.mean_size == doctest::Approx(amp.mean_size));

  // Leading Gaussian dominates the full form (the cubic term only adds).
  CHECK(predict_1d_echo_leading(p, t) <= mass.echo);
  PhenomParams p0 = p;
  p0.epsilon = 0.0;
  CHECK(predict_1d(p0, t).echo == doctest::Approx(1.0));
  CHECK(predict_1d(p0, t).mean_size ==
        doctest::Approx(1.5 * p.v_butterfly * t));
  CHECK_THROWS_AS(predict_1d(p, -1.0), std::invalid_argument);
}

TEST_CASE("all-to-all logistic solution satisfies its own ODE") {
  PhenomParams p = params_a2a();
  double b2 = p.rel_width * p.rel_width;
  for (double t : {0.5, 3.0, 9.0, 20.0}) {
    double h = 1e-5;
    double sp = predict_all_to_all(p, t + h).mean_size;
    double sm = predict_all_to_all(p, t - h).mean_size;
    double s = predict_all_to_all(p, t).mean_size;
    double lhs = (sp - sm) / (2 * h);
    double rhs = p.lyapunov * s - p.epsilon * b2 * s * s;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
    // echo satisfies d log N / dt = -2 eps S (mass convention)
    double np = std::log(predict_all_to_all(p, t + h).echo);
    double nm = std::log(predict_all_to_all(p, t - h).echo);
    CHECK((np - nm) / (2 * h) == doctest::Approx(-2.0 * p.epsilon * s)
                                     .epsilon(1e-5));
  }
  AllToAllPrediction pr = predict_all_to_all(p, 1.0);
  CHECK(pr.plateau_size == doctest::Approx(p.lyapunov / (p.epsilon * b2)));
  // At late times the size sits on the plateau.
  CHECK(predict_all_to_all(p, 60.0).mean_size ==
        doctest::Approx(pr.plateau_size).epsilon(1e-6));
}

TEST_CASE("all-to-all noiseless limit: pure exponential, echo 1") {
  PhenomParams p = params_a2a();
  p.epsilon = 0.0;
  auto pr = predict_all_to_all(p, 4.0);
  CHECK(pr.mean_size == doctest::Approx(std::exp(4.0 * p.lyapunov)));
  CHECK(pr.echo == doctest::Approx(1.0));
  CHECK(std::isinf(pr.plateau_size));
}

TEST_CASE("N* predictions") {
  PhenomParams p = params_1d();
  CHECK(predict_nstar(p, PhenomGeometry::one_dimensional, 2.0) ==
        doctest::Approx(std::exp(-2.0 * p.v_butterfly / p.epsilon)));
  p.rel_width = 0.8;
  CHECK(predict_nstar(p, PhenomGeometry::all_to_all) ==
        doctest::Approx(std::exp(-1.0 / 0.64)));
  p.epsilon = 0.0;
  CHECK_THROWS_AS(predict_nstar(p, PhenomGeometry::one_dimensional),
                  std::invalid_argument);
}

TEST_CASE("conserved profile: delta decay, truncation, domain") {
  PhenomParams p;
  p.v_butterfly = 1.0;
  p.diffusion = 2.0;
  p.epsilon = 0.01;
  ConservedProfile a = conserved_profile_summary(p, 4.0);
  ConservedProfile b = conserved_profile_summary(p, 16.0);
  CHECK(a.delta_mass == doctest::Approx(1.0 / std::sqrt(2.0 * 4.0)));
  CHECK(a.delta_mass / b.delta_mass == doctest::Approx(2.0));  // t^{-1/2}
  CHECK(a.truncation_size == doctest::Approx(std::sqrt(1.0 / 0.01)));

  double t = 10.0;
  CHECK_THROWS_AS(predict_conserved_profile(p, t, 0.5), std::out_of_range);
  CHECK_THROWS_AS(predict_conserved_profile(p, t, 1.5 * t), std::out_of_range);
  // noise suppresses the tail beyond the truncation size
  PhenomParams p0 = p;
  p0.epsilon = 0.0;
  double s_big = 14.0;
  CHECK(predict_conserved_profile(p, t, s_big) <
        predict_conserved_profile(p0, t, s_big));
  CHECK(predict_conserved_profile(p, t, s_big) ==
        doctest::Approx(predict_conserved_profile(p0, t, s_big) *
                        std::exp(-p.epsilon * s_big * s_big)));
}

TEST_CASE("integrate_eq6 input validation and divergence reporting") {
  auto zero = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(integrate_eq6(zero, zero, 0.1, {}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_eq6(zero, zero, 0.1, {0.0, 1.0, 0.5}, 1.0),
                  std::invalid_argument);
  auto blow_up = [](double, double s) { return s * s * s; };
  CHECK_THROWS_AS(
      integrate_eq6(blow_up, zero, 0.0, {0.0, 50.0}, 2.0),
      std::runtime_error);
}

TEST_CASE("golden rule rate") {
  CHECK(golden_rule_rate(0.1, 2.0, 3.0, 10.0) ==
        doctest::Approx(-0.01 * 2.0 * 3.0 * 10.0));
  CHECK(golden_rule_rate(0.1, 2.0, 3.0, 10.0, 0.5) ==
        doctest::Approx(-0.5 * 0.01 * 2.0 * 3.0 * 10.0));
  CHECK_THROWS_AS(golden_rule_rate(-0.1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  PhenomParams p;
  p.v_butterfly = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
