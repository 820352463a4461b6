#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "opgrowth/ruc.hpp"
#include "opgrowth/size_stats.hpp"

using namespace opgrowth;

TEST_CASE("config validation") {
  CircuitConfig c;
  c.n = 1;
  c.layers = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n = 4;
  c.epsilon = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.epsilon = 0.1;
  c.trajectories = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.trajectories = 10;
  CHECK_NOTHROW(c.validate());
  CHECK(c.resolved_initial().to_string() == "IIXI");
}

TEST_CASE("gate transfer: identity is fixed, outputs uniform over 15") {
  Rng rng(1);
  CHECK(gate_transfer(0, rng) == 0);
  CHECK_THROWS_AS(gate_transfer(16, rng), std::invalid_argument);

  const int samples = 30000;
  std::vector<int> count(16, 0);
  for (int k = 0; k < samples; ++k) ++count[static_cast<size_t>(gate_transfer(5, rng))];
  CHECK(count[0] == 0);
  double expect = samples / 15.0;
  double sigma = std::sqrt(expect * (1.0 - 1.0 / 15.0));
  for (int o = 1; o < 16; ++o)
    CHECK(std::abs(count[static_cast<size_t>(o)] - expect) < 5 * sigma);
}

TEST_CASE("noise weight arithmetic") {
  Trajectory t{PauliString::parse("XYIZ"), 0.0, 3};
  apply_noise_layer(t, 0.1);
  CHECK(t.log_weight == doctest::Approx(6.0 * std::log(0.9)));
  apply_noise_layer(t, 0.0);
  CHECK(t.log_weight == doctest::Approx(6.0 * std::log(0.9)));
}

TEST_CASE("runs are deterministic in the seed") {
  CircuitConfig c;
  c.n = 12;
  c.layers = 8;
  c.trajectories = 64;
  c.seed = 77;
  c.epsilon = 0.02;
  GrowthCurve a = run(c), b = run(c);
  CHECK(a.mean_size == b.mean_size);
  CHECK(a.echo == b.echo);
  c.seed = 78;
  GrowthCurve d = run(c);
  CHECK(a.mean_size != d.mean_size);
}

TEST_CASE("windowed brickwork equals the plain per-layer stepping") {
  // The production fast path skips gates that cannot touch the operator;
  // it must consume the RNG stream identically to the unoptimized step.
  CircuitConfig c;
  c.n = 10;
  c.layers = 7;
  c.trajectories = 40;
  c.seed = 5;
  c.epsilon = 0.03;
  WeightedEnsemble fast = run_ensemble(c);

  for (int tr = 0; tr < c.trajectories; ++tr) {
    Rng rng = Rng::fork(c.seed, static_cast<uint64_t>(tr));
    std::vector<Trajectory> one{
        {c.resolved_initial(), 0.0, c.resolved_initial().size()}};
    for (int l = 0; l < c.layers; ++l)
      step_brickwork(one, l % 2, c.epsilon, c.n, rng);
    CHECK(one[0].string == fast.entries[static_cast<size_t>(tr)].first);
    CHECK(one[0].log_weight ==
          doctest::Approx(fast.entries[static_cast<size_t>(tr)].second));
  }
}

TEST_CASE("resampled run reduces to the naive run at epsilon = 0") {
  CircuitConfig c;
  c.n = 16;
  c.layers = 6;
  c.trajectories = 128;
  c.seed = 9;
  GrowthCurve naive = run(c);
  c.resample = true;
  GrowthCurve res = run(c);
  REQUIRE(naive.mean_size.size() == res.mean_size.size());
  for (size_t i = 0; i < naive.mean_size.size(); ++i) {
    CHECK(res.mean_size[i] == doctest::Approx(naive.mean_size[i]));
    CHECK(res.echo[i] == doctest::Approx(1.0));
  }
}

TEST_CASE("resampled run agrees with naive sampling where naive is reliable") {
  CircuitConfig c;
  c.n = 64;
  c.geometry = Geometry::all_to_all;
  c.layers = 6;
  c.trajectories = 3000;
  c.seed = 13;
  c.epsilon = 0.01;
  GrowthCurve naive = run(c);
  c.resample = true;
  c.seed = 14;  // independent streams; agreement must be statistical
  GrowthCurve res = run(c);
  for (size_t i = 0; i < naive.mean_size.size(); ++i) {
    double tol = 5.0 * std::hypot(naive.stderr_mean_size[i],
                                  res.stderr_mean_size[i]) + 1e-9;
    CHECK(std::abs(naive.mean_size[i] - res.mean_size[i]) < tol);
    if (naive.echo[i] > 0.05)
      CHECK(res.echo[i] == doctest::Approx(naive.echo[i]).epsilon(0.2));
  }
}

TEST_CASE("all-to-all Haar saturation at 3n/4") {
  CircuitConfig c;
  c.n = 12;
  c.geometry = Geometry::all_to_all;
  c.layers = 20;
  c.trajectories = 2000;
  c.seed = 3;
  GrowthCurve curve = run(c);
  // Stationary distribution is uniform over non-identity strings:
  // mean size = (3n/4) / (1 - 4^-n).
  double expect = 0.75 * c.n / (1.0 - std::pow(4.0, -c.n));
  double got = curve.mean_size.back();
  CHECK(std::abs(got - expect) < 5.0 * curve.stderr_mean_size.back());
}

TEST_CASE("first-order noise response equals the size-action covariance") {
  // d mean_size / d eps at eps = 0 is -2 Cov(S, int S) (weights are
  // exp(2 log(1-eps) int S)); check by finite difference with shared
  // trajectory randomness, which is exact up to O(eps^2).
  CircuitConfig c;
  c.n = 40;
  c.layers = 16;
  c.trajectories = 1500;
  c.seed = 101;
  GrowthCurve base = run(c);
  double eps = 2e-3;
  c.epsilon = eps;
  GrowthCurve pert = run(c);
  for (size_t i = 4; i < base.time.size(); i += 4) {
    double predicted = 2.0 * std::log1p(-eps) * base.cov_size_action[i];
    double actual = pert.mean_size[i] - base.mean_size[i];
    CHECK(actual == doctest::Approx(predicted).epsilon(0.05));
  }
}

namespace {

// Exact weighted Markov evolution over all 256 four-site Pauli strings,
// built independently of the trajectory sampler.
struct MarkovOracle {
  int n = 4;
  Eigen::MatrixXd gate(int i, int j) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(256, 256);
    for (int in = 0; in < 256; ++in) {
      int a = (in >> (2 * i)) & 3, b = (in >> (2 * j)) & 3;
      if (a == 0 && b == 0) {
        g(in, in) += 1.0;
        continue;
      }
      int rest = in & ~((3 << (2 * i)) | (3 << (2 * j)));
      for (int out = 1; out < 16; ++out) {
        int oa = out >> 2, ob = out & 3;
        int to = rest | (oa << (2 * i)) | (ob << (2 * j));
        g(to, in) += 1.0 / 15.0;
      }
    }
    return g;
  }
  static int string_size(int idx) {
    int s = 0;
    for (int k = 0; k < 4; ++k) s += ((idx >> (2 * k)) & 3) != 0;
    return s;
  }
  Eigen::VectorXd evolve(int layers, double eps) const {
    Eigen::VectorXd damp(256);
    for (int idx = 0; idx < 256; ++idx)
      damp[idx] = std::pow(1.0 - eps, string_size(idx));
    Eigen::MatrixXd even = gate(0, 1) * gate(2, 3);
    Eigen::MatrixXd odd = gate(1, 2);
    // X at site n/2 = 2 -> code 1 at position 2
    Eigen::VectorXd v = Eigen::VectorXd::Zero(256);
    v[1 << 4] = 1.0;
    for (int l = 0; l < layers; ++l) {
      v = damp.asDiagonal() * v;  // (1-eps)^{S_before}
      v = (l % 2 == 0 ? even : odd) * v;
      v = damp.asDiagonal() * v;  // (1-eps)^{S_after}
    }
    return v;
  }
  Eigen::VectorXd size_mass(int layers, double eps) const {
    Eigen::VectorXd v = evolve(layers, eps);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(5);
    for (int idx = 0; idx < 256; ++idx) mass[string_size(idx)] += v[idx];
    return mass;
  }
};

}  // namespace

TEST_CASE("trajectory sampler matches the exact 256-string Markov oracle") {
  MarkovOracle oracle;
  for (double eps : {0.0, 0.05}) {
    for (int layers : {2, 3, 4}) {
      CircuitConfig c;
      c.n = 4;
      c.layers = layers;
      c.trajectories = 20000;
      c.seed = 500 + layers;
      c.epsilon = eps;
      WeightedEnsemble ens = run_ensemble(c);

      // Monte-Carlo mass vector with a block stderr estimate.
      const int blocks = 20;
      const int per = c.trajectories / blocks;
      Eigen::MatrixXd block_mass = Eigen::MatrixXd::Zero(5, blocks);
      for (int b = 0; b < blocks; ++b)
        for (int k = 0; k < per; ++k) {
          const auto& [str, logw] = ens.entries[static_cast<size_t>(b * per + k)];
          block_mass(str.size(), b) += std::exp(logw) / per;
        }
      Eigen::VectorXd mc = block_mass.rowwise().mean();
      Eigen::VectorXd expect = oracle.size_mass(layers, eps);
      for (int s = 0; s <= 4; ++s) {
        double var = (block_mass.row(s).array() - mc[s]).square().sum() /
                     (blocks - 1) / blocks;
        double tol = 4.0 * std::sqrt(var) + 1e-12;
        INFO("eps=", eps, " layers=", layers, " S=", s);
        CHECK(std::abs(mc[s] - expect[s]) <= tol);
      }
    }
  }
}
