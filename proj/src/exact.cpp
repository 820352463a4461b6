#include "opgrowth/exact.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace opgrowth {

namespace {

constexpr int kMaxQubits = 10;

void check_n(int n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("exact engine: n must be in [1, 10]");
}

uint32_t low_bits(const std::vector<uint64_t>& words) {
  return words.empty() ? 0u : static_cast<uint32_t>(words[0]);
}

// Size of every Pauli string index, shared across the stats helpers.
std::vector<uint16_t> size_table(int n) {
  size_t dim = size_t(1) << (2 * n);
  std::vector<uint16_t> sizes(dim);
  uint32_t mask = (1u << n) - 1;
  for (size_t idx = 0; idx < dim; ++idx) {
    uint32_t x = static_cast<uint32_t>(idx) & mask;
    uint32_t z = static_cast<uint32_t>(idx >> n) & mask;
    sizes[idx] = static_cast<uint16_t>(std::popcount(x | z));
  }
  return sizes;
}

}  // namespace

int max_exact_qubits() { return kMaxQubits; }

uint32_t pauli_index(const PauliString& p) {
  check_n(p.n());
  return low_bits(p.x_words()) | (low_bits(p.z_words()) << p.n());
}

PauliString pauli_from_index(int n, uint32_t idx) {
  check_n(n);
  PauliString p(n);
  for (int i = 0; i < n; ++i) {
    uint8_t x = (idx >> i) & 1u;
    uint8_t z = (idx >> (n + i)) & 1u;
    p.set_site(i, static_cast<Pauli>(x | (z << 1)));
  }
  return p;
}

OperatorState OperatorState::from_pauli(const PauliString& p) {
  OperatorState s;
  s.n = p.n();
  s.coeffs = Eigen::VectorXd::Zero(int64_t(1) << (2 * p.n()));
  s.coeffs[pauli_index(p)] = 1.0;
  return s;
}

OperatorState OperatorState::from_terms(
    int n, const std::vector<std::pair<PauliString, double>>& terms,
    bool normalize) {
  check_n(n);
  OperatorState s;
  s.n = n;
  s.coeffs = Eigen::VectorXd::Zero(int64_t(1) << (2 * n));
  for (const auto& [p, g] : terms) {
    if (p.n() != n) throw std::invalid_argument("from_terms: length mismatch");
    s.coeffs[pauli_index(p)] += g;
  }
  if (normalize) {
    double norm = s.coeffs.norm();
    if (norm == 0.0) throw std::invalid_argument("from_terms: zero operator");
    s.coeffs /= norm;
  }
  return s;
}

HamiltonianSpec HamiltonianSpec::mixed_field_ising(int n, double J, double hx,
                                                   double hz) {
  HamiltonianSpec h;
  h.n = n;
  for (int i = 0; i + 1 < n; ++i) {
    PauliString zz(n);
    zz.set_site(i, Pauli::Z);
    zz.set_site(i + 1, Pauli::Z);
    h.terms.emplace_back(zz, J);
  }
  for (int i = 0; i < n; ++i)
    h.terms.emplace_back(PauliString::single(n, i, Pauli::X), hx);
  for (int i = 0; i < n; ++i)
    h.terms.emplace_back(PauliString::single(n, i, Pauli::Z), hz);
  return h;
}

HamiltonianSpec HamiltonianSpec::uniform_x(int n) {
  HamiltonianSpec h;
  h.n = n;
  for (int i = 0; i < n; ++i)
    h.terms.emplace_back(PauliString::single(n, i, Pauli::X), 1.0);
  return h;
}

HamiltonianSpec HamiltonianSpec::perturbed(const HamiltonianSpec& dh,
                                           double eta) const {
  if (dh.n != n) throw std::invalid_argument("perturbed: length mismatch");
  HamiltonianSpec out = *this;
  for (const auto& [p, g] : dh.terms) out.terms.emplace_back(p, eta * g);
  return out;
}

HamiltonianSpec HamiltonianSpec::random_chain(int n, Rng& rng) {
  HamiltonianSpec h;
  h.n = n;
  auto coupling = [&] { return 2.0 * rng.next_double() - 1.0; };
  auto rand_pauli = [&] { return static_cast<Pauli>(1 + rng.next_below(3)); };
  for (int i = 0; i + 1 < n; ++i) {
    PauliString p(n);
    p.set_site(i, rand_pauli());
    p.set_site(i + 1, rand_pauli());
    h.terms.emplace_back(p, coupling());
  }
  for (int i = 0; i < n; ++i)
    h.terms.emplace_back(PauliString::single(n, i, rand_pauli()), coupling());
  return h;
}

OperatorState HamiltonianSpec::local_energy_density() const {
  int c = n / 2;
  std::vector<std::pair<PauliString, double>> local;
  for (const auto& [p, g] : terms)
    if (p.site(c) != Pauli::I) local.emplace_back(p, g);
  if (local.empty())
    throw std::logic_error("local_energy_density: no terms touch the center");
  return OperatorState::from_terms(n, local, /*normalize=*/true);
}

Generator::Generator(int n, const HamiltonianSpec& h, const LindbladSpec& l)
    : n_(n) {
  check_n(n);
  if (h.n != 0 && h.n != n)
    throw std::invalid_argument("Generator: Hamiltonian length mismatch");
  const size_t dim = size_t(1) << (2 * n);
  const uint32_t site_mask = (1u << n) - 1;

  terms_.reserve(h.terms.size());
  for (const auto& [q, g] : h.terms) {
    if (q.is_identity() || g == 0.0) continue;
    uint32_t qx = low_bits(q.x_words());
    uint32_t qz = low_bits(q.z_words());
    int yq = std::popcount(qx & qz);
    Term term;
    term.mask = qx | (qz << n);
    term.scale = 2.0 * g;
    term.sign.resize(dim, 0);
    for (size_t idx = 0; idx < dim; ++idx) {
      uint32_t rx = static_cast<uint32_t>(idx) & site_mask;
      uint32_t rz = static_cast<uint32_t>(idx >> n) & site_mask;
      int sym = std::popcount(qx & rz) + std::popcount(qz & rx);
      if ((sym & 1) == 0) continue;  // commuting: no contribution
      // i[Q, R] = 2 i^{k+1} (Q R) with Q R = i^k C; k is odd here.
      int yr = std::popcount(rx & rz);
      int yc = std::popcount((qx ^ rx) & (qz ^ rz));
      int k = ((yq + yr + 2 * std::popcount(qz & rx) - yc) % 4 + 4) % 4;
      term.sign[idx] = (k == 1) ? int8_t(-1) : int8_t(1);
    }
    terms_.push_back(std::move(term));
  }

  diag_ = Eigen::VectorXd::Zero(static_cast<int64_t>(dim));
  if (l.effective_size_model) {
    if (l.epsilon < 0) throw std::invalid_argument("Generator: negative epsilon");
    auto sizes = size_table(n);
    for (size_t idx = 0; idx < dim; ++idx)
      diag_[static_cast<int64_t>(idx)] = -l.epsilon * sizes[idx];
  } else {
    for (const auto& [jump, rate] : l.jump_ops) {
      if (rate < 0) throw std::invalid_argument("Generator: negative rate");
      if (jump.n() != n)
        throw std::invalid_argument("Generator: jump operator length mismatch");
      uint32_t jx = low_bits(jump.x_words());
      uint32_t jz = low_bits(jump.z_words());
      for (size_t idx = 0; idx < dim; ++idx) {
        uint32_t rx = static_cast<uint32_t>(idx) & site_mask;
        uint32_t rz = static_cast<uint32_t>(idx >> n) & site_mask;
        int sym = std::popcount(jx & rz) + std::popcount(jz & rx);
        if (sym & 1) diag_[static_cast<int64_t>(idx)] -= 2.0 * rate;
      }
    }
  }
}

void Generator::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out = diag_.cwiseProduct(in);
  const auto dim = in.size();
  for (const auto& term : terms_) {
    const int8_t* sign = term.sign.data();
    const double s = term.scale;
    const uint32_t m = term.mask;
    for (int64_t idx = 0; idx < dim; ++idx) {
      if (sign[idx]) out[static_cast<int64_t>(idx ^ m)] += s * sign[idx] * in[idx];
    }
  }
}

namespace {

// Dormand-Prince 4(5) with standard PI-free step control.
void integrate_rk45(const Generator& gen, Eigen::VectorXd& y, double t_total,
                    double tol) {
  if (t_total < 0) throw std::invalid_argument("evolve: negative time");
  if (tol <= 0) throw std::invalid_argument("evolve: tol must be > 0");
  if (t_total == 0) return;

  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  Eigen::VectorXd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
      k5(y.size()), k6(y.size()), k7(y.size()), tmp(y.size()), ynew(y.size());

  double t = 0.0;
  double h = std::min(t_total, 0.01);
  const double atol = 1e-12;
  int rejects_in_a_row = 0;
  while (t < t_total) {
    h = std::min(h, t_total - t);
    gen.apply(y, k1);
    tmp = y + h * a21 * k1;
    gen.apply(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    gen.apply(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    gen.apply(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    gen.apply(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    gen.apply(tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    gen.apply(ynew, k7);
    tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double scale = atol + tol * std::max(y.norm(), ynew.norm());
    double err = tmp.norm() / scale;
    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      rejects_in_a_row = 0;
      h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (++rejects_in_a_row > 50)
        throw std::runtime_error("evolve: integrator failed to meet tolerance");
    }
    if (h < 1e-14 * t_total)
      throw std::runtime_error("evolve: step size underflow");
  }
}

}  // namespace

OperatorState evolve(const OperatorState& state, const HamiltonianSpec& h,
                     const LindbladSpec& l, double t, double tol) {
  check_n(state.n);
  Generator gen(state.n, h, l);
  OperatorState out = state;
  integrate_rk45(gen, out.coeffs, t, tol);
  return out;
}

double echo(const OperatorState& state) { return state.coeffs.squaredNorm(); }

SizeDistribution size_distribution(const OperatorState& state) {
  check_n(state.n);
  auto sizes = size_table(state.n);
  Eigen::ArrayXd mass = Eigen::ArrayXd::Zero(state.n + 1);
  for (int64_t idx = 0; idx < state.coeffs.size(); ++idx)
    mass[sizes[static_cast<size_t>(idx)]] +=
        state.coeffs[idx] * state.coeffs[idx];
  return SizeDistribution(state.n, std::move(mass));
}

std::map<SitePauli, double> single_site_otocs(const OperatorState& state) {
  check_n(state.n);
  const int n = state.n;
  double norm = echo(state);
  if (norm <= 0.0) throw std::domain_error("single_site_otocs: zero operator");

  // Per site, mass grouped by the local Pauli code.
  std::vector<std::array<double, 4>> by_code(static_cast<size_t>(n),
                                             {0.0, 0.0, 0.0, 0.0});
  for (int64_t idx = 0; idx < state.coeffs.size(); ++idx) {
    double m = state.coeffs[idx] * state.coeffs[idx];
    if (m == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      int code = ((idx >> i) & 1) | (((idx >> (n + i)) & 1) << 1);
      by_code[static_cast<size_t>(i)][static_cast<size_t>(code)] += m;
    }
  }

  std::map<SitePauli, double> out;
  for (int i = 0; i < n; ++i) {
    const auto& a = by_code[static_cast<size_t>(i)];
    // P anticommutes with the local codes that are non-identity and != P.
    out[{i, Pauli::X}] = (norm - 2.0 * (a[2] + a[3])) / norm;
    out[{i, Pauli::Z}] = (norm - 2.0 * (a[1] + a[3])) / norm;
    out[{i, Pauli::Y}] = (norm - 2.0 * (a[1] + a[2])) / norm;
  }
  return out;
}

EvolutionTrace evolve_trace(const OperatorState& state, const HamiltonianSpec& h,
                            const LindbladSpec& l, double t_max, double dt,
                            double tol) {
  check_n(state.n);
  if (dt <= 0 || t_max < 0) throw std::invalid_argument("evolve_trace: bad grid");
  Generator gen(state.n, h, l);
  auto sizes = size_table(state.n);

  Eigen::VectorXd y = state.coeffs;
  EvolutionTrace trace;
  int steps = static_cast<int>(std::round(t_max / dt));
  auto record = [&](double t) {
    double norm = 0, s1 = 0, s2 = 0;
    for (int64_t idx = 0; idx < y.size(); ++idx) {
      double m = y[idx] * y[idx];
      double s = sizes[static_cast<size_t>(idx)];
      norm += m;
      s1 += s * m;
      s2 += s * s * m;
    }
    double mean = s1 / norm;
    trace.time.push_back(t);
    trace.echo.push_back(norm);
    trace.mean_size.push_back(mean);
    trace.var_size.push_back(std::max(0.0, s2 / norm - mean * mean));
  };
  record(0.0);
  for (int k = 1; k <= steps; ++k) {
    integrate_rk45(gen, y, dt, tol);
    record(k * dt);
  }
  return trace;
}

namespace {

double max_residual(const EvolutionTrace& trace,
                    const std::vector<double>& lhs_series,
                    const std::vector<double>& rhs_series) {
  size_t k_max = trace.time.size();
  if (k_max < 3) throw std::invalid_argument("residual check: grid too short");
  double res = 0.0;
  for (size_t k = 1; k + 1 < k_max; ++k) {
    double dt = (trace.time[k + 1] - trace.time[k - 1]) / 2.0;
    double deriv = (lhs_series[k + 1] - lhs_series[k - 1]) / (2.0 * dt);
    res = std::max(res, std::abs(deriv + rhs_series[k]));
  }
  return res;
}

}  // namespace

double check_eq5(const EvolutionTrace& trace, double epsilon) {
  std::vector<double> log_n(trace.echo.size());
  std::vector<double> rate(trace.echo.size());
  for (size_t k = 0; k < trace.echo.size(); ++k) {
    log_n[k] = std::log(trace.echo[k]);
    rate[k] = 2.0 * epsilon * trace.mean_size[k];
  }
  return max_residual(trace, log_n, rate);
}

double check_eq6(const EvolutionTrace& trace, double epsilon) {
  std::vector<double> rate(trace.var_size.size());
  for (size_t k = 0; k < trace.var_size.size(); ++k)
    rate[k] = 2.0 * epsilon * trace.var_size[k];
  return max_residual(trace, trace.mean_size, rate);
}

Eigen::MatrixXd otoc_profile(const OperatorState& m, const HamiltonianSpec& h1,
                             const HamiltonianSpec& h2,
                             const std::vector<double>& times,
                             const std::vector<int>& sites,
                             OtocNormalization norm_kind, double tol) {
  check_n(m.n);
  if (h1.n != m.n || h2.n != m.n)
    throw std::invalid_argument("otoc_profile: Hamiltonian length mismatch");
  for (size_t k = 1; k < times.size(); ++k)
    if (times[k] <= times[k - 1])
      throw std::invalid_argument("otoc_profile: times must be increasing");
  for (int s : sites)
    if (s < 0 || s >= m.n) throw std::invalid_argument("otoc_profile: bad site");

  Generator g1(m.n, h1, LindbladSpec::none());
  Generator g2(m.n, h2, LindbladSpec::none());
  Eigen::VectorXd y1 = m.coeffs, y2 = m.coeffs;
  Eigen::MatrixXd out(static_cast<int64_t>(sites.size()),
                      static_cast<int64_t>(times.size()));

  double t_prev = 0.0;
  const int n = m.n;
  for (size_t tk = 0; tk < times.size(); ++tk) {
    integrate_rk45(g1, y1, times[tk] - t_prev, tol);
    integrate_rk45(g2, y2, times[tk] - t_prev, tol);
    t_prev = times[tk];

    double cross = y1.dot(y2);
    double norm =
        norm_kind == OtocNormalization::cross ? cross : y1.squaredNorm();
    for (size_t sk = 0; sk < sites.size(); ++sk) {
      int i = sites[sk];
      std::array<double, 4> a{0, 0, 0, 0};
      for (int64_t idx = 0; idx < y1.size(); ++idx) {
        int code = ((idx >> i) & 1) | (((idx >> (n + i)) & 1) << 1);
        a[static_cast<size_t>(code)] += y1[idx] * y2[idx];
      }
      // Summed over {I,X,Y,Z}, each code's contribution cancels except the
      // local-identity mass: (1/4) sum_P <M1 P M2 P> = A_I.
      double val = cross - (a[1] + a[2] + a[3]);
      out(static_cast<int64_t>(sk), static_cast<int64_t>(tk)) = val / norm;
    }
  }
  return out;
}

}  // namespace opgrowth
