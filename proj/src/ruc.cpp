#include "opgrowth/ruc.hpp"

#include <cmath>
#include <stdexcept>

namespace opgrowth {

void CircuitConfig::validate() const {
  if (n < 2) throw std::invalid_argument("CircuitConfig: n must be >= 2");
  if (epsilon < 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("CircuitConfig: epsilon must be in [0, 1)");
  if (layers < 0) throw std::invalid_argument("CircuitConfig: negative layers");
  if (trajectories < 1)
    throw std::invalid_argument("CircuitConfig: trajectories must be >= 1");
  if (initial_operator.n() != 0 && initial_operator.n() != n)
    throw std::invalid_argument("CircuitConfig: initial operator length mismatch");
  // Resource guard: trajectories are cheap but not free.
  if (static_cast<double>(n) * trajectories > 5e8)
    throw std::invalid_argument("CircuitConfig: n*trajectories exceeds memory budget");
}

PauliString CircuitConfig::resolved_initial() const {
  if (initial_operator.n() == n) return initial_operator;
  return PauliString::single(n, n / 2, Pauli::X);
}

int CircuitConfig::resolved_gates_per_unit_time() const {
  return gates_per_unit_time > 0 ? gates_per_unit_time : n / 2;
}

int gate_transfer(int pair_code, Rng& rng) {
  if (pair_code < 0 || pair_code > 15)
    throw std::invalid_argument("gate_transfer: bad pair code");
  if (pair_code == 0) return 0;
  return 1 + static_cast<int>(rng.next_below(15));
}

void apply_noise_layer(Trajectory& traj, double epsilon) {
  traj.log_weight += 2.0 * traj.size * std::log1p(-epsilon);
}

namespace {

// Applies one gate to sites (i, j); RNG is consumed only for non-identity
// inputs, so skipping identity pairs leaves the stream unchanged.
inline void apply_gate(Trajectory& t, int i, int j, Rng& rng) {
  int a = static_cast<int>(t.string.site(i));
  int b = static_cast<int>(t.string.site(j));
  int in = a * 4 + b;
  if (in == 0) return;
  int out = gate_transfer(in, rng);
  int ao = out >> 2, bo = out & 3;
  t.string.set_site(i, static_cast<Pauli>(ao));
  t.string.set_site(j, static_cast<Pauli>(bo));
  t.size += (ao != 0) + (bo != 0) - (a != 0) - (b != 0);
}

struct Window {
  int lo, hi;  // conservative non-identity bounds
  void grow(int i) {
    if (i < lo) lo = i;
    if (i > hi) hi = i;
  }
};

void step_brickwork_windowed(Trajectory& t, int parity, double epsilon, int n,
                             Rng& rng, Window& w) {
  int size_before = t.size;
  int first = parity;
  // Only gates touching [lo, hi] can act nontrivially.
  int start = std::max(first, ((w.lo - 1 - first) / 2) * 2 + first);
  if (start < first) start = first;
  for (int i = start; i + 1 < n && i <= w.hi; i += 2) {
    if (i + 1 < w.lo || i > w.hi) continue;
    int before = t.size;
    apply_gate(t, i, i + 1, rng);
    if (t.size != before || t.string.site(i) != Pauli::I ||
        t.string.site(i + 1) != Pauli::I) {
      if (t.string.site(i) != Pauli::I || t.string.site(i + 1) != Pauli::I) {
        w.grow(i);
        w.grow(i + 1);
      }
    }
  }
  // Noise weight is split symmetrically around the gate layer so the
  // accumulated log-weight is the trapezoid of 2 S(t') log(1-eps), matching
  // the continuum-time damping of the layer's midpoint.
  t.log_weight += (size_before + t.size) * std::log1p(-epsilon);
}

void step_all_to_all_one(Trajectory& t, double epsilon, int n, int gates,
                         Rng& rng) {
  double per_gate = 2.0 * std::log1p(-epsilon) / gates;
  for (int g = 0; g < gates; ++g) {
    int i = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    int j = static_cast<int>(rng.next_below(static_cast<uint64_t>(n - 1)));
    if (j >= i) ++j;
    apply_gate(t, i, j, rng);
    t.log_weight += per_gate * t.size;
  }
}

}  // namespace

void step_brickwork(std::vector<Trajectory>& trajs, int parity, double epsilon,
                    int n, Rng& rng) {
  for (auto& t : trajs) {
    int size_before = t.size;
    for (int i = parity; i + 1 < n; i += 2) apply_gate(t, i, i + 1, rng);
    t.log_weight += (size_before + t.size) * std::log1p(-epsilon);
  }
}

void step_all_to_all(std::vector<Trajectory>& trajs, double epsilon, int n,
                     int gates, Rng& rng) {
  for (auto& t : trajs) step_all_to_all_one(t, epsilon, n, gates, rng);
}

namespace {

struct TimeAccum {
  double w = 0, ws = 0, ws2 = 0, w2 = 0, wa = 0, wsa = 0;
};

void accumulate_run(const CircuitConfig& config,
                    std::vector<std::vector<TimeAccum>>* block_sums,
                    WeightedEnsemble* final_ensemble) {
  const int n = config.n;
  const int layers = config.layers;
  const PauliString init = config.resolved_initial();
  const bool all2all = config.geometry == Geometry::all_to_all;
  const int gates = all2all ? config.resolved_gates_per_unit_time() : 0;
  constexpr int kBlock = 64;
  const int n_blocks = (config.trajectories + kBlock - 1) / kBlock;

  if (block_sums)
    block_sums->assign(static_cast<size_t>(n_blocks),
                       std::vector<TimeAccum>(static_cast<size_t>(layers + 1)));
  if (final_ensemble) {
    final_ensemble->n = n;
    final_ensemble->entries.reserve(static_cast<size_t>(config.trajectories));
  }

  for (int tr = 0; tr < config.trajectories; ++tr) {
    Rng rng = Rng::fork(config.seed, static_cast<uint64_t>(tr));
    Trajectory traj{init, 0.0, init.size()};
    Window w{0, n - 1};
    if (!all2all) {
      // Tight initial window for the fast path.
      w = {n, -1};
      for (int i = 0; i < n; ++i)
        if (init.site(i) != Pauli::I) {
          if (i < w.lo) w.lo = i;
          if (i > w.hi) w.hi = i;
        }
      if (w.hi < 0) w = {0, 0};
    }
    double action = 0.0;  // trapezoid of S over time (dt = 1 per layer)
    auto record = [&](int layer) {
      if (!block_sums) return;
      double wt = std::exp(traj.log_weight);
      double s = traj.size;
      TimeAccum& a = (*block_sums)[static_cast<size_t>(tr / kBlock)]
                                  [static_cast<size_t>(layer)];
      a.w += wt;
      a.ws += wt * s;
      a.ws2 += wt * s * s;
      a.w2 += wt * wt;
      a.wa += wt * action;
      a.wsa += wt * s * action;
    };
    record(0);
    for (int l = 0; l < layers; ++l) {
      int size_before = traj.size;
      if (all2all)
        step_all_to_all_one(traj, config.epsilon, n, gates, rng);
      else
        step_brickwork_windowed(traj, l % 2, config.epsilon, n, rng, w);
      action += 0.5 * (size_before + traj.size);
      record(l + 1);
    }
    if (final_ensemble)
      final_ensemble->entries.emplace_back(traj.string, traj.log_weight);
  }
}

GrowthCurve run_resampled(const CircuitConfig& config) {
  const int n = config.n;
  const int layers = config.layers;
  const int m = config.trajectories;
  const PauliString init = config.resolved_initial();
  const bool all2all = config.geometry == Geometry::all_to_all;
  const int gates = all2all ? config.resolved_gates_per_unit_time() : 0;

  struct Slot {
    Trajectory traj;
    Window window;
    double action = 0.0;
  };
  std::vector<Slot> slots(static_cast<size_t>(m));
  std::vector<Rng> rngs;
  rngs.reserve(static_cast<size_t>(m));
  Window init_window{0, n - 1};
  if (!all2all) {
    init_window = {n, -1};
    for (int i = 0; i < n; ++i)
      if (init.site(i) != Pauli::I) init_window.grow(i);
    if (init_window.hi < 0) init_window = {0, 0};
  }
  for (int tr = 0; tr < m; ++tr) {
    slots[static_cast<size_t>(tr)] = {{init, 0.0, init.size()}, init_window, 0.0};
    rngs.push_back(Rng::fork(config.seed, static_cast<uint64_t>(tr)));
  }
  Rng resampler = Rng::fork(config.seed, static_cast<uint64_t>(m));

  GrowthCurve curve;
  double log_echo = 0.0;
  std::vector<double> weights(static_cast<size_t>(m));
  auto record = [&](int layer) {
    double w = 0, ws = 0, ws2 = 0, w2 = 0, wa = 0, wsa = 0;
    for (int i = 0; i < m; ++i) {
      const Slot& sl = slots[static_cast<size_t>(i)];
      double wt = std::exp(sl.traj.log_weight);
      weights[static_cast<size_t>(i)] = wt;
      double s = sl.traj.size;
      w += wt;
      ws += wt * s;
      ws2 += wt * s * s;
      w2 += wt * wt;
      wa += wt * sl.action;
      wsa += wt * s * sl.action;
    }
    double mean = ws / w;
    double var = std::max(0.0, ws2 / w - mean * mean);
    double m_eff = w * w / w2;
    curve.time.push_back(layer);
    curve.mean_size.push_back(mean);
    curve.variance.push_back(var);
    curve.echo.push_back(std::exp(log_echo) * (w / m));
    curve.stderr_mean_size.push_back(std::sqrt(var / std::max(1.0, m_eff)));
    curve.cov_size_action.push_back(wsa / w - mean * (wa / w));
    return w;
  };

  record(0);
  for (int l = 0; l < layers; ++l) {
    for (int i = 0; i < m; ++i) {
      Slot& sl = slots[static_cast<size_t>(i)];
      int size_before = sl.traj.size;
      if (all2all)
        step_all_to_all_one(sl.traj, config.epsilon, n, gates,
                            rngs[static_cast<size_t>(i)]);
      else
        step_brickwork_windowed(sl.traj, l % 2, config.epsilon, n,
                                rngs[static_cast<size_t>(i)], sl.window);
      sl.action += 0.5 * (size_before + sl.traj.size);
    }
    double w_total = record(l + 1);

    // Systematic resampling: slot i keeps its own RNG stream, so duplicated
    // trajectories decorrelate immediately after the copy.
    log_echo += std::log(w_total / m);
    double u = (resampler.next_double() + 0.0) / m;
    std::vector<Slot> next;
    next.reserve(static_cast<size_t>(m));
    double cum = 0.0;
    int k = 0;
    for (int i = 0; i < m && k < m; ++i) {
      cum += weights[static_cast<size_t>(i)] / w_total;
      while (k < m && u + static_cast<double>(k) / m < cum) {
        next.push_back(slots[static_cast<size_t>(i)]);
        next.back().traj.log_weight = 0.0;
        ++k;
      }
    }
    while (k < m) {  // numerical slack at the far end of the CDF
      next.push_back(slots.back());
      next.back().traj.log_weight = 0.0;
      ++k;
    }
    slots = std::move(next);
  }
  return curve;
}

}  // namespace

GrowthCurve run(const CircuitConfig& config) {
  config.validate();
  if (config.resample) return run_resampled(config);
  std::vector<std::vector<TimeAccum>> block_sums;
  accumulate_run(config, &block_sums, nullptr);

  const int points = config.layers + 1;
  const double m = config.trajectories;
  GrowthCurve curve;
  curve.time.resize(static_cast<size_t>(points));
  curve.mean_size.resize(static_cast<size_t>(points));
  curve.variance.resize(static_cast<size_t>(points));
  curve.echo.resize(static_cast<size_t>(points));
  curve.stderr_mean_size.resize(static_cast<size_t>(points));
  curve.cov_size_action.resize(static_cast<size_t>(points));

  for (int p = 0; p < points; ++p) {
    TimeAccum tot;
    for (const auto& blk : block_sums) {
      tot.w += blk[static_cast<size_t>(p)].w;
      tot.ws += blk[static_cast<size_t>(p)].ws;
      tot.ws2 += blk[static_cast<size_t>(p)].ws2;
      tot.w2 += blk[static_cast<size_t>(p)].w2;
      tot.wa += blk[static_cast<size_t>(p)].wa;
      tot.wsa += blk[static_cast<size_t>(p)].wsa;
    }
    double mean = tot.ws / tot.w;
    double var = std::max(0.0, tot.ws2 / tot.w - mean * mean);
    double m_eff = tot.w * tot.w / tot.w2;  // Kish effective sample size
    curve.time[static_cast<size_t>(p)] = p;
    curve.mean_size[static_cast<size_t>(p)] = mean;
    curve.variance[static_cast<size_t>(p)] = var;
    curve.echo[static_cast<size_t>(p)] = tot.w / m;
    curve.stderr_mean_size[static_cast<size_t>(p)] =
        std::sqrt(var / std::max(1.0, m_eff));
    curve.cov_size_action[static_cast<size_t>(p)] =
        tot.wsa / tot.w - mean * (tot.wa / tot.w);
  }
  return curve;
}

WeightedEnsemble run_ensemble(const CircuitConfig& config) {
  config.validate();
  WeightedEnsemble out;
  accumulate_run(config, nullptr, &out);
  return out;
}

}  // namespace opgrowth
