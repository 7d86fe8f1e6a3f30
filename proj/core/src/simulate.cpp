#include "hopfdelay/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "hopfdelay/errors.hpp"
#include "overloaded.hpp"

namespace hopfdelay {
namespace {

constexpr double kStateFloor = 1e-12;
constexpr double kEquilibriumBand = 1e-5;
constexpr double kCycleSpread = 0.02;
constexpr std::size_t kMinPeriods = 5;

// Fixed-capacity history with every value stored twice, so the most recent
// `capacity` values are always contiguous in memory ending at newest().
class HistoryRing {
 public:
  HistoryRing(std::size_t capacity, double fill)
      : buf_(2 * capacity, fill), cap_(capacity) {}

  void push(double v) {
    pos_ = (pos_ + 1) % cap_;
    buf_[pos_] = v;
    buf_[pos_ + cap_] = v;
  }

  /// newest()[-j] is the value pushed j pushes ago, j < capacity.
  const double* newest() const { return buf_.data() + pos_ + cap_; }

 private:
  std::vector<double> buf_;
  std::size_t cap_;
  std::size_t pos_ = 0;
};

// Sum over lags j = 1..M of weight[j] * history[shift - j], where
// history[0] is the newest entry. Weights are stored reversed so the inner
// loop runs forward over memory.
class LaggedSum {
 public:
  explicit LaggedSum(const DiscretizedKernel& dk)
      : lags_(dk.max_lag_steps), reversed_(dk.max_lag_steps, 0.0) {
    for (const auto& node : dk.nodes) {
      if (node.lag_steps == 0) {
        instant_weight_ += node.weight;
      } else {
        reversed_[lags_ - node.lag_steps] += node.weight;
      }
    }
  }

  double instant_weight() const { return instant_weight_; }
  std::size_t lags() const { return lags_; }

  double operator()(const double* newest, std::ptrdiff_t shift) const {
    if (lags_ == 0) return 0.0;
    const double* x = newest + shift - static_cast<std::ptrdiff_t>(lags_);
    const double* w = reversed_.data();
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= lags_; i += 4) {
      acc0 += w[i] * x[i];
      acc1 += w[i + 1] * x[i + 1];
      acc2 += w[i + 2] * x[i + 2];
      acc3 += w[i + 3] * x[i + 3];
    }
    for (; i < lags_; ++i) acc0 += w[i] * x[i];
    return (acc0 + acc1) + (acc2 + acc3);
  }

 private:
  std::size_t lags_;
  std::vector<double> reversed_;
  double instant_weight_ = 0.0;
};

double characteristic_lag(const DelayKernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Dirac& k) { return k.tau; },
          [](const Uniform& k) { return k.tau_max; },
          [](const Gamma& k) { return k.k / k.beta; },
          [](const Discrete& k) { return k.tau; },
      },
      kernel);
}

struct Extremum {
  double time;
  double value;
};

// Three-point extrema with parabolic refinement of time and value.
std::vector<Extremum> find_extrema(const std::vector<double>& t,
                                   const std::vector<double>& s,
                                   std::size_t first, bool maxima, double dt) {
  std::vector<Extremum> out;
  const double sign = maxima ? 1.0 : -1.0;
  for (std::size_t i = std::max<std::size_t>(first, 1); i + 1 < s.size(); ++i) {
    const double ym = sign * s[i - 1];
    const double y0 = sign * s[i];
    const double yp = sign * s[i + 1];
    if (!(y0 > ym && y0 >= yp)) continue;
    const double curvature = ym - 2.0 * y0 + yp;
    double offset = 0.0;
    double value = y0;
    if (curvature < 0.0) {
      offset = 0.5 * (ym - yp) / curvature;
      value = y0 - 0.25 * (ym - yp) * offset;
    }
    out.push_back({t[i] + offset * dt, sign * value});
  }
  return out;
}

double mean_value(const std::vector<Extremum>& xs) {
  double sum = 0.0;
  for (const auto& x : xs) sum += x.value;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

const char* verdict_name(CycleVerdict v) {
  switch (v) {
    case CycleVerdict::converged_to_equilibrium:
      return "converged-to-equilibrium";
    case CycleVerdict::limit_cycle:
      return "limit-cycle";
    case CycleVerdict::undecided:
      return "undecided";
  }
  return "undecided";
}

Trajectory integrate(const PayoffMatrix& m, const DelayKernel& kernel,
                     const SimConfig& cfg) {
  const GameCoefficients g = derive_coefficients(m);
  validate(kernel);
  const double history = cfg.history.value_or(cfg.s0);
  if (!(cfg.s0 > 0.0 && cfg.s0 < 1.0) || !(history > 0.0 && history < 1.0)) {
    throw DomainError("initial share and history must lie in (0, 1)");
  }
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw DomainError("horizon must be finite and > 0");
  }
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw DomainError("time step dt must be > 0");
  }
  if (cfg.omega0 && cfg.horizon < 20.0 * 2.0 * std::numbers::pi / *cfg.omega0) {
    throw DomainError("horizon must cover at least 20 periods of omega0");
  }

  const DiscretizedKernel dk = discretize(kernel, cfg.dt, cfg.tail_mass);
  if (dk.max_lag > 0.0 && cfg.dt > dk.max_lag / 50.0) {
    throw ResolutionError("time step dt must be <= max_lag / 50 (max_lag = " +
                          std::to_string(dk.max_lag) + ")");
  }

  const LaggedSum lagged(dk);
  const double w0 = lagged.instant_weight();
  const double dt = cfg.dt;
  const double delta1 = g.delta1;
  const double delta = g.delta;
  auto rhs = [&](double s, double conv) {
    return s * (1.0 - s) * (delta1 - delta * conv);
  };

  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(cfg.horizon / dt - 1e-9));
  Trajectory traj;
  traj.dt = dt;
  traj.game = m;
  traj.kernel = kernel;
  traj.s_star = g.s_star;
  traj.t.reserve(steps + 1);
  traj.s.reserve(steps + 1);

  // states[-j] = s(t_n - j dt); mids[-j] = s at the midpoint of
  // [t_{n-1-j}, t_{n-j}].
  HistoryRing states(lagged.lags() + 1, history);
  HistoryRing mids(lagged.lags() + 1, history);
  states.push(cfg.s0);

  double s = cfg.s0;
  double s_prev = history;
  double slope_prev = 0.0;
  double past = lagged(states.newest(), 0);
  traj.t.push_back(0.0);
  traj.s.push_back(s);

  for (std::size_t n = 0; n < steps; ++n) {
    const double k1 = rhs(s, w0 * s + past);
    // The interval ending at t_0 lies in the pre-history.
    const double mid = n == 0 ? history
                              : 0.5 * (s_prev + s) +
                                    0.125 * dt * (slope_prev - k1);
    mids.push(mid);
    const double past_mid = lagged(mids.newest(), 1);
    const double past_next = lagged(states.newest(), 1);

    const double y2 = s + 0.5 * dt * k1;
    const double k2 = rhs(y2, w0 * y2 + past_mid);
    const double y3 = s + 0.5 * dt * k2;
    const double k3 = rhs(y3, w0 * y3 + past_mid);
    const double y4 = s + dt * k3;
    const double k4 = rhs(y4, w0 * y4 + past_next);
    const double next = s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = static_cast<double>(n + 1) * dt;
    if (!(next >= kStateFloor && next <= 1.0 - kStateFloor)) {
      throw BlowupError(t_next, next);
    }
    s_prev = s;
    slope_prev = k1;
    s = next;
    past = past_next;
    states.push(s);
    traj.t.push_back(t_next);
    traj.s.push_back(s);
  }
  return traj;
}

CycleEstimate estimate_cycle(const Trajectory& traj, double settle_fraction) {
  if (!(settle_fraction >= 0.0 && settle_fraction < 1.0)) {
    throw DomainError("settle_fraction must lie in [0, 1)");
  }
  const std::size_t n = traj.s.size();
  if (n < 3) throw TooShort("trajectory has fewer than three samples");
  const std::size_t first =
      static_cast<std::size_t>(settle_fraction * static_cast<double>(n));

  CycleEstimate est;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  double max_dev = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    lo = std::min(lo, traj.s[i]);
    hi = std::max(hi, traj.s[i]);
    sum += traj.s[i];
    max_dev = std::max(max_dev, std::abs(traj.s[i] - traj.s_star));
  }
  est.mean_level = sum / static_cast<double>(n - first);

  if (max_dev < kEquilibriumBand) {
    est.amplitude = 0.5 * (hi - lo);
    est.verdict = CycleVerdict::converged_to_equilibrium;
    return est;
  }

  const auto maxima = find_extrema(traj.t, traj.s, first, true, traj.dt);
  const auto minima = find_extrema(traj.t, traj.s, first, false, traj.dt);
  if (maxima.size() < kMinPeriods + 1 || minima.empty()) {
    throw TooShort("measurement window holds fewer than five periods");
  }

  est.peaks = maxima.size();
  est.amplitude = 0.5 * (mean_value(maxima) - mean_value(minima));
  const double span = maxima.back().time - maxima.front().time;
  est.frequency = 2.0 * std::numbers::pi *
                  static_cast<double>(maxima.size() - 1) / span;

  double top = -std::numeric_limits<double>::infinity();
  double bottom = std::numeric_limits<double>::infinity();
  double height_sum = 0.0;
  for (std::size_t i = maxima.size() - kMinPeriods; i < maxima.size(); ++i) {
    const double h = maxima[i].value - est.mean_level;
    top = std::max(top, h);
    bottom = std::min(bottom, h);
    height_sum += h;
  }
  const double mean_height = height_sum / kMinPeriods;
  est.verdict = (mean_height > 0.0 && (top - bottom) < kCycleSpread * mean_height)
                    ? CycleVerdict::limit_cycle
                    : CycleVerdict::undecided;
  return est;
}

double default_dt(const DelayKernel& kernel) {
  const double lag = characteristic_lag(kernel);
  if (!(lag > 0.0)) return 0.01;
  return lag / 200.0;
}

double align_dt(const DelayKernel& kernel, double dt) {
  auto fit = [dt](double span, double multiple) {
    if (!(span > 0.0)) return dt;
    const double cells = std::ceil(span / (multiple * dt) - 1e-9);
    return span / (multiple * std::max(cells, 1.0));
  };
  return std::visit(
      Overloaded{
          [&](const Dirac& k) { return fit(k.tau, 1.0); },
          [&](const Uniform& k) { return fit(k.tau_max, 2.0); },
          [&](const Gamma&) { return dt; },
          [&](const Discrete& k) { return fit(k.tau, 1.0); },
      },
      kernel);
}

double default_horizon(const std::optional<HopfPoint>& hopf, double mu) {
  if (!hopf) return 200.0;
  const double period = 2.0 * std::numbers::pi / hopf->omega0;
  double horizon = 40.0 * period;
  const double rate = std::abs(hopf->crossing_rate * mu);
  if (rate > 0.0) horizon = std::max(horizon, 20.0 / rate);
  return std::min(horizon, 2000.0 * period);
}

std::vector<SweepRow> amplitude_sweep(const PayoffMatrix& m,
                                      const KernelFamily& family, double from,
                                      double to, std::size_t steps,
                                      const SweepConfig& cfg) {
  if (steps == 0) throw DomainError("sweep needs at least one step");
  const GameCoefficients g = derive_coefficients(m);
  validate(family);

  std::optional<HopfPoint> hopf;
  std::optional<AmplitudePrediction> prediction;
  if (const auto verdict = hopf_point(g, family);
      const auto* at = std::get_if<HopfAt>(&verdict)) {
    hopf = at->point;
    prediction = predict(g, family, *hopf);
  }

  std::vector<SweepRow> rows(steps);
  auto run_row = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.param = steps == 1 ? from
                           : from + (to - from) * static_cast<double>(i) /
                                        static_cast<double>(steps - 1);
    const double mu = hopf ? row.param - hopf->critical_value : 0.0;
    if (prediction) row.predicted_amplitude = prediction->amplitude(mu);
    try {
      const DelayKernel kernel = with_parameter(family, row.param);
      SimConfig sim;
      sim.s0 = g.s_star + cfg.perturbation;
      sim.dt = cfg.dt ? align_dt(kernel, *cfg.dt) : default_dt(kernel);
      sim.horizon = cfg.horizon.value_or(default_horizon(hopf, mu));
      sim.tail_mass = cfg.tail_mass;
      const CycleEstimate est =
          estimate_cycle(integrate(m, kernel, sim), cfg.settle_fraction);
      row.simulated_amplitude = est.amplitude;
      row.simulated_frequency = est.frequency;
      row.verdict = est.verdict;
    } catch (const Error& e) {
      row.simulated_amplitude = std::numeric_limits<double>::quiet_NaN();
      row.simulated_frequency = std::numeric_limits<double>::quiet_NaN();
      row.verdict = CycleVerdict::undecided;
      row.error = e.what();
    }
  };

  unsigned workers = cfg.threads != 0 ? cfg.threads
                                      : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(steps));
  if (workers == 1) {
    for (std::size_t i = 0; i < steps; ++i) run_row(i);
    return rows;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < steps; i += workers) run_row(i);
      });
    }
  }
  return rows;
}

}  // namespace hopfdelay
