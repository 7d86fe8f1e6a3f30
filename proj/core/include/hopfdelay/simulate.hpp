#pragma once

// Direct integration of the distributed-delay replicator equation
//
//   ds/dt = s (1 - s) (delta1 - delta * integral p(tau) s(t - tau) dtau)
//
// and measurement of the resulting oscillation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hopfdelay/game.hpp"
#include "hopfdelay/kernel.hpp"
#include "hopfdelay/lindstedt.hpp"
#include "hopfdelay/spectrum.hpp"

namespace hopfdelay {

struct SimConfig {
  double s0 = 0.5;
  double horizon = 200.0;
  double dt = 0.01;
  /// Constant pre-history on t < 0; s0 when unset.
  std::optional<double> history;
  double tail_mass = kDefaultTailMass;
  /// When set, the horizon must cover at least 20 periods 2 pi / omega0.
  std::optional<double> omega0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> s;
  double dt = 0.0;
  PayoffMatrix game;
  DelayKernel kernel;
  double s_star = 0.5;
};

enum class CycleVerdict { converged_to_equilibrium, limit_cycle, undecided };

const char* verdict_name(CycleVerdict v);

struct CycleEstimate {
  double amplitude = 0.0;  // half peak-to-trough
  double frequency = 0.0;  // rad / time
  double mean_level = 0.0;
  CycleVerdict verdict = CycleVerdict::undecided;
  std::size_t peaks = 0;
};

/// Fixed-step RK4 with the method of steps. The kernel is discretized on the
/// integration grid; off-grid history needed by the half-step stages comes
/// from cubic Hermite interpolation of the stored states and slopes.
///
/// Throws ResolutionError if dt > max_lag / 50, BlowupError if the state
/// leaves [1e-12, 1 - 1e-12], DomainError on invalid configuration.
Trajectory integrate(const PayoffMatrix& m, const DelayKernel& kernel,
                     const SimConfig& cfg);

/// Discards the first settle_fraction of the trajectory and measures the
/// remaining window. Throws TooShort when the window is not at equilibrium
/// and holds fewer than five full periods.
CycleEstimate estimate_cycle(const Trajectory& traj,
                             double settle_fraction = 0.5);

/// Grid spacing used when none is given: 1/200 of the kernel's
/// characteristic lag (tau, tau_max or the mean), shrunk so atoms land on
/// the grid and uniform supports span an even number of steps.
double default_dt(const DelayKernel& kernel);

/// Largest step <= dt that puts Dirac/Discrete atoms on the grid and gives
/// a uniform support an even number of steps. Gamma kernels are unchanged.
double align_dt(const DelayKernel& kernel, double dt);

/// Horizon used when none is given: 40 periods of omega0, extended to
/// 20 / |crossing_rate * mu| (the time scale of approach to the cycle or the
/// equilibrium) but to no more than 2000 periods. 200 when no Hopf point.
double default_horizon(const std::optional<HopfPoint>& hopf, double mu);

struct SweepConfig {
  std::optional<double> dt;
  std::optional<double> horizon;
  double perturbation = 0.01;  // s0 = s* + perturbation
  double settle_fraction = 0.5;
  double tail_mass = kDefaultTailMass;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepRow {
  double param = 0.0;
  std::optional<double> predicted_amplitude;
  double simulated_amplitude = 0.0;
  double simulated_frequency = 0.0;
  CycleVerdict verdict = CycleVerdict::undecided;
  /// Non-empty when the row's simulation failed.
  std::string error;
};

/// One row per parameter value in [from, to] (inclusive, evenly spaced).
/// Row failures are recorded in SweepRow::error. Rows are returned in
/// parameter order.
std::vector<SweepRow> amplitude_sweep(const PayoffMatrix& m,
                                      const KernelFamily& family, double from,
                                      double to, std::size_t steps,
                                      const SweepConfig& cfg = {});

}  // namespace hopfdelay
