#pragma once

// Characteristic equation of the linearization dx/dt = A K[x]:
//
//   chi(lambda) = lambda - A H(lambda),   H = Laplace transform of the kernel,
//
// and the points where a conjugate root pair crosses the imaginary axis.

#include <string>
#include <variant>

#include "hopfdelay/game.hpp"
#include "hopfdelay/kernel.hpp"

namespace hopfdelay {

enum class BifurcationParameter { tau, tau_max, beta, tau_discrete };

std::string parameter_name(BifurcationParameter p);
BifurcationParameter parameter_of(const KernelFamily& family);

struct HopfPoint {
  BifurcationParameter parameter = BifurcationParameter::tau;
  double critical_value = 0.0;
  double omega0 = 0.0;
  /// Sign of d Re(lambda) / d(parameter) at the crossing.
  int crossing_sign = 1;
  /// Re(d lambda / d parameter) at the crossing, from implicit
  /// differentiation of chi.
  double crossing_rate = 0.0;
  /// Side of the critical value on which the equilibrium is unstable
  /// (+1: parameter > critical; -1: parameter < critical, the Gamma case).
  int unstable_side = 1;
};

struct StableForAllDelays {};
struct HopfAt {
  HopfPoint point;
};
struct NoBifurcation {
  std::string reason;
};

using StabilityVerdict = std::variant<StableForAllDelays, HopfAt, NoBifurcation>;

Complex char_residual(const GameCoefficients& g, const DelayKernel& kernel,
                      Complex lambda);

/// chi'(lambda) = 1 - A H'(lambda).
Complex char_residual_derivative(const GameCoefficients& g,
                                 const DelayKernel& kernel, Complex lambda);

/// Closed-form first Hopf crossing for the family.
StabilityVerdict hopf_point(const GameCoefficients& g,
                            const KernelFamily& family);

/// Convenience: the HopfPoint or DomainError if the family has none.
HopfPoint require_hopf_point(const GameCoefficients& g,
                             const KernelFamily& family);

/// Newton iteration on chi from `guess`. Throws ConvergenceError if the
/// update does not drop below tol * max(1, |lambda|) within max_iter steps.
Complex track_root(const GameCoefficients& g, const DelayKernel& kernel,
                   Complex guess, int max_iter = 50, double tol = 1e-12);

/// Numerical crossing direction: tracks the root near i omega0 at
/// critical_value * (1 +- 1e-4) and returns the sign of the central
/// difference of Re(lambda).
int crossing_direction(const GameCoefficients& g, const KernelFamily& family,
                       const HopfPoint& hopf);

}  // namespace hopfdelay
