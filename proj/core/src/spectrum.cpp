#include "hopfdelay/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hopfdelay/errors.hpp"
#include "overloaded.hpp"

namespace hopfdelay {
namespace {

using std::numbers::pi;

HopfPoint make_point(const GameCoefficients& g, const KernelFamily& family,
                     double critical, double omega0, int sign) {
  HopfPoint h;
  h.parameter = parameter_of(family);
  h.critical_value = critical;
  h.omega0 = omega0;
  h.crossing_sign = sign;
  h.unstable_side = sign;

  // d lambda / d param = A dH/dparam / chi'(lambda).
  const DelayKernel kernel = with_parameter(family, critical);
  const Complex root(0.0, omega0);
  const Complex rate = g.A *
                       kernel_laplace_parameter_derivative(kernel, root) /
                       char_residual_derivative(g, kernel, root);
  h.crossing_rate = rate.real();
  return h;
}

void check_branch(double angle, double lo, double hi) {
  if (!(angle >= lo && angle <= hi)) {
    throw std::logic_error("inverse trigonometric branch out of range");
  }
}

}  // namespace

std::string parameter_name(BifurcationParameter p) {
  switch (p) {
    case BifurcationParameter::tau:
      return "tau";
    case BifurcationParameter::tau_max:
      return "tau_max";
    case BifurcationParameter::beta:
      return "beta";
    case BifurcationParameter::tau_discrete:
      return "tau_discrete";
  }
  return "tau";
}

BifurcationParameter parameter_of(const KernelFamily& family) {
  return std::visit(
      Overloaded{
          [](const DiracFamily&) { return BifurcationParameter::tau; },
          [](const UniformFamily&) { return BifurcationParameter::tau_max; },
          [](const GammaFamily&) { return BifurcationParameter::beta; },
          [](const DiscreteFamily&) {
            return BifurcationParameter::tau_discrete;
          },
      },
      family);
}

Complex char_residual(const GameCoefficients& g, const DelayKernel& kernel,
                      Complex lambda) {
  return lambda - g.A * kernel_laplace(kernel, lambda);
}

Complex char_residual_derivative(const GameCoefficients& g,
                                 const DelayKernel& kernel, Complex lambda) {
  return 1.0 - g.A * kernel_laplace_derivative(kernel, lambda);
}

StabilityVerdict hopf_point(const GameCoefficients& g,
                            const KernelFamily& family) {
  validate(family);
  const double D = g.delta * g.gamma;  // = -A

  return std::visit(
      Overloaded{
          [&](const DiracFamily&) -> StabilityVerdict {
            // i w + D e^{-i w tau} = 0  =>  w tau = pi/2, w = D.
            return HopfAt{make_point(g, family, pi / (2.0 * D), D, +1)};
          },
          [&](const UniformFamily&) -> StabilityVerdict {
            // First crossing at w tau_max = pi.
            const double tau_cr = pi * pi / (2.0 * D);
            return HopfAt{make_point(g, family, tau_cr, pi / tau_cr, +1)};
          },
          [&](const GammaFamily& f) -> StabilityVerdict {
            if (f.k == 1) {
              return NoBifurcation{
                  "exponential kernel (k = 1): beta_c = 0, no Hopf crossing"};
            }
            // cos(k theta) = 0 with theta in [0, pi/2] => theta = pi / 2k.
            const double theta = pi / (2.0 * f.k);
            check_branch(theta, 0.0, pi / 2.0);
            const double beta_c =
                D * std::pow(std::cos(theta), f.k + 1) / std::sin(theta);
            const double omega0 = D * std::pow(std::cos(theta), f.k);
            return HopfAt{make_point(g, family, beta_c, omega0, -1)};
          },
          [&](const DiscreteFamily& f) -> StabilityVerdict {
            if (f.p <= 0.5) return StableForAllDelays{};
            const double angle = std::acos(-(1.0 - f.p) / f.p);
            check_branch(angle, 0.0, pi);
            const double omega0 = D * std::sqrt(2.0 * f.p - 1.0);
            return HopfAt{make_point(g, family, angle / omega0, omega0, +1)};
          },
      },
      family);
}

HopfPoint require_hopf_point(const GameCoefficients& g,
                             const KernelFamily& family) {
  const StabilityVerdict v = hopf_point(g, family);
  if (const auto* h = std::get_if<HopfAt>(&v)) return h->point;
  throw DomainError("kernel family " + format_family(family) +
                    " has no Hopf bifurcation for this game");
}

Complex track_root(const GameCoefficients& g, const DelayKernel& kernel,
                   Complex guess, int max_iter, double tol) {
  Complex lambda = guess;
  for (int iter = 0; iter < max_iter; ++iter) {
    Complex step;
    try {
      step = char_residual(g, kernel, lambda) /
             char_residual_derivative(g, kernel, lambda);
    } catch (const DomainError& e) {
      throw ConvergenceError(std::string("root tracking left the transform "
                                         "domain: ") +
                             e.what());
    }
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    lambda -= step;
    if (std::abs(step) < tol * std::max(1.0, std::abs(lambda))) return lambda;
  }
  throw ConvergenceError("Newton iteration on the characteristic equation "
                         "did not converge");
}

int crossing_direction(const GameCoefficients& g, const KernelFamily& family,
                       const HopfPoint& hopf) {
  const double h = 1e-4 * hopf.critical_value;
  const Complex guess(0.0, hopf.omega0);
  const Complex above =
      track_root(g, with_parameter(family, hopf.critical_value + h), guess);
  const Complex below =
      track_root(g, with_parameter(family, hopf.critical_value - h), guess);
  const double slope = (above.real() - below.real()) / (2.0 * h);
  return (slope > 0.0) - (slope < 0.0);
}

}  // namespace hopfdelay
