#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hopfdelay {

using Complex = std::complex<double>;

// Delay distributions. Each kernel is a probability measure on [0, inf).

/// Point mass at tau.
struct Dirac {
  double tau = 0.0;
  friend bool operator==(const Dirac&, const Dirac&) = default;
};

/// Uniform density 1/tau_max on [0, tau_max].
struct Uniform {
  double tau_max = 1.0;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};

/// Gamma density beta^k t^(k-1) e^(-beta t) / (k-1)!, integer shape k >= 1.
struct Gamma {
  int k = 1;
  double beta = 1.0;
  friend bool operator==(const Gamma&, const Gamma&) = default;
};

/// Atom 1-p at zero lag plus atom p at lag tau.
struct Discrete {
  double p = 0.5;
  double tau = 1.0;
  friend bool operator==(const Discrete&, const Discrete&) = default;
};

using DelayKernel = std::variant<Dirac, Uniform, Gamma, Discrete>;

// Kernel families: the shape parameters only. The remaining parameter is the
// bifurcation parameter (tau, tau_max, beta or tau respectively).

struct DiracFamily {
  friend bool operator==(const DiracFamily&, const DiracFamily&) = default;
};
struct UniformFamily {
  friend bool operator==(const UniformFamily&, const UniformFamily&) = default;
};
struct GammaFamily {
  int k = 1;
  friend bool operator==(const GammaFamily&, const GammaFamily&) = default;
};
struct DiscreteFamily {
  double p = 0.5;
  friend bool operator==(const DiscreteFamily&,
                         const DiscreteFamily&) = default;
};

using KernelFamily =
    std::variant<DiracFamily, UniformFamily, GammaFamily, DiscreteFamily>;

/// Throws DomainError if the kernel parameters are out of range.
void validate(const DelayKernel& kernel);
void validate(const KernelFamily& family);

double kernel_mean(const DelayKernel& kernel);

/// H(lambda) = integral of p(tau) exp(-lambda tau). For Gamma this requires
/// Re(lambda) > -beta; DomainError otherwise.
Complex kernel_laplace(const DelayKernel& kernel, Complex lambda);

/// dH/dlambda.
Complex kernel_laplace_derivative(const DelayKernel& kernel, Complex lambda);

/// dH/d(parameter), where the parameter is the one the family leaves free.
Complex kernel_laplace_parameter_derivative(const DelayKernel& kernel,
                                            Complex lambda);

/// P(T > t) for T ~ Gamma(k, beta).
double gamma_tail_probability(int k, double beta, double t);

KernelFamily family_of(const DelayKernel& kernel);
double bifurcation_parameter(const DelayKernel& kernel);
DelayKernel with_parameter(const KernelFamily& family, double value);

// Discretization against a uniform time grid with spacing dt.

struct QuadratureNode {
  std::size_t lag_steps = 0;  // delay = lag_steps * dt
  double delay = 0.0;
  double weight = 0.0;
};

struct DiscretizedKernel {
  std::vector<QuadratureNode> nodes;  // sorted by lag, weights sum to 1
  double dt = 0.0;
  double max_lag = 0.0;
  std::size_t max_lag_steps = 0;
  /// Largest distance between a requested atom delay and its grid node.
  double snap_error = 0.0;

  double mean() const;
  double weight_sum() const;
  Complex laplace(Complex lambda) const;
};

inline constexpr double kDefaultTailMass = 1e-10;

/// Quadrature of the kernel on the grid {0, dt, 2dt, ...}.
///
/// Dirac and Discrete atoms are snapped to the nearest grid node. Uniform and
/// Gamma use composite Simpson weights; Gamma is truncated at the first even
/// grid point whose tail probability is <= tail_mass and renormalized. A
/// uniform support that does not end on the grid gets its last partial
/// interval from the quadratic through the neighbouring three nodes.
DiscretizedKernel discretize(const DelayKernel& kernel, double dt,
                             double tail_mass = kDefaultTailMass);

// Text forms: dirac:<tau>, uniform:<tau_max>, gamma:<k>:<beta>,
// discrete:<p>:<tau>; families: dirac, uniform, gamma:<k>, discrete:<p>.
// Parse errors throw std::invalid_argument.

DelayKernel parse_kernel(std::string_view text);
KernelFamily parse_family(std::string_view text);
std::string format_kernel(const DelayKernel& kernel);
std::string format_family(const KernelFamily& family);
std::string family_name(const KernelFamily& family);

}  // namespace hopfdelay
