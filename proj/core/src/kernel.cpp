#include "hopfdelay/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

#include "hopfdelay/errors.hpp"
#include "overloaded.hpp"

namespace hopfdelay {
namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

// Uniform transform in terms of z = lambda * tau_max:
//   G(z) = (1 - e^-z) / z,  G'(z) = (e^-z (1 + z) - 1) / z^2.
// Both have removable singularities at z = 0; use the Taylor series there.
constexpr double kSeriesRadius = 1e-2;

Complex uniform_g(Complex z) {
  if (std::abs(z) < kSeriesRadius) {
    // sum_{n>=0} (-z)^n / (n+1)!
    Complex term = 1.0;
    Complex sum = 1.0;
    for (int n = 1; n < 10; ++n) {
      term *= -z / static_cast<double>(n + 1);
      sum += term;
    }
    return sum;
  }
  return (1.0 - std::exp(-z)) / z;
}

Complex uniform_g_prime(Complex z) {
  if (std::abs(z) < kSeriesRadius) {
    // sum_{n>=1} n (-1)^n z^(n-1) / (n+1)!
    Complex sum = 0.0;
    Complex zpow = 1.0;  // z^(n-1)
    double fact = 2.0;   // (n+1)!
    for (int n = 1; n < 11; ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      sum += sign * static_cast<double>(n) * zpow / fact;
      zpow *= z;
      fact *= static_cast<double>(n + 2);
    }
    return sum;
  }
  return (std::exp(-z) * (1.0 + z) - 1.0) / (z * z);
}

void require_gamma_domain(const Gamma& g, Complex lambda) {
  if (!(lambda.real() > -g.beta)) {
    throw DomainError("gamma kernel transform diverges for Re(lambda) <= -beta");
  }
}

double gamma_density(int k, double beta, double t) {
  if (t <= 0.0) return k == 1 ? beta : 0.0;
  const double log_density = k * std::log(beta) + (k - 1) * std::log(t) -
                             beta * t - std::lgamma(static_cast<double>(k));
  return std::exp(log_density);
}

// Nonnegative quadrature weights for integral_0^{n dt} f on the grid.
// Composite Simpson when n is even; Simpson plus a closing 3/8 panel when n
// is odd; trapezoid for n == 1.
std::vector<double> simpson_weights(std::size_t n, double dt) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = dt / 2.0;
    return w;
  }
  const std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += dt / 3.0;
    w[i + 1] += 4.0 * dt / 3.0;
    w[i + 2] += dt / 3.0;
  }
  if (simpson_end != n) {
    const double h = 3.0 * dt / 8.0;
    w[simpson_end] += h;
    w[simpson_end + 1] += 3.0 * h;
    w[simpson_end + 2] += 3.0 * h;
    w[simpson_end + 3] += h;
  }
  return w;
}

DiscretizedKernel finish(std::vector<double> weights, double dt,
                         double snap_error) {
  double total = 0.0;
  for (double w : weights) total += w;
  DiscretizedKernel out;
  out.dt = dt;
  out.snap_error = snap_error;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    out.nodes.push_back({i, static_cast<double>(i) * dt, weights[i] / total});
  }
  if (!out.nodes.empty()) {
    out.max_lag_steps = out.nodes.back().lag_steps;
    out.max_lag = out.nodes.back().delay;
  }
  return out;
}

std::size_t snap(double delay, double dt) {
  return static_cast<std::size_t>(std::llround(delay / dt));
}

// Number of whole grid steps in x/dt, tolerating round-off just below an
// integer.
std::size_t whole_steps(double x, double dt, double& remainder) {
  const double ratio = x / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    remainder = 0.0;
    return static_cast<std::size_t>(nearest);
  }
  const double whole = std::floor(ratio);
  remainder = x - whole * dt;
  return static_cast<std::size_t>(whole);
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view token, std::string_view what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("invalid " + std::string(what) + " '" +
                                std::string(token) + "'");
  }
  return value;
}

int parse_int(std::string_view token, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument("invalid " + std::string(what) + " '" +
                                std::string(token) + "' (expected an integer)");
  }
  return value;
}

std::string shortest(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

[[noreturn]] void bad_spec(std::string_view text, std::string_view expected) {
  throw std::invalid_argument("invalid kernel spec '" + std::string(text) +
                              "' (expected " + std::string(expected) + ")");
}

}  // namespace

void validate(const DelayKernel& kernel) {
  std::visit(
      Overloaded{
          [](const Dirac& k) {
            if (!finite_nonneg(k.tau))
              throw DomainError("dirac delay tau must be finite and >= 0");
          },
          [](const Uniform& k) {
            if (!finite_pos(k.tau_max))
              throw DomainError("uniform tau_max must be finite and > 0");
          },
          [](const Gamma& k) {
            if (k.k < 1) throw DomainError("gamma shape k must be >= 1");
            if (!finite_pos(k.beta))
              throw DomainError("gamma rate beta must be finite and > 0");
          },
          [](const Discrete& k) {
            if (!(k.p >= 0.0 && k.p <= 1.0))
              throw DomainError("discrete probability p must lie in [0, 1]");
            if (!finite_pos(k.tau))
              throw DomainError("discrete delay tau must be finite and > 0");
          },
      },
      kernel);
}

void validate(const KernelFamily& family) {
  if (const auto* g = std::get_if<GammaFamily>(&family); g && g->k < 1) {
    throw DomainError("gamma shape k must be >= 1");
  }
  if (const auto* d = std::get_if<DiscreteFamily>(&family);
      d && !(d->p >= 0.0 && d->p <= 1.0)) {
    throw DomainError("discrete probability p must lie in [0, 1]");
  }
}

double kernel_mean(const DelayKernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Dirac& k) { return k.tau; },
          [](const Uniform& k) { return k.tau_max / 2.0; },
          [](const Gamma& k) { return k.k / k.beta; },
          [](const Discrete& k) { return k.p * k.tau; },
      },
      kernel);
}

Complex kernel_laplace(const DelayKernel& kernel, Complex lambda) {
  return std::visit(
      Overloaded{
          [&](const Dirac& k) { return std::exp(-lambda * k.tau); },
          [&](const Uniform& k) { return uniform_g(lambda * k.tau_max); },
          [&](const Gamma& k) {
            require_gamma_domain(k, lambda);
            return std::pow(k.beta / (k.beta + lambda), k.k);
          },
          [&](const Discrete& k) {
            return (1.0 - k.p) + k.p * std::exp(-lambda * k.tau);
          },
      },
      kernel);
}

Complex kernel_laplace_derivative(const DelayKernel& kernel, Complex lambda) {
  return std::visit(
      Overloaded{
          [&](const Dirac& k) { return -k.tau * std::exp(-lambda * k.tau); },
          [&](const Uniform& k) {
            return k.tau_max * uniform_g_prime(lambda * k.tau_max);
          },
          [&](const Gamma& k) {
            require_gamma_domain(k, lambda);
            return -static_cast<double>(k.k) *
                   std::pow(k.beta / (k.beta + lambda), k.k) /
                   (k.beta + lambda);
          },
          [&](const Discrete& k) {
            return -k.p * k.tau * std::exp(-lambda * k.tau);
          },
      },
      kernel);
}

Complex kernel_laplace_parameter_derivative(const DelayKernel& kernel,
                                            Complex lambda) {
  return std::visit(
      Overloaded{
          [&](const Dirac& k) { return -lambda * std::exp(-lambda * k.tau); },
          [&](const Uniform& k) {
            return lambda * uniform_g_prime(lambda * k.tau_max);
          },
          [&](const Gamma& k) {
            require_gamma_domain(k, lambda);
            const Complex h = std::pow(k.beta / (k.beta + lambda), k.k);
            return static_cast<double>(k.k) * h * lambda /
                   (k.beta * (k.beta + lambda));
          },
          [&](const Discrete& k) {
            return -k.p * lambda * std::exp(-lambda * k.tau);
          },
      },
      kernel);
}

double gamma_tail_probability(int k, double beta, double t) {
  if (t <= 0.0) return 1.0;
  const double x = beta * t;
  // e^-x * sum_{j<k} x^j / j!
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= x / j;
    sum += term;
  }
  return std::exp(-x) * sum;
}

KernelFamily family_of(const DelayKernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Dirac&) -> KernelFamily { return DiracFamily{}; },
          [](const Uniform&) -> KernelFamily { return UniformFamily{}; },
          [](const Gamma& k) -> KernelFamily { return GammaFamily{k.k}; },
          [](const Discrete& k) -> KernelFamily {
            return DiscreteFamily{k.p};
          },
      },
      kernel);
}

double bifurcation_parameter(const DelayKernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Dirac& k) { return k.tau; },
          [](const Uniform& k) { return k.tau_max; },
          [](const Gamma& k) { return k.beta; },
          [](const Discrete& k) { return k.tau; },
      },
      kernel);
}

DelayKernel with_parameter(const KernelFamily& family, double value) {
  return std::visit(
      Overloaded{
          [&](const DiracFamily&) -> DelayKernel { return Dirac{value}; },
          [&](const UniformFamily&) -> DelayKernel { return Uniform{value}; },
          [&](const GammaFamily& f) -> DelayKernel {
            return Gamma{f.k, value};
          },
          [&](const DiscreteFamily& f) -> DelayKernel {
            return Discrete{f.p, value};
          },
      },
      family);
}

double DiscretizedKernel::mean() const {
  double m = 0.0;
  for (const auto& n : nodes) m += n.weight * n.delay;
  return m;
}

double DiscretizedKernel::weight_sum() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

Complex DiscretizedKernel::laplace(Complex lambda) const {
  Complex h = 0.0;
  for (const auto& n : nodes) h += n.weight * std::exp(-lambda * n.delay);
  return h;
}

DiscretizedKernel discretize(const DelayKernel& kernel, double dt,
                             double tail_mass) {
  if (!finite_pos(dt)) throw DomainError("time step dt must be > 0");
  if (!(tail_mass > 0.0 && tail_mass < 1e-3)) {
    throw DomainError("tail_mass must lie in (0, 1e-3)");
  }
  validate(kernel);

  return std::visit(
      Overloaded{
          [&](const Dirac& k) {
            const std::size_t n = snap(k.tau, dt);
            std::vector<double> w(n + 1, 0.0);
            w[n] = 1.0;
            return finish(std::move(w), dt,
                          std::abs(static_cast<double>(n) * dt - k.tau));
          },
          [&](const Discrete& k) {
            const std::size_t n = snap(k.tau, dt);
            std::vector<double> w(n + 1, 0.0);
            w[0] += 1.0 - k.p;
            w[n] += k.p;
            return finish(std::move(w), dt,
                          std::abs(static_cast<double>(n) * dt - k.tau));
          },
          [&](const Uniform& k) {
            double remainder = 0.0;
            const std::size_t n = whole_steps(k.tau_max, dt, remainder);
            std::vector<double> w = simpson_weights(n, dt);
            if (remainder > 0.0) {
              // Trapezoid on the partial last interval keeps weights >= 0.
              const double rho = remainder / dt;
              w.resize(n + 2, 0.0);
              w[n] += dt * (rho - rho * rho / 2.0);
              w[n + 1] += dt * (rho * rho / 2.0);
            }
            for (double& x : w) x /= k.tau_max;
            return finish(std::move(w), dt, 0.0);
          },
          [&](const Gamma& k) {
            std::size_t n = 2;
            while (gamma_tail_probability(k.k, k.beta,
                                          static_cast<double>(n) * dt) >
                   tail_mass) {
              n += 2;
            }
            std::vector<double> w = simpson_weights(n, dt);
            for (std::size_t i = 0; i <= n; ++i) {
              w[i] *= gamma_density(k.k, k.beta, static_cast<double>(i) * dt);
            }
            return finish(std::move(w), dt, 0.0);
          },
      },
      kernel);
}

DelayKernel parse_kernel(std::string_view text) {
  const auto parts = split(text);
  const std::string_view name = parts.front();
  if (name == "dirac") {
    if (parts.size() != 2) bad_spec(text, "dirac:<tau>");
    return Dirac{parse_real(parts[1], "tau")};
  }
  if (name == "uniform") {
    if (parts.size() != 2) bad_spec(text, "uniform:<tau_max>");
    return Uniform{parse_real(parts[1], "tau_max")};
  }
  if (name == "gamma") {
    if (parts.size() != 3) bad_spec(text, "gamma:<k>:<beta>");
    return Gamma{parse_int(parts[1], "k"), parse_real(parts[2], "beta")};
  }
  if (name == "discrete") {
    if (parts.size() != 3) bad_spec(text, "discrete:<p>:<tau>");
    return Discrete{parse_real(parts[1], "p"), parse_real(parts[2], "tau")};
  }
  bad_spec(text, "dirac, uniform, gamma or discrete");
}

KernelFamily parse_family(std::string_view text) {
  const auto parts = split(text);
  const std::string_view name = parts.front();
  if (name == "dirac") {
    if (parts.size() != 1) bad_spec(text, "dirac");
    return DiracFamily{};
  }
  if (name == "uniform") {
    if (parts.size() != 1) bad_spec(text, "uniform");
    return UniformFamily{};
  }
  if (name == "gamma") {
    if (parts.size() != 2) bad_spec(text, "gamma:<k>");
    return GammaFamily{parse_int(parts[1], "k")};
  }
  if (name == "discrete") {
    if (parts.size() != 2) bad_spec(text, "discrete:<p>");
    return DiscreteFamily{parse_real(parts[1], "p")};
  }
  bad_spec(text, "dirac, uniform, gamma:<k> or discrete:<p>");
}

std::string format_kernel(const DelayKernel& kernel) {
  return std::visit(
      Overloaded{
          [](const Dirac& k) { return "dirac:" + shortest(k.tau); },
          [](const Uniform& k) { return "uniform:" + shortest(k.tau_max); },
          [](const Gamma& k) {
            return "gamma:" + std::to_string(k.k) + ":" + shortest(k.beta);
          },
          [](const Discrete& k) {
            return "discrete:" + shortest(k.p) + ":" + shortest(k.tau);
          },
      },
      kernel);
}

std::string format_family(const KernelFamily& family) {
  return std::visit(
      Overloaded{
          [](const DiracFamily&) { return std::string("dirac"); },
          [](const UniformFamily&) { return std::string("uniform"); },
          [](const GammaFamily& f) { return "gamma:" + std::to_string(f.k); },
          [](const DiscreteFamily& f) { return "discrete:" + shortest(f.p); },
      },
      family);
}

std::string family_name(const KernelFamily& family) {
  static constexpr const char* kNames[] = {"dirac", "uniform", "gamma",
                                           "discrete"};
  return kNames[family.index()];
}

}  // namespace hopfdelay
