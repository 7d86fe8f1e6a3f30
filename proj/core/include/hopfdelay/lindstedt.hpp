#pragma once

// Lindstedt-Poincare amplitude of the limit cycle born at a Hopf point:
//
//   x(t) ~ A_m cos(omega0 t),   A_m = sqrt((P / Q) mu),
//
// with mu = parameter - critical_value.

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

#include "hopfdelay/game.hpp"
#include "hopfdelay/kernel.hpp"
#include "hopfdelay/spectrum.hpp"

namespace hopfdelay {

enum class Criticality { supercritical, subcritical };

const char* criticality_name(Criticality c);

struct AmplitudePrediction {
  double P = 0.0;
  double Q = 0.0;
  double slope = 0.0;  // P / Q
  int unstable_side = 1;
  Criticality criticality = Criticality::supercritical;

  /// sqrt(slope * mu), or nullopt when mu is not on the side where the
  /// cycle exists.
  std::optional<double> amplitude(double mu) const;
};

/// Auxiliary quantities of the Gamma-kernel expansion. theta1 = atan(2 w0 /
/// beta_c) in (0, pi/2); F1, F2 are the sin(2T), cos(2T) coefficients of the
/// second-order correction divided by the squared amplitude.
struct GammaAux {
  double theta1 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

enum class GammaFormula {
  /// Secular-term elimination evaluated from F1, F2, theta1.
  secular,
  /// The condensed P, Q quotients as they appear in print. Kept for
  /// comparison only; it disagrees with direct simulation.
  printed,
};

enum class DiscreteQForm {
  /// Uses -3 c1^2 b1^5 tau_cr, the only power consistent with the p = 1
  /// reduction to the single-delay formula.
  corrected,
  /// Uses the printed -3 c1^2 b1^2 tau_cr.
  printed,
};

AmplitudePrediction predict_dirac(const GameCoefficients& g,
                                  const HopfPoint& hopf);
AmplitudePrediction predict_uniform(const GameCoefficients& g,
                                    const HopfPoint& hopf);
GammaAux gamma_aux(const GameCoefficients& g, int k, const HopfPoint& hopf);
AmplitudePrediction predict_gamma(const GameCoefficients& g, int k,
                                  const HopfPoint& hopf,
                                  GammaFormula formula = GammaFormula::secular);
AmplitudePrediction predict_discrete(
    const DiscreteCoefficients& dc, const HopfPoint& hopf,
    DiscreteQForm form = DiscreteQForm::corrected);

/// Dispatches on the family. Throws DomainError for families without a Hopf
/// point.
AmplitudePrediction predict(const GameCoefficients& g,
                            const KernelFamily& family, const HopfPoint& hopf);

/// Second-harmonic coefficients u1 = m1 sin 2T + m2 cos 2T for the uniform
/// kernel at scaled amplitude amplitude_hat.
struct SecondHarmonic {
  double m1 = 0.0;
  double m2 = 0.0;
};
SecondHarmonic uniform_second_harmonic(const GameCoefficients& g,
                                       const HopfPoint& hopf,
                                       double amplitude_hat);

// Discrete-kernel polynomials: Q = Q_tau * tau_cr + Q_const.

template <typename T>
struct DiscretePolynomials {
  T P{};
  T Q_tau{};
  T Q_const{};
};

namespace detail {

template <typename T>
T power(const T& x, int n) {
  T r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

/// Floating point: sum by descending magnitude with Neumaier compensation.
/// Exact types: plain sum.
template <typename T>
T sum_terms(std::vector<T> terms) {
  if constexpr (std::is_floating_point_v<T>) {
    std::sort(terms.begin(), terms.end(),
              [](T x, T y) { return std::abs(x) > std::abs(y); });
    T sum = 0;
    T comp = 0;
    for (T x : terms) {
      const T t = sum + x;
      comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    return sum + comp;
  } else {
    T sum(0);
    for (const T& x : terms) sum += x;
    return sum;
  }
}

}  // namespace detail

template <typename T>
DiscretePolynomials<T> discrete_polynomials(
    const BasicDiscreteCoefficients<T>& dc,
    DiscreteQForm form = DiscreteQForm::corrected) {
  using detail::power;
  const T& a = dc.a1;
  const T& b = dc.b1;
  const T& c = dc.c1;
  const T& d = dc.d1;
  const T& e = dc.e1;
  const T& f = dc.f1;
  const int typo_power = form == DiscreteQForm::corrected ? 5 : 2;

  DiscretePolynomials<T> out;
  out.P = T(4) * power(b, 3) * (b - a) * (a + b) * (a + b) *
          (T(-5) * b + T(4) * a);

  out.Q_tau = detail::sum_terms<T>({
      T(5) * e * power(b, 6),
      a * e * power(b, 5),
      T(-15) * a * f * power(b, 5),
      T(-3) * c * c * power(b, typo_power),
      T(-7) * c * d * power(b, 5),
      T(-4) * d * d * power(b, 5),
      T(6) * a * a * e * power(b, 4),
      T(-3) * a * a * f * power(b, 4),
      T(7) * c * c * a * power(b, 4),
      T(19) * c * d * a * power(b, 4),
      T(18) * d * d * a * power(b, 4),
      T(2) * power(a, 3) * e * power(b, 3),
      T(12) * power(a, 3) * f * power(b, 3),
      T(-12) * c * c * a * a * power(b, 3),
      T(-26) * c * d * a * a * power(b, 3),
      T(-8) * d * d * a * a * power(b, 3),
      T(-8) * power(a, 4) * e * b * b,
      T(8) * c * c * power(a, 3) * b * b,
      T(8) * c * d * power(a, 3) * b * b,
  });

  out.Q_const = detail::sum_terms<T>({
      T(15) * f * power(b, 5),
      T(-15) * a * e * power(b, 4),
      T(3) * a * f * power(b, 4),
      T(-1) * c * c * power(b, 4),
      T(-9) * c * d * power(b, 4),
      T(-18) * d * d * power(b, 4),
      T(-3) * a * a * e * power(b, 3),
      T(-12) * a * a * f * power(b, 3),
      T(11) * c * c * a * power(b, 3),
      T(33) * c * d * a * power(b, 3),
      T(12) * d * d * a * power(b, 3),
      T(12) * power(a, 3) * e * b * b,
      T(-14) * c * c * a * a * b * b,
      T(-18) * c * d * a * a * b * b,
      T(4) * c * c * power(a, 3) * b,
  });
  return out;
}

}  // namespace hopfdelay
