#pragma once

// Two-strategy symmetric game and the coefficients of the replicator
// dynamics written around the mixed equilibrium:
//
//   dx/dt = A K[x] + B x K[x] + C x^2 K[x],   x = s - s*,
//
// where K[x](t) is the delay-kernel average of past states.
//
// Everything here is templated on the scalar type so the same formulas can
// be evaluated in exact rational arithmetic (used as a test oracle).

#include <cmath>
#include <type_traits>

#include "hopfdelay/errors.hpp"

namespace hopfdelay {

/// Payoff matrix [[a, b], [c, d]]: row player's payoff for strategy A
/// (first row) or B (second row) against A (first column) or B.
template <typename T>
struct BasicPayoffMatrix {
  T a{};
  T b{};
  T c{};
  T d{};

  friend bool operator==(const BasicPayoffMatrix&,
                         const BasicPayoffMatrix&) = default;
};

template <typename T>
struct BasicGameCoefficients {
  T delta1{};  // b - d
  T delta2{};  // c - a
  T delta{};   // delta1 + delta2
  T s_star{};  // delta1 / delta
  T gamma{};   // s*(1 - s*)
  T A{};       // -delta * gamma
  T B{};       // -delta * (1 - 2 s*)
  T C{};       // delta
};

/// Split of A, B, C between the undelayed (weight 1 - p) and delayed
/// (weight p) parts of the two-atom kernel:
///   dx/dt = a1 x + b1 x_tau + c1 x x_tau + d1 x^2 + e1 x_tau x^2 + f1 x^3.
template <typename T>
struct BasicDiscreteCoefficients {
  T p{};
  T a1{};
  T b1{};
  T c1{};
  T d1{};
  T e1{};
  T f1{};
};

using PayoffMatrix = BasicPayoffMatrix<double>;
using GameCoefficients = BasicGameCoefficients<double>;
using DiscreteCoefficients = BasicDiscreteCoefficients<double>;

namespace detail {

template <typename T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

}  // namespace detail

/// Throws NoInteriorEquilibrium unless b > d and c > a; throws DomainError
/// on non-finite entries.
template <typename T>
BasicGameCoefficients<T> derive_coefficients(const BasicPayoffMatrix<T>& m) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(m.a) || !std::isfinite(m.b) || !std::isfinite(m.c) ||
        !std::isfinite(m.d)) {
      throw DomainError("payoff entries must be finite");
    }
  }
  BasicGameCoefficients<T> g;
  g.delta1 = m.b - m.d;
  g.delta2 = m.c - m.a;
  if (!(g.delta1 > T(0)) || !(g.delta2 > T(0))) {
    throw NoInteriorEquilibrium(detail::to_double(g.delta1),
                                detail::to_double(g.delta2));
  }
  g.delta = g.delta1 + g.delta2;
  g.s_star = g.delta1 / g.delta;
  g.gamma = g.s_star * (T(1) - g.s_star);
  g.A = -g.delta * g.gamma;
  g.B = -g.delta * (T(1) - T(2) * g.s_star);
  g.C = g.delta;
  return g;
}

/// Throws DomainError unless 0 <= p <= 1.
template <typename T>
BasicDiscreteCoefficients<T> discrete_coefficients(
    const BasicGameCoefficients<T>& g, const T& p) {
  if (!(p >= T(0)) || !(p <= T(1))) {
    throw DomainError("discrete kernel probability p must lie in [0, 1]");
  }
  const T q = T(1) - p;
  const T skew = T(1) - T(2) * g.s_star;
  BasicDiscreteCoefficients<T> dc;
  dc.p = p;
  dc.a1 = -q * g.delta * g.gamma;
  dc.b1 = -p * g.delta * g.gamma;
  dc.c1 = -p * g.delta * skew;
  dc.d1 = -q * g.delta * skew;
  dc.e1 = p * g.delta;
  dc.f1 = q * g.delta;
  return dc;
}

}  // namespace hopfdelay
