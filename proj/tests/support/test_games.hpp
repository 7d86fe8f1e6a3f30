#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "hopfdelay/game.hpp"

namespace hopfdelay::testing {

/// s* = 1/2, delta = 3.
inline constexpr PayoffMatrix kWideGame{-1.5, 3.0, 0.0, 1.5};
/// s* = 1/2, delta = 1.
inline constexpr PayoffMatrix kNarrowGame{-0.5, 1.0, 0.0, 0.5};
/// s* = 3/4, delta = 2, so B != 0.
inline constexpr PayoffMatrix kSkewedGame{-0.5, 3.0, 0.0, 1.5};

/// A payoff matrix with an interior equilibrium: b > d and c > a.
inline PayoffMatrix random_game(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> gap(0.1, 3.0);
  PayoffMatrix m;
  m.a = entry(rng);
  m.d = entry(rng);
  m.b = m.d + gap(rng);
  m.c = m.a + gap(rng);
  return m;
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace hopfdelay::testing
