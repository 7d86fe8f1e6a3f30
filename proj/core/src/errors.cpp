#include "hopfdelay/errors.hpp"

#include <cstdio>

namespace hopfdelay {
namespace {

std::string format_pair(const char* fmt, double x, double y) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, x, y);
  return buf;
}

}  // namespace

NoInteriorEquilibrium::NoInteriorEquilibrium(double delta1, double delta2)
    : DomainError(format_pair(
          "no interior equilibrium: requires delta1 = b - d > 0 and "
          "delta2 = c - a > 0, got delta1 = %.9g, delta2 = %.9g",
          delta1, delta2)),
      delta1_(delta1),
      delta2_(delta2) {}

DegenerateQ::DegenerateQ(double p, double q)
    : Error(format_pair("degenerate amplitude denominator: P = %.9g, Q = %.9g",
                        p, q)) {}

BlowupError::BlowupError(double t, double s)
    : Error(format_pair("state left the open unit interval at t = %.9g "
                        "(s = %.17g)",
                        t, s)) {}

}  // namespace hopfdelay
