#include "hopfdelay/lindstedt.hpp"

#include <cmath>

#include "hopfdelay/errors.hpp"
#include "overloaded.hpp"

namespace hopfdelay {
namespace {

AmplitudePrediction make_prediction(double P, double Q, int unstable_side) {
  if (!(std::abs(Q) >= 1e-12 * std::abs(P)) || Q == 0.0) {
    throw DegenerateQ(P, Q);
  }
  AmplitudePrediction out;
  out.P = P;
  out.Q = Q;
  out.slope = P / Q;
  out.unstable_side = unstable_side;
  out.criticality = out.slope * unstable_side > 0.0 ? Criticality::supercritical
                                                    : Criticality::subcritical;
  return out;
}

}  // namespace

const char* criticality_name(Criticality c) {
  return c == Criticality::supercritical ? "supercritical" : "subcritical";
}

std::optional<double> AmplitudePrediction::amplitude(double mu) const {
  if (mu * unstable_side < 0.0) return std::nullopt;
  const double radicand = slope * mu;
  if (radicand < 0.0) return std::nullopt;
  return std::sqrt(radicand);
}

AmplitudePrediction predict_dirac(const GameCoefficients& g,
                                  const HopfPoint& hopf) {
  const double A = g.A, B = g.B, C = g.C, tau = hopf.critical_value;
  const double P = -20.0 * A * A * A;
  const double Q = 5.0 * A * A * C * tau - 3.0 * A * B * B * tau - B * B;
  return make_prediction(P, Q, hopf.unstable_side);
}

AmplitudePrediction predict_uniform(const GameCoefficients& g,
                                    const HopfPoint& hopf) {
  const double A = g.A, B = g.B, C = g.C, tau = hopf.critical_value;
  const double P = 8.0 * A * A;
  const double Q = tau * (B * B - 2.0 * A * C);
  return make_prediction(P, Q, hopf.unstable_side);
}

SecondHarmonic uniform_second_harmonic(const GameCoefficients& g,
                                       const HopfPoint& hopf,
                                       double amplitude_hat) {
  const double w = hopf.omega0;
  return {0.0, -g.B * amplitude_hat * amplitude_hat /
                   (2.0 * w * w * hopf.critical_value)};
}

GammaAux gamma_aux(const GameCoefficients& g, int k, const HopfPoint& hopf) {
  const double A = g.A, B = g.B;
  const double w = hopf.omega0;
  const double r = w / hopf.critical_value;
  const double rho1 = std::pow(1.0 + r * r, -0.5 * k);
  const double rho2 = std::pow(1.0 + 4.0 * r * r, -0.5 * k);

  GammaAux aux;
  aux.theta1 = std::atan(2.0 * r);
  const double s = std::sin(k * aux.theta1);
  const double c = std::cos(k * aux.theta1);
  const double den = 4.0 * w * w + A * A * rho2 * rho2 + 4.0 * w * A * rho2 * s;
  aux.F1 = -(0.5 * A * B * rho1 * rho2 * c) / den;
  aux.F2 = -(0.5 * B * rho1 * (2.0 * w + A * rho2 * s)) / den;
  return aux;
}

AmplitudePrediction predict_gamma(const GameCoefficients& g, int k,
                                  const HopfPoint& hopf, GammaFormula formula) {
  if (k < 2) throw DomainError("gamma amplitude requires shape k >= 2");
  const double A = g.A, B = g.B, C = g.C;
  const double beta_c = hopf.critical_value;
  const double w = hopf.omega0;
  const double r = w / beta_c;
  const double rr = 1.0 + r * r;
  const GammaAux aux = gamma_aux(g, k, hopf);

  if (formula == GammaFormula::printed) {
    const double P = (k + 1) * A / beta_c * std::pow(rr, -0.5 * k) -
                     (k - 1.0) / (k + 1.0) * std::sqrt(rr) - r;
    const double Q =
        B * beta_c / (2.0 * (k + 1) * A) * std::sqrt(rr) *
            (aux.F1 * r + aux.F2) -
        B * r * std::pow(rr, -0.5 * (k + 1)) *
            (aux.F2 + 0.5 * aux.F1 * (r - 1.0)) +
        0.25 * C * std::pow(rr, -0.5 * k);
    return make_prediction(P, Q, hopf.unstable_side);
  }

  // Kernel transform at the first and second harmonic:
  //   H(i w)  = -i (1 + r^2)^{-k/2},
  //   H(2i w) = (1 + 4 r^2)^{-k/2} exp(-i k theta1).
  // The second-order correction is a2 e^{2iT} + c.c. with a2 = 2 (F2 - i F1).
  // Removing the resonant e^{iT} forcing at third order gives
  //   mu * Re[-dchi/dbeta / chi'] = -|z|^2 Re[N / chi'],
  // with N = B a2 (H(2iw) + conj H(iw)) + C H(iw) and, for the Gamma kernel,
  //   dchi/dbeta / chi' = k r^2 / (1 + i (k + 1) r),
  //   chi' = (1 + i (k + 1) r) / (1 + i r).
  const double q = std::pow(rr, -0.5 * k);
  const double rho2 = std::pow(1.0 + 4.0 * r * r, -0.5 * k);
  const Complex h1(0.0, -q);
  const Complex h2 = rho2 * std::polar(1.0, -k * aux.theta1);
  const Complex a2 = 2.0 * Complex(aux.F2, -aux.F1);
  const Complex resonant = B * a2 * (h2 + std::conj(h1)) + C * h1;
  const double P = 4.0 * k * r * r;
  const double Q =
      (resonant * Complex(1.0, r) * Complex(1.0, -(k + 1.0) * r)).real();
  return make_prediction(P, Q, hopf.unstable_side);
}

AmplitudePrediction predict_discrete(const DiscreteCoefficients& dc,
                                     const HopfPoint& hopf,
                                     DiscreteQForm form) {
  if (!(dc.p > 0.5)) {
    throw DomainError("discrete amplitude requires p > 0.5");
  }
  const DiscretePolynomials<double> poly = discrete_polynomials(dc, form);
  const double Q = poly.Q_tau * hopf.critical_value + poly.Q_const;
  return make_prediction(poly.P, Q, hopf.unstable_side);
}

AmplitudePrediction predict(const GameCoefficients& g,
                            const KernelFamily& family, const HopfPoint& hopf) {
  return std::visit(
      Overloaded{
          [&](const DiracFamily&) { return predict_dirac(g, hopf); },
          [&](const UniformFamily&) { return predict_uniform(g, hopf); },
          [&](const GammaFamily& f) { return predict_gamma(g, f.k, hopf); },
          [&](const DiscreteFamily& f) {
            return predict_discrete(discrete_coefficients(g, f.p), hopf);
          },
      },
      family);
}

}  // namespace hopfdelay
