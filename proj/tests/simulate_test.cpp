#include "hopfdelay/simulate.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hopfdelay/errors.hpp"
#include "support/linear_chain.hpp"
#include "support/test_games.hpp"

namespace hopfdelay {
namespace {

using std::numbers::pi;
using testing::kNarrowGame;
using testing::kSkewedGame;
using testing::kWideGame;

bool inside_unit_interval(const Trajectory& tr) {
  return std::all_of(tr.s.begin(), tr.s.end(),
                     [](double s) { return s > 0.0 && s < 1.0; });
}

Trajectory synthetic(double horizon, double dt, double (*f)(double)) {
  Trajectory tr;
  tr.dt = dt;
  tr.s_star = 0.5;
  const auto n = static_cast<std::size_t>(horizon / dt);
  for (std::size_t i = 0; i <= n; ++i) {
    tr.t.push_back(i * dt);
    tr.s.push_back(f(i * dt));
  }
  return tr;
}

TEST(Integrate, EquilibriumIsPreserved) {
  const auto g = derive_coefficients(kSkewedGame);
  for (const DelayKernel& k :
       {DelayKernel{Dirac{2.0}}, DelayKernel{Uniform{5.0}},
        DelayKernel{Gamma{3, 1.0}}, DelayKernel{Discrete{0.6, 4.0}}}) {
    SimConfig cfg;
    cfg.s0 = g.s_star;
    cfg.horizon = 100.0;
    cfg.dt = 0.01;
    const auto tr = integrate(kSkewedGame, k, cfg);
    double dev = 0.0;
    for (double s : tr.s) dev = std::max(dev, std::abs(s - g.s_star));
    EXPECT_LE(dev, 1e-12) << format_kernel(k);
  }
}

TEST(Integrate, ZeroDelayConvergesMonotonically) {
  SimConfig cfg;
  cfg.s0 = 0.9;
  cfg.horizon = 60.0;
  cfg.dt = 0.01;
  const auto tr = integrate(kWideGame, Dirac{0.0}, cfg);
  EXPECT_LT(std::abs(tr.s.back() - 0.5), 1e-6);
  for (std::size_t i = 1; i < tr.s.size(); ++i) {
    EXPECT_LE(tr.s[i], tr.s[i - 1]);
  }
  EXPECT_EQ(tr.t.size(), 6001u);
  EXPECT_NEAR(tr.t.back(), 60.0, 1e-9);
}

TEST(Integrate, FourthOrderConvergence) {
  const double tau = pi / 1.5;
  for (const DelayKernel& k : {DelayKernel{Dirac{tau}}, DelayKernel{Uniform{tau}},
                               DelayKernel{Discrete{0.7, tau}}}) {
    double finals[3];
    for (int j = 0; j < 3; ++j) {
      SimConfig cfg;
      cfg.s0 = 0.3;
      cfg.horizon = 4 * tau;
      cfg.dt = tau / (50 << j);
      finals[j] = integrate(kSkewedGame, k, cfg).s.back();
    }
    const double ratio =
        std::abs(finals[0] - finals[1]) / std::abs(finals[1] - finals[2]);
    EXPECT_GT(ratio, 14.0) << format_kernel(k);
    EXPECT_LT(ratio, 18.0) << format_kernel(k);
  }
}

TEST(Integrate, GammaMatchesLinearChain) {
  const int k = 3;
  const double beta = 1.0;
  const double horizon = 100.0;
  SimConfig cfg;
  cfg.s0 = 0.55;
  cfg.horizon = horizon;
  cfg.dt = 0.01;
  const auto tr = integrate(kWideGame, Gamma{k, beta}, cfg);
  const auto ref = testing::linear_chain_solution(kWideGame, k, beta, 0.55,
                                                  horizon, 0.001, 10);
  ASSERT_EQ(ref.size(), tr.s.size());
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    err = std::max(err, std::abs(ref[i] - tr.s[i]));
  }
  EXPECT_LT(err, 1e-7);
}

TEST(Integrate, UniformAboveCriticalOscillates) {
  const auto g = derive_coefficients(kWideGame);
  const auto h = require_hopf_point(g, UniformFamily{});
  const double mu = 0.03;
  const Uniform k{h.critical_value + mu};
  SimConfig cfg;
  cfg.s0 = 0.51;
  cfg.dt = default_dt(k);
  cfg.horizon = default_horizon(h, mu);
  cfg.omega0 = h.omega0;
  const auto tr = integrate(kWideGame, k, cfg);
  EXPECT_TRUE(inside_unit_interval(tr));
  const auto est = estimate_cycle(tr);
  EXPECT_EQ(est.verdict, CycleVerdict::limit_cycle);
  const double predicted = *predict(g, UniformFamily{}, h).amplitude(mu);
  EXPECT_NEAR(est.amplitude, predicted, 0.1 * predicted);
}

TEST(Integrate, DiracAboveCriticalMatchesPrediction) {
  const auto g = derive_coefficients(kWideGame);
  const auto h = require_hopf_point(g, DiracFamily{});
  const double mu = 0.05;
  const Dirac k{h.critical_value + mu};
  SimConfig cfg;
  cfg.s0 = 0.51;
  cfg.dt = default_dt(k);
  cfg.horizon = default_horizon(h, mu);
  const auto est = estimate_cycle(integrate(kWideGame, k, cfg));
  EXPECT_EQ(est.verdict, CycleVerdict::limit_cycle);
  EXPECT_NEAR(est.amplitude, 0.1545, 0.1 * 0.1545);
  EXPECT_NEAR(est.frequency, 0.75, 0.05 * 0.75);
}

TEST(Integrate, CycleIsIndependentOfInitialSide) {
  const auto g = derive_coefficients(kWideGame);
  const auto h = require_hopf_point(g, DiracFamily{});
  const double mu = 0.01 * h.critical_value;
  const Dirac k{h.critical_value + mu};
  double amps[2];
  int j = 0;
  for (double offset : {0.01, -0.01}) {
    SimConfig cfg;
    cfg.s0 = g.s_star + offset;
    cfg.dt = default_dt(k);
    cfg.horizon = default_horizon(h, mu);
    amps[j++] = estimate_cycle(integrate(kWideGame, k, cfg)).amplitude;
  }
  EXPECT_NEAR(amps[0], amps[1], 0.02 * amps[0]);
}

TEST(Integrate, RejectsCoarseStep) {
  SimConfig cfg;
  cfg.dt = 0.1;
  EXPECT_THROW(integrate(kWideGame, Dirac{2.0}, cfg), ResolutionError);
  cfg.dt = 0.04;
  EXPECT_NO_THROW(integrate(kWideGame, Dirac{2.0}, cfg));
}

TEST(Integrate, ReportsBlowup) {
  SimConfig cfg;
  cfg.s0 = 0.6;
  cfg.dt = 0.1;
  cfg.horizon = 10.0;
  try {
    integrate(PayoffMatrix{-1500, 3000, 0, 1500}, Dirac{0.0}, cfg);
    FAIL() << "expected BlowupError";
  } catch (const BlowupError& e) {
    EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos) << e.what();
  }
}

TEST(Integrate, RejectsInvalidConfiguration) {
  SimConfig cfg;
  cfg.s0 = 1.0;
  EXPECT_THROW(integrate(kWideGame, Dirac{1.0}, cfg), DomainError);
  cfg.s0 = 0.5;
  cfg.history = 0.0;
  EXPECT_THROW(integrate(kWideGame, Dirac{1.0}, cfg), DomainError);
  cfg.history.reset();
  cfg.horizon = -1.0;
  EXPECT_THROW(integrate(kWideGame, Dirac{1.0}, cfg), DomainError);
  cfg.horizon = 100.0;
  cfg.omega0 = 0.75;
  EXPECT_THROW(integrate(kWideGame, Dirac{1.0}, cfg), DomainError);
  cfg.omega0.reset();
  EXPECT_THROW(integrate(PayoffMatrix{1, 0, 0, 1}, Dirac{1.0}, cfg),
               NoInteriorEquilibrium);
  EXPECT_THROW(integrate(kWideGame, Gamma{0, 1.0}, cfg), DomainError);
}

TEST(Integrate, HistoryDiffersFromInitialValue) {
  const auto g = derive_coefficients(kWideGame);
  SimConfig cfg;
  cfg.s0 = g.s_star;
  cfg.history = g.s_star + 0.05;
  cfg.horizon = 10.0;
  const auto tr = integrate(kWideGame, Dirac{2.0}, cfg);
  // While the lagged value is the raised history, s decreases.
  EXPECT_LT(tr.s[100], g.s_star);
}

TEST(EstimateCycle, SyntheticCosine) {
  const auto tr = synthetic(200.0, 0.01, [](double t) {
    return 0.5 + 0.1 * std::cos(0.75 * t);
  });
  const auto est = estimate_cycle(tr);
  EXPECT_EQ(est.verdict, CycleVerdict::limit_cycle);
  EXPECT_NEAR(est.amplitude, 0.1, 1e-4);
  EXPECT_NEAR(est.frequency, 0.75, 1e-3);
  EXPECT_NEAR(est.mean_level, 0.5, 1e-3);
  EXPECT_GE(est.peaks, 6u);
}

TEST(EstimateCycle, ConstantSignalHasConverged) {
  const auto tr = synthetic(100.0, 0.01, [](double) { return 0.5; });
  const auto est = estimate_cycle(tr);
  EXPECT_EQ(est.verdict, CycleVerdict::converged_to_equilibrium);
  EXPECT_EQ(est.amplitude, 0.0);
}

TEST(EstimateCycle, DecayingOscillationIsUndecided) {
  const auto tr = synthetic(400.0, 0.01, [](double t) {
    return 0.5 + 0.1 * std::exp(-0.01 * t) * std::cos(0.75 * t);
  });
  EXPECT_EQ(estimate_cycle(tr).verdict, CycleVerdict::undecided);
}

TEST(EstimateCycle, ShortWindowIsRejected) {
  const auto tr = synthetic(20.0, 0.01, [](double t) {
    return 0.5 + 0.1 * std::cos(0.75 * t);
  });
  EXPECT_THROW(estimate_cycle(tr), TooShort);
  EXPECT_THROW(estimate_cycle(tr, 1.0), DomainError);
}

TEST(EstimateCycle, VerdictNames) {
  EXPECT_STREQ(verdict_name(CycleVerdict::converged_to_equilibrium),
               "converged-to-equilibrium");
  EXPECT_STREQ(verdict_name(CycleVerdict::limit_cycle), "limit-cycle");
  EXPECT_STREQ(verdict_name(CycleVerdict::undecided), "undecided");
}

TEST(Defaults, StepFollowsCharacteristicLag) {
  EXPECT_DOUBLE_EQ(default_dt(Dirac{2.0}), 0.01);
  EXPECT_DOUBLE_EQ(default_dt(Uniform{6.0}), 0.03);
  EXPECT_DOUBLE_EQ(default_dt(Gamma{3, 1.0}), 0.015);
  EXPECT_DOUBLE_EQ(default_dt(Discrete{0.6, 4.0}), 0.02);
  EXPECT_DOUBLE_EQ(default_dt(Dirac{0.0}), 0.01);
}

TEST(Defaults, AlignedStepPutsLagsOnGrid) {
  const double d = align_dt(Dirac{1.0037}, 0.01);
  EXPECT_LE(d, 0.01);
  EXPECT_EQ(discretize(Dirac{1.0037}, d).snap_error < 1e-12, true);
  const double u = align_dt(Uniform{1.0}, 0.03);
  EXPECT_NEAR(u, 1.0 / 34.0, 1e-15);
  EXPECT_EQ(align_dt(Gamma{3, 1.0}, 0.0123), 0.0123);
}

TEST(Defaults, Horizon) {
  EXPECT_EQ(default_horizon(std::nullopt, 0.0), 200.0);
  HopfPoint h;
  h.omega0 = 0.75;
  h.crossing_rate = 0.2;
  const double period = 2 * pi / 0.75;
  EXPECT_NEAR(default_horizon(h, 10.0), 40 * period, 1e-9);
  EXPECT_NEAR(default_horizon(h, 0.01), 10000.0, 1e-9);
  EXPECT_NEAR(default_horizon(h, 1e-6), 2000 * period, 1e-9);
}

TEST(Sweep, DiracAcrossCriticalDelay) {
  const auto g = derive_coefficients(kWideGame);
  const auto h = require_hopf_point(g, DiracFamily{});
  const auto rows = amplitude_sweep(kWideGame, DiracFamily{},
                                    h.critical_value - 0.02,
                                    h.critical_value + 0.1, 13);
  ASSERT_EQ(rows.size(), 13u);
  std::vector<const SweepRow*> above;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_TRUE(r.error.empty()) << r.error;
    if (i > 0) {
      EXPECT_GT(r.param, rows[i - 1].param);
    }
    const double mu = r.param - h.critical_value;
    if (std::abs(mu) < 1e-9) continue;
    if (mu < 0) {
      EXPECT_EQ(r.verdict, CycleVerdict::converged_to_equilibrium) << mu;
      EXPECT_FALSE(r.predicted_amplitude.has_value());
    } else {
      EXPECT_EQ(r.verdict, CycleVerdict::limit_cycle) << mu;
      ASSERT_TRUE(r.predicted_amplitude.has_value());
      EXPECT_NEAR(r.simulated_amplitude, *r.predicted_amplitude,
                  0.1 * *r.predicted_amplitude)
          << mu;
      above.push_back(&r);
    }
  }
  ASSERT_GE(above.size(), 3u);
  for (std::size_t i = 1; i < above.size(); ++i) {
    EXPECT_GT(above[i]->simulated_amplitude, above[i - 1]->simulated_amplitude);
  }
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double mu = above[i]->param - h.critical_value;
    const double c = above[i]->simulated_amplitude / std::sqrt(mu);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  EXPECT_LT(hi / lo - 1.0, 0.15);
}

TEST(Sweep, StableDiscreteKernelAlwaysConverges) {
  SweepConfig cfg;
  cfg.horizon = 12000.0;
  const auto rows =
      amplitude_sweep(kNarrowGame, DiscreteFamily{0.5}, 5.0, 50.0, 4, cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.verdict, CycleVerdict::converged_to_equilibrium) << r.param;
    EXPECT_FALSE(r.predicted_amplitude.has_value());
  }
}

TEST(Sweep, FailedRowsAreRecorded) {
  SweepConfig cfg;
  cfg.horizon = 10.0;
  const auto rows = amplitude_sweep(kWideGame, DiracFamily{}, 2.5, 3.0, 2, cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.error.empty());
    EXPECT_TRUE(std::isnan(r.simulated_amplitude));
  }
  EXPECT_THROW(amplitude_sweep(kWideGame, DiracFamily{}, 1.0, 2.0, 0),
               DomainError);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepConfig one;
  one.threads = 1;
  one.horizon = 300.0;
  SweepConfig many = one;
  many.threads = 3;
  const auto a = amplitude_sweep(kSkewedGame, UniformFamily{}, 8.0, 9.0, 5, one);
  const auto b = amplitude_sweep(kSkewedGame, UniformFamily{}, 8.0, 9.0, 5, many);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].param, b[i].param);
    EXPECT_EQ(a[i].simulated_amplitude, b[i].simulated_amplitude);
    EXPECT_EQ(a[i].verdict, b[i].verdict);
    EXPECT_EQ(a[i].error, b[i].error);
  }
}

}  // namespace
}  // namespace hopfdelay
