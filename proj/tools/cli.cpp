#include "hopfdelay/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "hopfdelay/errors.hpp"
#include "hopfdelay/kernel.hpp"
#include "hopfdelay/lindstedt.hpp"
#include "hopfdelay/simulate.hpp"
#include "hopfdelay/spectrum.hpp"

namespace hopfdelay::cli {
namespace {

struct Options {
  std::string game;
  std::string kernel;
  std::string out_path;
  double mu = 0.0;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> s0;
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 0;
  double settle = 0.5;
  bool printed = false;
};

class ParseFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_game(const PayoffMatrix& m) {
  return format_number(m.a) + "," + format_number(m.b) + "," +
         format_number(m.c) + "," + format_number(m.d);
}

KernelFamily family_arg(const std::string& text) {
  try {
    return parse_family(text);
  } catch (const std::invalid_argument& e) {
    throw ParseFailure(e.what());
  }
}

DelayKernel kernel_arg(const std::string& text) {
  try {
    return parse_kernel(text);
  } catch (const std::invalid_argument& e) {
    throw ParseFailure(e.what());
  }
}

PayoffMatrix game_arg(const std::string& text) {
  try {
    return parse_game(text);
  } catch (const std::invalid_argument& e) {
    throw ParseFailure(e.what());
  }
}

void header(std::ostream& out, const PayoffMatrix& m, const std::string& spec) {
  out << "# game=" << format_game(m) << "\n";
  out << "# kernel=" << spec << "\n";
}

std::string sign_text(int s) { return s > 0 ? "1" : (s < 0 ? "-1" : "0"); }

int cmd_critical(const Options& o, std::ostream& out) {
  const PayoffMatrix m = game_arg(o.game);
  const KernelFamily family = family_arg(o.kernel);
  const GameCoefficients g = derive_coefficients(m);
  const StabilityVerdict v = hopf_point(g, family);
  const std::string param = parameter_name(parameter_of(family));

  header(out, m, format_family(family));
  out << "family,verdict,parameter,critical_value,omega0,crossing_sign\n";
  out << format_family(family) << ",";
  if (const auto* at = std::get_if<HopfAt>(&v)) {
    out << "HOPF," << param << "," << format_number(at->point.critical_value)
        << "," << format_number(at->point.omega0) << ","
        << sign_text(at->point.crossing_sign) << "\n";
  } else if (std::holds_alternative<StableForAllDelays>(v)) {
    out << "STABLE_FOR_ALL_DELAYS," << param << ",,,\n";
  } else {
    out << "NO_BIFURCATION," << param << ",,,\n";
    out << "# reason=" << std::get<NoBifurcation>(v).reason << "\n";
  }
  return kExitOk;
}

int cmd_amplitude(const Options& o, std::ostream& out) {
  const PayoffMatrix m = game_arg(o.game);
  const KernelFamily family = family_arg(o.kernel);
  const GameCoefficients g = derive_coefficients(m);
  const HopfPoint hopf = require_hopf_point(g, family);

  AmplitudePrediction pred;
  if (o.printed) {
    if (const auto* f = std::get_if<GammaFamily>(&family)) {
      pred = predict_gamma(g, f->k, hopf, GammaFormula::printed);
    } else if (const auto* d = std::get_if<DiscreteFamily>(&family)) {
      pred = predict_discrete(discrete_coefficients(g, d->p), hopf,
                              DiscreteQForm::printed);
    } else {
      pred = predict(g, family, hopf);
    }
  } else {
    pred = predict(g, family, hopf);
  }

  header(out, m, format_family(family));
  out << "# " << parameter_name(hopf.parameter) << "_cr="
      << format_number(hopf.critical_value) << " mu=" << format_number(o.mu)
      << (o.printed ? " formula=printed" : "") << "\n";
  out << "P,Q,slope,amplitude,criticality\n";
  const auto amp = pred.amplitude(o.mu);
  out << format_number(pred.P) << "," << format_number(pred.Q) << ","
      << format_number(pred.slope) << ","
      << (amp ? format_number(*amp) : std::string("NOT_ON_UNSTABLE_SIDE"))
      << "," << criticality_name(pred.criticality) << "\n";
  return kExitOk;
}

std::optional<HopfPoint> hopf_for(const GameCoefficients& g,
                                  const KernelFamily& family) {
  const StabilityVerdict v = hopf_point(g, family);
  if (const auto* at = std::get_if<HopfAt>(&v)) return at->point;
  return std::nullopt;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const PayoffMatrix m = game_arg(o.game);
  const DelayKernel kernel = kernel_arg(o.kernel);
  const GameCoefficients g = derive_coefficients(m);
  validate(kernel);
  const auto hopf = hopf_for(g, family_of(kernel));
  const double mu =
      hopf ? bifurcation_parameter(kernel) - hopf->critical_value : 0.0;

  SimConfig cfg;
  cfg.s0 = o.s0.value_or(g.s_star + 0.01);
  cfg.dt = o.dt ? align_dt(kernel, *o.dt) : default_dt(kernel);
  cfg.horizon = o.horizon.value_or(default_horizon(hopf, mu));
  const Trajectory traj = integrate(m, kernel, cfg);

  header(out, m, format_kernel(kernel));
  out << "# dt=" << format_number(cfg.dt)
      << " horizon=" << format_number(cfg.horizon)
      << " s0=" << format_number(cfg.s0) << " history=constant\n";
  out << "t,s\n";
  for (std::size_t i = 0; i < traj.s.size(); ++i) {
    out << format_number(traj.t[i]) << "," << format_number(traj.s[i]) << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const PayoffMatrix m = game_arg(o.game);
  const KernelFamily family = family_arg(o.kernel);
  derive_coefficients(m);

  SweepConfig cfg;
  cfg.dt = o.dt;
  cfg.horizon = o.horizon;
  cfg.settle_fraction = o.settle;
  const auto rows = amplitude_sweep(m, family, o.from, o.to, o.steps, cfg);

  header(out, m, format_family(family));
  out << "# from=" << format_number(o.from) << " to=" << format_number(o.to)
      << " steps=" << o.steps << " settle=" << format_number(o.settle)
      << " s0=s*+0.01"
      << " dt=" << (o.dt ? format_number(*o.dt) : std::string("auto"))
      << " horizon="
      << (o.horizon ? format_number(*o.horizon) : std::string("auto")) << "\n";
  out << "param,predicted_amplitude,simulated_amplitude,simulated_frequency,"
         "verdict\n";
  for (const auto& row : rows) {
    out << format_number(row.param) << ","
        << (row.predicted_amplitude ? format_number(*row.predicted_amplitude)
                                    : std::string())
        << ",";
    if (row.error.empty()) {
      out << format_number(row.simulated_amplitude) << ","
          << format_number(row.simulated_frequency);
    } else {
      out << ",";
    }
    out << "," << verdict_name(row.verdict) << "\n";
  }
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      out << "# error param=" << format_number(row.param) << ": " << row.error
          << "\n";
    }
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const PayoffMatrix m = game_arg(o.game);
  const KernelFamily family = family_arg(o.kernel);
  const GameCoefficients g = derive_coefficients(m);
  const HopfPoint hopf = require_hopf_point(g, family);
  const double residual = std::abs(char_residual(
      g, with_parameter(family, hopf.critical_value), {0.0, hopf.omega0}));
  const int tracked = crossing_direction(g, family, hopf);

  header(out, m, format_family(family));
  out << "family,critical_value,omega0,residual,crossing_sign,tracked_sign\n";
  out << format_family(family) << "," << format_number(hopf.critical_value)
      << "," << format_number(hopf.omega0) << "," << format_number(residual)
      << "," << sign_text(hopf.crossing_sign) << "," << sign_text(tracked)
      << "\n";
  if (residual > 1e-9) {
    err << "error: characteristic residual " << format_number(residual)
        << " exceeds 1e-9\n";
    return kExitDomainError;
  }
  if (tracked != hopf.crossing_sign) {
    err << "error: tracked crossing sign disagrees with closed form\n";
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

PayoffMatrix parse_game(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size() || !std::isfinite(v)) {
      throw std::invalid_argument("invalid payoff '" + token +
                                  "' in --game (expected a,b,c,d)");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 4) {
    throw std::invalid_argument("--game needs exactly four payoffs a,b,c,d");
  }
  return {values[0], values[1], values[2], values[3]};
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Hopf bifurcation analysis and simulation of the two-strategy "
               "replicator dynamics with distributed delays"};
  app.require_subcommand(1, 1);
  Options o;

  const char* kGameHelp = "payoff matrix a,b,c,d (use --game=a,b,c,d when a < 0)";
  const char* kFamilyHelp =
      "kernel family: dirac | uniform | gamma:<k> | discrete:<p>";
  auto common = [&](CLI::App* sub, const char* kernel_help) {
    sub->add_option("--game", o.game, kGameHelp)->required();
    sub->add_option("--kernel", o.kernel, kernel_help)->required();
    sub->add_option("--out", o.out_path, "write CSV here instead of stdout");
  };

  auto* critical = app.add_subcommand("critical", "closed-form Hopf point");
  common(critical, kFamilyHelp);

  auto* amplitude =
      app.add_subcommand("amplitude", "predicted limit-cycle amplitude");
  common(amplitude, kFamilyHelp);
  amplitude->add_option("--mu", o.mu, "parameter offset from critical")
      ->required();
  amplitude->add_flag("--printed-formula", o.printed,
                      "use the printed Gamma / discrete quotients");

  auto* simulate = app.add_subcommand("simulate", "integrate s(t)");
  common(simulate,
         "full kernel: dirac:<tau> | uniform:<tau_max> | gamma:<k>:<beta> | "
         "discrete:<p>:<tau>");
  simulate->add_option("--horizon", o.horizon,
                       "time span (default: 40 periods of omega0, longer near "
                       "criticality; 200 without a Hopf point)");
  simulate->add_option("--dt", o.dt,
                       "step (default: characteristic lag / 200; shrunk to "
                       "align delays with the grid)");
  simulate->add_option("--s0", o.s0, "initial share (default: s* + 0.01)");

  auto* sweep = app.add_subcommand("sweep", "predicted vs simulated amplitude");
  common(sweep, kFamilyHelp);
  sweep->add_option("--from", o.from, "first parameter value")->required();
  sweep->add_option("--to", o.to, "last parameter value")->required();
  sweep->add_option("--steps", o.steps, "number of rows")->required();
  sweep->add_option("--horizon", o.horizon, "time span per row (default: auto)");
  sweep->add_option("--dt", o.dt, "step per row (default: auto)");
  sweep->add_option("--settle", o.settle,
                    "fraction of each run discarded as transient (default 0.5)");

  auto* verify = app.add_subcommand(
      "verify", "residual and tracked crossing direction at the Hopf point");
  common(verify, kFamilyHelp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  }

  std::ofstream file;
  std::ostringstream buffer;
  auto dispatch = [&](std::ostream& sink) {
    if (critical->parsed()) return cmd_critical(o, sink);
    if (amplitude->parsed()) return cmd_amplitude(o, sink);
    if (simulate->parsed()) return cmd_simulate(o, sink);
    if (sweep->parsed()) return cmd_sweep(o, sink);
    return cmd_verify(o, sink, err);
  };

  int status = kExitOk;
  try {
    status = dispatch(buffer);
  } catch (const ParseFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }

  if (!o.out_path.empty()) {
    file.open(o.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << o.out_path << " for writing\n";
      return kExitDomainError;
    }
    file << buffer.str();
  } else {
    out << buffer.str();
  }
  return status;
}

}  // namespace hopfdelay::cli
