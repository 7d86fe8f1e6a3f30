#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hopfdelay/game.hpp"

namespace hopfdelay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitParseError = 2;

/// Runs one invocation. `args` excludes the program name. CSV goes to `out`
/// (or the --out file), diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// "a,b,c,d" -> PayoffMatrix. Throws std::invalid_argument.
PayoffMatrix parse_game(const std::string& text);

/// Fixed CSV number format: 9 significant digits.
std::string format_number(double x);

}  // namespace hopfdelay::cli
