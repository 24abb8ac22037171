#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qtrank/tolerance.hpp"

namespace qtrank::cli {

enum Exit : int { Ok = 0, CheckFailed = 1, InputError = 2, AlgorithmError = 3 };

struct CliConfig {
    Tolerances tol = default_tolerances;   // verify tolerance overridden by QTRANK_TOL, then --tol
    std::uint64_t seed = 1;
    bool json = false;
    std::string in_path;
    std::string in_path2;
    std::optional<std::string> out_path;
};

/// Parses argv and runs one subcommand. Data goes to `out` (or --out), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtrank::cli
