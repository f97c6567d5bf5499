#pragma once

#include <string>

#include "coexist/cli/scenario.hpp"

// Report builders behind the command-line subcommands. Each takes a parsed
// scenario and returns the text to emit plus the process exit code; all model
// numbers come from library calls.

namespace coexist::cli {

enum class Format { json, csv };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid_input = 1;
inline constexpr int infeasible = 2;
inline constexpr int verification_failed = 3;
} // namespace exit_code

struct CommandResult {
    int exit_code;
    std::string output;
};

/// Inputs that parse but do not suit a command (statics at tau = 1, a sweep
/// without a [sweep] block) throw ScenarioError.
CommandResult solve_closed_command(const Scenario& sc, Format format);
CommandResult solve_open_command(const Scenario& sc, Format format);
CommandResult statics_command(const Scenario& sc, Format format);
CommandResult sweep_command(const Scenario& sc, Format format);
/// Oracle-versus-analytic comparison in both economies plus a grid-refinement
/// table. Exit code 3 when a tolerance or a feasibility classification fails.
CommandResult verify_command(const Scenario& sc, Format format);

/// 17 significant digits; NA for non-finite values.
std::string format_number(double x);

} // namespace coexist::cli
