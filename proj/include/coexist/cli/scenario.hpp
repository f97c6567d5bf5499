#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coexist/model_core.hpp"

// Scenario files are flat `key = value` text. Model keys sit at the top; the
// optional [sweep] and [oracle] blocks hold run settings. `#` starts a comment.
//
//   alpha = 1.2
//   ...
//   [sweep]
//   tau_min = 1.05
//   tau_max = 2
//   steps = 20

namespace coexist::cli {

/// Malformed or invalid scenario; the message carries origin and line.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepBlock {
    double tau_min;
    double tau_max;
    int steps;
};

struct OracleBlock {
    int J = 2000;
    /// Relative tolerances the verify command applies to c_D and M.
    double tol_cutoff = 1e-4;
    double tol_mass = 1e-4;
};

struct Scenario {
    ModelParams params;
    std::optional<SweepBlock> sweep;
    OracleBlock oracle;
};

/// `origin` prefixes diagnostics (usually the file path).
Scenario parse_scenario(std::istream& in, const std::string& origin);
Scenario load_scenario(const std::string& path);

/// `steps` equally spaced values from tau_min to tau_max inclusive.
std::vector<double> sweep_grid(const SweepBlock& sweep);

} // namespace coexist::cli
