#pragma once

#include <vector>

#include "coexist/model_core.hpp"

// Independent check of the analytic equilibria. Stage 2 is solved by damped
// best-response iteration on the large-firm prices, with the choke price and the
// discretized continuum of small firms solved exactly against each iterate; stage 1 finds the free-entry cutoff by quadrature of
// expected profits and the entrant mass at which the simulated choke price
// equals that cutoff. Nothing here uses the Pareto closed-form solutions.

namespace coexist {

enum class EconomyMode { closed, open };

struct LargeFirmGroup {
    double delivered_cost;
    double count;
};

/// Small firms are grouped in cells; node j stands for a mass weights[j] spread
/// uniformly over delivered costs [grid_costs[j] - half_widths[j],
/// grid_costs[j] + half_widths[j]].
struct DiscretizedMarket {
    std::vector<double> grid_costs;
    std::vector<double> half_widths;
    std::vector<double> weights;
    std::vector<LargeFirmGroup> large;
    std::vector<double> prices;       ///< small-node prices of the current iterate
    /// One per large group. Positive entries seed stage 2; on output an inactive
    /// group holds the choke price.
    std::vector<double> large_prices;
    double P_agg = 0.0; ///< output only

    double total_mass() const;
};

/// J equal cells on [0, c_M] with masses entrant_mass * (G(b) - G(a)). In open
/// mode the foreign exporters add J cells at delivered cost tau * c, and the
/// large sector has N domestic firms at C and N foreign firms at tau C.
DiscretizedMarket discretize_market(const ModelParams& params, EconomyMode mode,
                                    double entrant_mass, int J);

struct Stage2Options {
    double damping = 0.5;
    double tolerance = 1e-12;
    long max_iterations = 100000;
    /// Changes in the choke price must keep one sign after this many iterations.
    int monotone_after = 10;
};

struct Stage2Result {
    DiscretizedMarket market; ///< converged prices and aggregate price
    double p_max;
    double selling_mass;
    double active_large;
    double Theta;
    long iterations;
    double damping; ///< damping factor that converged
};

/// Damped best-response iteration to the stage-2 price equilibrium. On
/// non-convergence or non-monotone choke-price updates the damping factor
/// is halved once and the iteration restarted; a second failure throws
/// ConvergenceError.
Stage2Result stage2_fixed_point(const DiscretizedMarket& market, const Preferences& prefs,
                                Stage2Options options = {});

/// Expected gross profit of an entrant at domestic cutoff c_D, by quadrature.
/// Open mode adds export profits at cutoff c_D / tau.
double oracle_entry_profit(double c_D, const ModelParams& params, EconomyMode mode,
                           double rel_tol = 1e-12);

/// Free-entry cutoff by bisection on oracle_entry_profit.
/// Throws SupportViolation when even c_D = c_M leaves entry unprofitable.
double oracle_cutoff(const ModelParams& params, EconomyMode mode, double rel_tol = 1e-12);

struct OracleOptions {
    int J = 2000;
    double quadrature_tol = 1e-12;
    /// Relative bracket width at which the entrant-mass bisection stops.
    double mass_rel_tol = 1e-12;
    Stage2Options stage2;
};

struct OracleResult {
    double c_D;
    double M;            ///< simulated mass of sellers per market
    double entrant_mass; ///< per country
    double p_max;
    double Theta;
};

/// (c_D, M) without closed forms. Throws SupportViolation or InfeasibleEquilibrium
/// using the same condition names as the analytic solvers.
OracleResult free_entry_oracle(const ModelParams& params, EconomyMode mode,
                               OracleOptions options = {});

} // namespace coexist
