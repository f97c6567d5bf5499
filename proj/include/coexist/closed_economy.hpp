#pragma once

#include <optional>

#include "coexist/feasibility.hpp"
#include "coexist/model_core.hpp"

namespace coexist {

struct SmallFirmOutcome {
    double price;
    double quantity;
    double profit;
};

struct ClosedEquilibrium {
    double c_D;
    double M;
    double Theta;
    /// Common large-firm price; empty when N = 0.
    std::optional<double> P_large;
    double P_agg;
    FeasibilityReport report;
};

/// c_D = (beta phi / L)^(1/(k+2)). Throws SupportViolation when c_D > c_M.
double solve_cutoff_closed(const ModelParams& params);

/// Smallest c_M keeping the free-entry cutoff inside the support, for a given
/// freeness of trade (0 in autarky).
double min_support_bound(const ModelParams& params, double rho);

/// (L / 4 beta) * integral_0^{c_D} (c_D - c)^2 dG(c), Pareto closed form.
double expected_entry_profit_closed_form(double c_D, const ModelParams& params);

/// Same integral by adaptive quadrature against the Pareto density.
double expected_entry_profit_quadrature(double c_D, const ModelParams& params);

/// Closed form, cross-checked against quadrature (1e-8 relative).
/// Throws std::domain_error outside [0, c_M], InternalInconsistency on disagreement.
double expected_entry_profit(double c_D, const ModelParams& params);

/// Price, output and gross profit of a small firm with cost c. Empty when the
/// firm exits (c >= c_D; the marginal firm is counted as exiting).
std::optional<SmallFirmOutcome> small_firm_outcomes(double c, double c_D,
                                                    const ModelParams& params);

/// Best-response price of a large firm that internalizes its effect on the
/// aggregate price: (c_D + (1 - Theta) C) / (2 - Theta). Requires Theta in [0, 1).
double large_firm_price(double c_D, double Theta, double C);

/// (1 - Theta(0)) / (2 - Theta(0)) written out for `firm_count` large firms and
/// no small firms: (beta + gamma (n - 1)) / (2 beta + gamma (2n - 1)).
double zero_mass_markup_factor(double firm_count, const Preferences& prefs);

/// Right-hand side minus left-hand side of the closed-economy mass equation.
double closed_mass_residual(double M, double c_D, const ModelParams& params);

/// Unique positive root of the mass equation. Throws InfeasibleEquilibrium when
/// the positivity condition fails.
double solve_mass_closed(double c_D, const ModelParams& params);

/// Support, large-firm viability (N > 0 only) and positive-mass conditions.
FeasibilityReport coexistence_check(const ModelParams& params);

/// M c_D (2k+1) / (2(k+1)) + N P_large.
double aggregate_price_closed(double c_D, double M, double P_large, const ModelParams& params);

/// Aggregate price of a solved equilibrium; throws InternalInconsistency if the
/// choke price it implies differs from c_D by more than 1e-8.
double aggregate_price_closed(const ClosedEquilibrium& eq, const ModelParams& params);

/// Full closed-economy equilibrium. Throws SupportViolation or InfeasibleEquilibrium.
ClosedEquilibrium solve_closed(const ModelParams& params);

} // namespace coexist
