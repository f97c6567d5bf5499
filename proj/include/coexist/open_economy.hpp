#pragma once

#include <optional>

#include "coexist/closed_economy.hpp"
#include "coexist/feasibility.hpp"
#include "coexist/model_core.hpp"

// Two symmetric countries with segmented markets and an iceberg trade cost tau.
// Country-indexed quantities collapse to single values once the symmetric fixed
// point has been confirmed.

namespace coexist {

struct OpenCutoffs {
    double c_D; ///< domestic cutoff (common to both countries)
    double c_X; ///< export cutoff, c_D / tau
    double rho; ///< freeness of trade
};

struct CountryCutoffs {
    double home;
    double foreign;
};

struct MassAccounting {
    double M_entrants; ///< entrants per country
    double M_producers; ///< domestic producers per country
};

struct OpenSmallFirmOutcome {
    std::optional<SmallFirmOutcome> domestic;
    std::optional<SmallFirmOutcome> exported; ///< delivered price, shipped quantity, export profit
};

struct OpenLargePrices {
    double P_D; ///< domestic price
    double P_X; ///< delivered export price
};

struct OpenEquilibrium {
    double c_D;
    double c_X;
    double rho;
    double M;   ///< small firms selling in each country
    double M_entrants;
    double M_producers;
    double Theta;
    std::optional<double> P_D; ///< empty when N = 0
    std::optional<double> P_X;
    FeasibilityReport report;

    OpenCutoffs cutoffs() const { return {c_D, c_X, rho}; }
};

/// Domestic cutoffs of both countries from the pair of free-entry conditions
/// c_h^(k+2) + rho c_f^(k+2) = beta phi / L. Symmetric by construction; at
/// rho = 1 the system is singular and the symmetric solution is selected.
CountryCutoffs country_cutoffs(const ModelParams& params);

/// Left side minus right side of one country's free-entry condition.
double open_free_entry_residual(double c_home, double c_foreign, const ModelParams& params);

/// c_D = [beta phi / (L (1 + rho))]^(1/(k+2)), c_X = c_D / tau.
/// Throws SupportViolation when c_D > c_M.
OpenCutoffs solve_cutoffs_open(const ModelParams& params);

/// Domestic and export outcomes of a small firm with production cost c in [0, c_M].
OpenSmallFirmOutcome open_small_firm_outcomes(double c, const OpenCutoffs& cutoffs,
                                              const ModelParams& params);

/// Large-firm prices with Theta computed over M + 2N sellers.
OpenLargePrices open_large_prices(const OpenCutoffs& cutoffs, double Theta,
                                  const ModelParams& params);

/// Support, large-firm domestic and export viability, and the positive-mass
/// condition in two variants: with the internalization of 2N large firms
/// (binding) and with the N-firm factor as printed (informational).
FeasibilityReport open_feasibility(const OpenCutoffs& cutoffs, const ModelParams& params);

/// True when the two positive-mass variants classify the point differently.
bool positivity_variants_disagree(const FeasibilityReport& report);

/// Right minus left side of the mass equation of a market whose cutoff is c_D.
double open_mass_residual(double M, double c_D, const ModelParams& params);

/// Mass of small firms selling in each country. Throws InfeasibleEquilibrium
/// when the binding positive-mass condition fails.
double solve_mass_open(const OpenCutoffs& cutoffs, const ModelParams& params);

/// Entrants M (c_M / c_D)^k / (1 + rho) and producers M / (1 + rho) per country.
MassAccounting mass_accounting(double M, const OpenCutoffs& cutoffs, const ModelParams& params);

/// Full symmetric open-economy equilibrium. Throws SupportViolation or
/// InfeasibleEquilibrium (the latter names the failed regime assumption).
OpenEquilibrium solve_open(const ModelParams& params);

/// M c_D (2k+1) / (2(k+1)) + N P_D + N P_X; throws InternalInconsistency if
/// the implied choke price misses c_D by more than 1e-8.
double aggregate_price_open(const OpenEquilibrium& eq, const ModelParams& params);

} // namespace coexist
