#include "coexist/open_economy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coexist/errors.hpp"
#include "coexist/numerics.hpp"

namespace coexist {

namespace {

double free_entry_target(const ModelParams& p) {
    return p.prefs().beta() * technology_index(p.small()) / p.L();
}

} // namespace

CountryCutoffs country_cutoffs(const ModelParams& p) {
    const double k = p.small().k();
    const double rho = freeness(p.tau(), k);
    const double b = free_entry_target(p);
    double x_home = 0.0;
    double x_foreign = 0.0;
    if (rho < 1.0) {
        // [1 rho; rho 1] x = (b, b) by Cramer's rule.
        const double det = 1.0 - rho * rho;
        x_home = (b - rho * b) / det;
        x_foreign = (b - rho * b) / det;
    } else {
        x_home = x_foreign = 0.5 * b;
    }
    return {std::pow(x_home, 1.0 / (k + 2.0)), std::pow(x_foreign, 1.0 / (k + 2.0))};
}

double open_free_entry_residual(double c_home, double c_foreign, const ModelParams& p) {
    const double k = p.small().k();
    const double rho = freeness(p.tau(), k);
    return std::pow(c_home, k + 2.0) + rho * std::pow(c_foreign, k + 2.0) - free_entry_target(p);
}

OpenCutoffs solve_cutoffs_open(const ModelParams& p) {
    const double k = p.small().k();
    const double rho = freeness(p.tau(), k);
    const double c_D = std::pow(free_entry_target(p) / (1.0 + rho), 1.0 / (k + 2.0));
    if (c_D > p.small().c_M())
        throw SupportViolation(c_D, p.small().c_M(), min_support_bound(p, rho));
    return {c_D, c_D / p.tau(), rho};
}

OpenSmallFirmOutcome open_small_firm_outcomes(double c, const OpenCutoffs& cut,
                                              const ModelParams& p) {
    if (!(c >= 0.0 && c <= p.small().c_M()))
        throw std::domain_error("open_small_firm_outcomes: cost outside [0, c_M]");
    OpenSmallFirmOutcome out{small_firm_outcomes(c, cut.c_D, p), std::nullopt};
    if (c < cut.c_X) {
        const double tau = p.tau();
        const double price = 0.5 * tau * (cut.c_X + c);
        const double quantity = p.L() / p.prefs().beta() * (price - tau * c);
        out.exported = SmallFirmOutcome{price, quantity, (price - tau * c) * quantity};
    }
    return out;
}

OpenLargePrices open_large_prices(const OpenCutoffs& cut, double Theta, const ModelParams& p) {
    const double C = p.large().C();
    return {large_firm_price(cut.c_D, Theta, C), p.tau() * large_firm_price(cut.c_X, Theta, C)};
}

FeasibilityReport open_feasibility(const OpenCutoffs& cut, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double N = p.large().N();
    const double C = p.large().C();
    FeasibilityReport r;
    r.add(condition::support, p.small().c_M(), cut.c_D, Relation::greater_equal);
    if (N > 0.0) {
        r.add(condition::large_domestic, cut.c_D, C);
        r.add(condition::large_export, cut.c_X, C);
    }
    const double lhs = (pr.alpha() - cut.c_D) * pr.beta() / pr.gamma();
    const double large_term = N * ((cut.c_D - C) + (cut.c_D - p.tau() * C));
    r.add(condition::open_positive_mass, lhs, large_term * zero_mass_markup_factor(2.0 * N, pr));
    r.add(condition::open_positive_mass_printed, lhs, large_term * zero_mass_markup_factor(N, pr),
          Relation::greater, false);
    return r;
}

bool positivity_variants_disagree(const FeasibilityReport& r) {
    const auto* consistent = r.find(condition::open_positive_mass);
    const auto* printed = r.find(condition::open_positive_mass_printed);
    return consistent && printed && consistent->pass() != printed->pass();
}

double open_mass_residual(double M, double c_D, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double N = p.large().N();
    const double C = p.large().C();
    const double Theta = internalization(M, 2.0 * N, pr);
    const double lhs = (pr.alpha() - c_D) * pr.beta() / pr.gamma();
    const double rhs = 0.5 * M * c_D / (k + 1.0) +
                       (1.0 - Theta) / (2.0 - Theta) * N * ((c_D - C) + (c_D - p.tau() * C));
    return rhs - lhs;
}

double solve_mass_open(const OpenCutoffs& cut, const ModelParams& p) {
    FeasibilityReport full = open_feasibility(cut, p);
    const Condition* positivity = full.find(condition::open_positive_mass);
    if (!positivity->pass()) {
        FeasibilityReport r;
        r.add(positivity->name, positivity->lhs, positivity->rhs);
        const Condition* printed = full.find(condition::open_positive_mass_printed);
        r.add(printed->name, printed->lhs, printed->rhs, Relation::greater, false);
        throw InfeasibleEquilibrium("no positive mass of small firms", std::move(r));
    }
    const auto& pr = p.prefs();
    const double k = p.small().k();
    double hi = 2.0 * (k + 1.0) * pr.beta() * (pr.alpha() - cut.c_D) / (pr.gamma() * cut.c_D);
    auto f = [&](double M) { return open_mass_residual(M, cut.c_D, p); };
    for (int i = 0; f(hi) < 0.0; ++i) {
        if (i == 200) throw ConvergenceError("solve_mass_open: could not bracket the root");
        hi *= 2.0;
    }
    return numerics::bisect(f, 0.0, hi);
}

MassAccounting mass_accounting(double M, const OpenCutoffs& cut, const ModelParams& p) {
    const double k = p.small().k();
    return {M * std::pow(p.small().c_M() / cut.c_D, k) / (1.0 + cut.rho), M / (1.0 + cut.rho)};
}

OpenEquilibrium solve_open(const ModelParams& p) {
    const OpenCutoffs cut = solve_cutoffs_open(p);
    FeasibilityReport report = open_feasibility(cut, p);
    if (auto failed = report.first_failure())
        throw InfeasibleEquilibrium("open economy infeasible: " + failed->name, report);

    const double M = solve_mass_open(cut, p);
    const auto acc = mass_accounting(M, cut, p);
    OpenEquilibrium eq{cut.c_D, cut.c_X, cut.rho, M, acc.M_entrants, acc.M_producers,
                       internalization(M, 2.0 * p.large().N(), p.prefs()),
                       std::nullopt, std::nullopt, std::move(report)};
    if (p.large().N() > 0.0) {
        const auto prices = open_large_prices(cut, eq.Theta, p);
        eq.P_D = prices.P_D;
        eq.P_X = prices.P_X;
    }
    aggregate_price_open(eq, p);
    return eq;
}

double aggregate_price_open(const OpenEquilibrium& eq, const ModelParams& p) {
    const double k = p.small().k();
    const double N = p.large().N();
    double P = eq.M * eq.c_D * (2.0 * k + 1.0) / (2.0 * (k + 1.0));
    if (N > 0.0) P += N * eq.P_D.value() + N * eq.P_X.value();
    const double p_max = price_bound(P, eq.M, 2.0 * N, p.prefs());
    if (std::abs(p_max - eq.c_D) > 1e-8 * std::max(1.0, eq.c_D))
        throw InternalInconsistency("open equilibrium: choke price differs from cutoff");
    return P;
}

} // namespace coexist
