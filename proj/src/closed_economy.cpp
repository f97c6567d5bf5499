#include "coexist/closed_economy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coexist/errors.hpp"
#include "coexist/numerics.hpp"
#include "coexist/pareto_quadrature.hpp"

namespace coexist {

namespace {

void require_in_support(double c_D, const SmallFirmTech& s, const char* who) {
    if (!(c_D >= 0.0 && c_D <= s.c_M()))
        throw std::domain_error(std::string(who) + ": cutoff outside [0, c_M]");
}

double cutoff_formula(const ModelParams& p, double rho) {
    const double phi = technology_index(p.small());
    return std::pow(p.prefs().beta() * phi / (p.L() * (1.0 + rho)),
                    1.0 / (p.small().k() + 2.0));
}

} // namespace

double min_support_bound(const ModelParams& p, double rho) {
    const double k = p.small().k();
    return std::sqrt(2.0 * (k + 1.0) * (k + 2.0) * p.prefs().beta() * p.small().f_E() /
                     (p.L() * (1.0 + rho)));
}

double solve_cutoff_closed(const ModelParams& p) {
    const double c_D = cutoff_formula(p, 0.0);
    if (c_D > p.small().c_M())
        throw SupportViolation(c_D, p.small().c_M(), min_support_bound(p, 0.0));
    return c_D;
}

double expected_entry_profit_closed_form(double c_D, const ModelParams& p) {
    const auto& s = p.small();
    require_in_support(c_D, s, "expected_entry_profit");
    const double k = s.k();
    return p.L() * std::pow(c_D, k + 2.0) /
           (2.0 * p.prefs().beta() * (k + 1.0) * (k + 2.0) * std::pow(s.c_M(), k));
}

double expected_entry_profit_quadrature(double c_D, const ModelParams& p) {
    const auto& s = p.small();
    require_in_support(c_D, s, "expected_entry_profit");
    if (c_D == 0.0) return 0.0;
    const double scale = p.L() / (4.0 * p.prefs().beta());
    const double mass = pareto_cdf(c_D, s);
    // The integral is bounded by c_D^2 G(c_D).
    const double tol = 1e-14 * c_D * c_D * mass;
    const double integral = integrate_pareto(
        [c_D](double c) { return (c_D - c) * (c_D - c); }, c_D, s, tol);
    return scale * integral;
}

double expected_entry_profit(double c_D, const ModelParams& p) {
    const double closed = expected_entry_profit_closed_form(c_D, p);
    const double quad = expected_entry_profit_quadrature(c_D, p);
    if (numerics::relative_difference(closed, quad) > 1e-8)
        throw InternalInconsistency("expected_entry_profit: closed form and quadrature disagree");
    return closed;
}

std::optional<SmallFirmOutcome> small_firm_outcomes(double c, double c_D, const ModelParams& p) {
    if (!(c >= 0.0)) throw std::domain_error("small_firm_outcomes: negative cost");
    if (c >= c_D) return std::nullopt;
    const double L = p.L();
    const double beta = p.prefs().beta();
    const double price = 0.5 * (c_D + c);
    const double quantity = L / beta * (price - c);
    return SmallFirmOutcome{price, quantity, (price - c) * quantity};
}

double large_firm_price(double c_D, double Theta, double C) {
    if (!(Theta >= 0.0 && Theta < 1.0))
        throw std::invalid_argument("large_firm_price: Theta must lie in [0, 1)");
    return (c_D + (1.0 - Theta) * C) / (2.0 - Theta);
}

double zero_mass_markup_factor(double n, const Preferences& pr) {
    return (pr.beta() + pr.gamma() * (n - 1.0)) / (2.0 * pr.beta() + pr.gamma() * (2.0 * n - 1.0));
}

double closed_mass_residual(double M, double c_D, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double N = p.large().N();
    const double Theta = internalization(M, N, pr);
    const double lhs = (pr.alpha() - c_D) * pr.beta() / pr.gamma();
    const double rhs = M * c_D / (2.0 * (k + 1.0)) +
                       N * (c_D - p.large().C()) * (1.0 - Theta) / (2.0 - Theta);
    return rhs - lhs;
}

namespace {

// Increasing residual in M; widen the bracket until it changes sign.
template <class Residual>
double solve_increasing(Residual&& f, double upper) {
    double hi = upper > 0.0 ? upper : 1.0;
    for (int i = 0; f(hi) < 0.0; ++i) {
        if (i == 200) throw ConvergenceError("mass solver: could not bracket the root");
        hi *= 2.0;
    }
    return numerics::bisect(f, 0.0, hi);
}

void add_positive_mass(FeasibilityReport& r, double c_D, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double N = p.large().N();
    const double lhs = (pr.alpha() - c_D) * pr.beta();
    const double rhs = pr.gamma() * N * (c_D - p.large().C()) * zero_mass_markup_factor(N, pr);
    r.add(condition::positive_mass, lhs, rhs);
}

} // namespace

double solve_mass_closed(double c_D, const ModelParams& p) {
    FeasibilityReport r;
    add_positive_mass(r, c_D, p);
    if (!r.feasible())
        throw InfeasibleEquilibrium("no positive mass of small firms", std::move(r));
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double upper = 2.0 * (k + 1.0) * pr.beta() * (pr.alpha() - c_D) / (pr.gamma() * c_D);
    return solve_increasing([&](double M) { return closed_mass_residual(M, c_D, p); }, upper);
}

FeasibilityReport coexistence_check(const ModelParams& p) {
    const double c_D = cutoff_formula(p, 0.0);
    FeasibilityReport r;
    r.add(condition::support, p.small().c_M(), c_D, Relation::greater_equal);
    if (p.large().N() > 0.0) r.add(condition::large_viable, c_D, p.large().C());
    add_positive_mass(r, c_D, p);
    return r;
}

double aggregate_price_closed(double c_D, double M, double P_large, const ModelParams& p) {
    const double k = p.small().k();
    const double small_part = M * c_D * (2.0 * k + 1.0) / (2.0 * (k + 1.0));
    if (p.large().N() == 0.0) return small_part;
    return small_part + p.large().N() * P_large;
}

double aggregate_price_closed(const ClosedEquilibrium& eq, const ModelParams& p) {
    const double P = aggregate_price_closed(eq.c_D, eq.M, eq.P_large.value_or(0.0), p);
    const double p_max = price_bound(P, eq.M, p.large().N(), p.prefs());
    if (std::abs(p_max - eq.c_D) > 1e-8 * std::max(1.0, eq.c_D))
        throw InternalInconsistency("closed equilibrium: choke price differs from cutoff");
    return P;
}

ClosedEquilibrium solve_closed(const ModelParams& p) {
    const double c_D = solve_cutoff_closed(p);
    FeasibilityReport report = coexistence_check(p);
    if (auto failed = report.first_failure())
        throw InfeasibleEquilibrium("closed economy infeasible: " + failed->name, report);

    ClosedEquilibrium eq{c_D, 0.0, 0.0, std::nullopt, 0.0, std::move(report)};
    eq.M = solve_mass_closed(c_D, p);
    eq.Theta = internalization(eq.M, p.large().N(), p.prefs());
    if (p.large().N() > 0.0) eq.P_large = large_firm_price(c_D, eq.Theta, p.large().C());
    eq.P_agg = aggregate_price_closed(eq, p);
    return eq;
}

} // namespace coexist
