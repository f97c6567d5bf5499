#include "coexist/comparative_statics.hpp"

#include <cmath>
#include <stdexcept>

#include "coexist/errors.hpp"
#include "coexist/numerics.hpp"

namespace coexist {

namespace {

// (k/(k+2)) (rho/(1+rho)) / tau: elasticity factor of the cutoff w.r.t. tau.
double cutoff_growth(double k, double rho, double tau) {
    return k / (k + 2.0) * rho / (1.0 + rho) / tau;
}

double markup_share(double Theta) { return (1.0 - Theta) / (2.0 - Theta); }

void require_open_interior(const ModelParams& p, const char* who) {
    if (!(p.tau() > 1.0)) throw std::invalid_argument(std::string(who) + ": requires tau > 1");
}

} // namespace

double dcD_dtau(const ModelParams& p) {
    const auto cut = solve_cutoffs_open(p);
    return cut.c_D * cutoff_growth(p.small().k(), cut.rho, p.tau());
}

double dM_dtau_display(const OpenEquilibrium& eq, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double N = p.large().N();
    const double C = p.large().C();
    const double tau = p.tau();
    const double g = markup_share(eq.Theta);
    const double numerator =
        (pr.alpha() * pr.beta() / pr.gamma() + (1.0 + tau) * N * C) *
            cutoff_growth(k, eq.rho, tau) -
        g * N * C;
    const double ratio = eq.Theta / (2.0 - eq.Theta);
    const double denominator = eq.c_D / (2.0 * (k + 1.0)) +
                               ratio * ratio * ((eq.c_D - C) + (eq.c_D - tau * C)) * N;
    return -numerator / denominator;
}

double dM_dtau_implicit(const OpenEquilibrium& eq, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double N = p.large().N();
    const double C = p.large().C();
    const double tau = p.tau();
    const double g = markup_share(eq.Theta);
    const double dc = eq.c_D * cutoff_growth(k, eq.rho, tau);

    // dTheta/dM = -Theta^2, so d[(1-Theta)/(2-Theta)]/dM = Theta^2 / (2-Theta)^2.
    const double ratio = eq.Theta / (2.0 - eq.Theta);
    const double F_M =
        eq.c_D / (2.0 * (k + 1.0)) + ratio * ratio * N * (2.0 * eq.c_D - (1.0 + tau) * C);
    if (!(F_M > 1e-14)) throw DegenerateJacobian("dM_dtau_implicit: F_M not positive");

    // The left side (alpha - c_D) beta / gamma also moves with c_D.
    const double F_tau = eq.M * dc / (2.0 * (k + 1.0)) + g * N * (2.0 * dc - C) +
                         pr.beta() / pr.gamma() * dc;
    return -F_tau / F_M;
}

double dM_dtau_fd(const ModelParams& p, double rel_step) {
    const double h = rel_step * p.tau();
    if (!(p.tau() - h >= 1.0))
        throw std::invalid_argument("dM_dtau_fd: step would push tau below 1");
    const double up = solve_open(p.with_tau(p.tau() + h)).M;
    const double down = solve_open(p.with_tau(p.tau() - h)).M;
    return (up - down) / (2.0 * h);
}

ConditionValue seller_mass_condition(const OpenEquilibrium& eq, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    // Theta is a large-firm wedge; with no large firms the factor drops out.
    const double wedge = p.large().N() > 0.0 ? (2.0 - eq.Theta) / (1.0 - eq.Theta) : 1.0;
    const double lhs = wedge * pr.alpha() * pr.beta() / pr.gamma();
    const double rhs = ((2.0 * eq.rho + k + 2.0) * p.tau() / (k * eq.rho) - 1.0) *
                       p.large().N() * p.large().C();
    return {lhs > rhs, lhs, rhs};
}

ProducerMassDerivative dMD_dtau(const OpenEquilibrium& eq, const ModelParams& p, double dM) {
    const double k = p.small().k();
    const double one_rho = 1.0 + eq.rho;
    const double mass_change = dM / one_rho;
    const double reallocation = k * eq.rho * eq.M / (one_rho * one_rho * p.tau());
    return {mass_change, reallocation, mass_change + reallocation};
}

ConditionValue producer_mass_condition(const OpenEquilibrium& eq, const ModelParams& p) {
    const auto& pr = p.prefs();
    const double k = p.small().k();
    const double N = p.large().N();
    const double C = p.large().C();
    const double tau = p.tau();
    const double ratio = eq.Theta / (2.0 - eq.Theta);
    const double lhs = (pr.alpha() * pr.beta() / pr.gamma() + (1.0 + tau) * N * C) / (k + 2.0);
    const double rhs = eq.M * eq.c_D / (2.0 * (k + 1.0)) +
                       eq.M * N * (2.0 * eq.c_D - (1.0 + tau) * C) * ratio * ratio +
                       N * C * (1.0 + eq.rho) * tau / (eq.rho * k) * markup_share(eq.Theta);
    return {lhs > rhs, lhs, rhs};
}

DerivativeAgreement compare_derivatives(double implicit, double fd, double display) {
    auto same_sign = [](double a, double b) { return std::signbit(a) == std::signbit(b); };
    auto close = [](double a, double b) {
        return numerics::relative_difference(a, b) <= DerivativeAgreement::magnitude_tolerance;
    };
    return {same_sign(implicit, fd),      close(implicit, fd),
            same_sign(implicit, display), close(implicit, display),
            same_sign(fd, display),       close(fd, display)};
}

ComparativeStaticsResult comparative_statics(const ModelParams& p, double rel_step) {
    require_open_interior(p, "comparative_statics");
    OpenEquilibrium eq = solve_open(p);
    const double implicit = dM_dtau_implicit(eq, p);
    const double display = dM_dtau_display(eq, p);
    const double fd = dM_dtau_fd(p, rel_step);
    const double dc = eq.c_D * cutoff_growth(p.small().k(), eq.rho, p.tau());
    const auto producers = dMD_dtau(eq, p, implicit);
    const auto sellers = seller_mass_condition(eq, p);
    const auto producer_cond = producer_mass_condition(eq, p);
    return {std::move(eq),  dc,        display,       implicit,
            fd,             display - implicit,
            producers,      sellers,   producer_cond, compare_derivatives(implicit, fd, display)};
}

std::vector<SweepRow> tau_sweep(const ModelParams& p, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("tau_sweep: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 1.0)) throw std::invalid_argument("tau_sweep: grid values must exceed 1");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("tau_sweep: grid must be strictly ascending");
    }

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double tau : grid) {
        const ModelParams at = p.with_tau(tau);
        SweepRow row{tau, std::nullopt, {}};
        try {
            const OpenEquilibrium eq = solve_open(at);
            const double dM = dM_dtau_implicit(eq, at);
            row.values = SweepValues{eq.rho,
                                     eq.c_D,
                                     eq.c_X,
                                     eq.M,
                                     eq.M_producers,
                                     eq.M_entrants,
                                     dM,
                                     dMD_dtau(eq, at, dM).total,
                                     seller_mass_condition(eq, at).holds,
                                     producer_mass_condition(eq, at).holds};
        } catch (const SupportViolation&) {
            row.failed_condition = condition::support;
        } catch (const InfeasibleEquilibrium& e) {
            row.failed_condition = e.failed_condition();
        } catch (const DegenerateJacobian&) {
            row.failed_condition = "degenerate Jacobian";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace coexist
