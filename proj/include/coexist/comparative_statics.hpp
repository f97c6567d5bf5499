#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coexist/model_core.hpp"
#include "coexist/open_economy.hpp"

// Effects of bilateral trade liberalization (a change in tau) on the open-economy
// equilibrium. The authoritative dM/dtau is implicit differentiation of the
// symmetric mass equation, cross-checked by central finite differences; the
// closed-form display is evaluated verbatim and kept only for comparison.

namespace coexist {

/// An inequality `lhs > rhs` evaluated at an equilibrium.
struct ConditionValue {
    bool holds;
    double lhs;
    double rhs;

    double slack() const { return lhs - rhs; }
};

/// dM_D/dtau = mass_change + reallocation.
struct ProducerMassDerivative {
    double mass_change;  ///< (dM/dtau) / (1 + rho)
    double reallocation; ///< k rho M / ((1 + rho)^2 tau)
    double total;
};

/// Pairwise agreement among the three dM/dtau values: equal sign, and relative
/// difference within `magnitude_tolerance`.
struct DerivativeAgreement {
    static constexpr double magnitude_tolerance = 1e-5;
    bool implicit_fd_sign;
    bool implicit_fd_magnitude;
    bool implicit_display_sign;
    bool implicit_display_magnitude;
    bool fd_display_sign;
    bool fd_display_magnitude;
};

struct ComparativeStaticsResult {
    OpenEquilibrium eq;
    double dcD_dtau;
    double dM_dtau_display;
    double dM_dtau_implicit;
    double dM_dtau_fd;
    /// dM_dtau_display - dM_dtau_implicit.
    double display_residual;
    ProducerMassDerivative dMD_dtau;
    /// Holds when liberalization raises the mass of sellers (dM/dtau < 0).
    ConditionValue seller_condition;
    /// Printed producer-mass inequality; holds when it predicts dM_D/dtau < 0.
    ConditionValue producer_condition;
    DerivativeAgreement agreement;
};

/// Exact derivative of the open cutoff: c_D (k/(k+2)) (rho/(1+rho)) / tau.
double dcD_dtau(const ModelParams& params);

/// The closed-form dM/dtau display evaluated as printed at (M, Theta(M), c_D, rho, tau).
double dM_dtau_display(const OpenEquilibrium& eq, const ModelParams& params);

/// -F_tau / F_M for F(M, tau) = RHS - LHS of the symmetric mass equation.
/// Throws DegenerateJacobian when F_M is not safely positive.
double dM_dtau_implicit(const OpenEquilibrium& eq, const ModelParams& params);

/// Central difference of the equilibrium mass with step rel_step * tau, both
/// sides re-solved from scratch. Requires tau - step >= 1.
double dM_dtau_fd(const ModelParams& params, double rel_step = 1e-6);

/// (2 - Theta)/(1 - Theta) * alpha beta / gamma > ((2 rho + k + 2) tau / (k rho) - 1) N C.
/// With N = 0 the left side is alpha beta / gamma.
ConditionValue seller_mass_condition(const OpenEquilibrium& eq, const ModelParams& params);

/// dM_D/dtau = [dM/dtau + k rho M / ((1 + rho) tau)] / (1 + rho).
ProducerMassDerivative dMD_dtau(const OpenEquilibrium& eq, const ModelParams& params,
                                double dM_dtau);

/// The printed producer-mass inequality, taken verbatim.
ConditionValue producer_mass_condition(const OpenEquilibrium& eq, const ModelParams& params);

DerivativeAgreement compare_derivatives(double implicit, double fd, double display);

/// Everything above at one parameter point. Requires tau > 1.
ComparativeStaticsResult comparative_statics(const ModelParams& params, double rel_step = 1e-6);

struct SweepValues {
    double rho;
    double c_D;
    double c_X;
    double M;
    double M_producers;
    double M_entrants;
    double dM_dtau_implicit;
    double dMD_dtau;
    bool seller_condition;
    bool producer_condition;
};

struct SweepRow {
    double tau;
    std::optional<SweepValues> values; ///< empty when the point is infeasible
    std::string failed_condition;
};

/// One row per grid point. The grid must be non-empty, strictly ascending and
/// above 1; infeasible points carry the name of the failed condition.
std::vector<SweepRow> tau_sweep(const ModelParams& params, std::span<const double> tau_grid);

} // namespace coexist
