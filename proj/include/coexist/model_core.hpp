#pragma once

// Primitives of a market where N strategic large firms compete in prices with a
// continuum of monopolistically competitive small firms whose marginal costs are
// Pareto draws on [0, c_M]. Demand is linear-quadratic; all magnitudes are in
// units of the numeraire (wage = 1).

namespace coexist {

/// Demand intercept alpha, own-variety curvature beta, cross-substitutability gamma.
class Preferences {
public:
    Preferences(double alpha, double beta, double gamma);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }

private:
    double alpha_;
    double beta_;
    double gamma_;
};

/// Small-firm technology: Pareto support bound c_M, shape k, sunk entry cost f_E.
class SmallFirmTech {
public:
    SmallFirmTech(double c_M, double k, double f_E);

    double c_M() const noexcept { return c_M_; }
    double k() const noexcept { return k_; }
    double f_E() const noexcept { return f_E_; }

private:
    double c_M_;
    double k_;
    double f_E_;
};

/// N large firms per country with common marginal cost C. N is carried as a
/// real so that smooth sweeps are possible; the CLI only admits integers.
/// N must be 0 or at least 1, which keeps a large firm's Theta below 1.
class LargeFirmSector {
public:
    LargeFirmSector(double N, double C);

    double N() const noexcept { return N_; }
    double C() const noexcept { return C_; }

private:
    double N_;
    double C_;
};

class ModelParams {
public:
    /// Throws std::invalid_argument when any primitive is out of range.
    ModelParams(Preferences prefs, SmallFirmTech small, LargeFirmSector large,
                double L, double tau = 1.0);

    const Preferences& prefs() const noexcept { return prefs_; }
    const SmallFirmTech& small() const noexcept { return small_; }
    const LargeFirmSector& large() const noexcept { return large_; }
    double L() const noexcept { return L_; }
    double tau() const noexcept { return tau_; }

    ModelParams with_tau(double tau) const;

private:
    Preferences prefs_;
    SmallFirmTech small_;
    LargeFirmSector large_;
    double L_;
    double tau_;
};

struct DerivedConstants {
    double phi; ///< technology index
    double rho; ///< freeness of trade
};

/// phi = 2(k+1)(k+2) c_M^k f_E.
double technology_index(const SmallFirmTech& small);

/// rho = tau^(-k), in (0, 1]; equals 1 only at tau = 1.
double freeness(double tau, double k);

DerivedConstants derived_constants(const ModelParams& params);

/// G(c) = (c / c_M)^k. Throws std::domain_error outside [0, c_M].
double pareto_cdf(double c, const SmallFirmTech& small);

/// g(c) = k c^(k-1) / c_M^k on (0, c_M]; zero outside the support.
double pareto_density(double c, const SmallFirmTech& small);

/// Theta = gamma / (beta + gamma (M + firm_count)). Pass N in the closed
/// economy and 2N in the open economy.
double internalization(double M, double firm_count, const Preferences& prefs);

/// Choke price p_max = (alpha beta + gamma P) / (beta + gamma (M + total_large)).
double price_bound(double aggregate_price, double M, double total_large,
                   const Preferences& prefs);

} // namespace coexist
