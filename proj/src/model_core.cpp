#include "coexist/model_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coexist {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

Preferences::Preferences(double alpha, double beta, double gamma)
    : alpha_(alpha), beta_(beta), gamma_(gamma) {
    require(finite(alpha) && alpha > 0.0, "alpha must be positive");
    require(finite(beta) && beta > 0.0, "beta must be positive");
    require(finite(gamma) && gamma > 0.0, "gamma must be positive");
}

SmallFirmTech::SmallFirmTech(double c_M, double k, double f_E)
    : c_M_(c_M), k_(k), f_E_(f_E) {
    require(finite(c_M) && c_M > 0.0, "c_M must be positive");
    require(finite(k) && k > 0.0, "k must be positive");
    require(finite(f_E) && f_E > 0.0, "f_E must be positive");
}

LargeFirmSector::LargeFirmSector(double N, double C) : N_(N), C_(C) {
    require(finite(N) && (N == 0.0 || N >= 1.0), "N must be 0 or at least 1");
    require(finite(C) && C >= 0.0, "C must be non-negative");
}

ModelParams::ModelParams(Preferences prefs, SmallFirmTech small, LargeFirmSector large,
                         double L, double tau)
    : prefs_(prefs), small_(small), large_(large), L_(L), tau_(tau) {
    require(finite(L) && L > 0.0, "L must be positive");
    require(finite(tau) && tau >= 1.0, "tau must be at least 1");
}

ModelParams ModelParams::with_tau(double tau) const {
    return ModelParams(prefs_, small_, large_, L_, tau);
}

double technology_index(const SmallFirmTech& s) {
    return 2.0 * (s.k() + 1.0) * (s.k() + 2.0) * std::pow(s.c_M(), s.k()) * s.f_E();
}

double freeness(double tau, double k) {
    if (tau == 1.0) return 1.0;
    return std::pow(tau, -k);
}

DerivedConstants derived_constants(const ModelParams& p) {
    return {technology_index(p.small()), freeness(p.tau(), p.small().k())};
}

double pareto_cdf(double c, const SmallFirmTech& s) {
    if (!(c >= 0.0 && c <= s.c_M()))
        throw std::domain_error("pareto_cdf: cost " + std::to_string(c) +
                                " outside [0, c_M]");
    if (c == s.c_M()) return 1.0;
    return std::pow(c / s.c_M(), s.k());
}

double pareto_density(double c, const SmallFirmTech& s) {
    if (c <= 0.0 || c > s.c_M()) return 0.0;
    return s.k() * std::pow(c, s.k() - 1.0) / std::pow(s.c_M(), s.k());
}

double internalization(double M, double firm_count, const Preferences& pr) {
    return pr.gamma() / (pr.beta() + pr.gamma() * (M + firm_count));
}

double price_bound(double P, double M, double total_large, const Preferences& pr) {
    return (pr.alpha() * pr.beta() + pr.gamma() * P) /
           (pr.beta() + pr.gamma() * (M + total_large));
}

} // namespace coexist
