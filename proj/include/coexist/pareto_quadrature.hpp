#pragma once

#include <cmath>

#include "coexist/model_core.hpp"
#include "coexist/numerics.hpp"

namespace coexist {

/// integral_0^upper f(c) dG(c) for the Pareto cost distribution, by adaptive
/// quadrature. For k < 1 the density is unbounded at zero, so the integral is
/// taken over u = G(c) with c = c_M u^(1/k).
template <class F>
double integrate_pareto(F&& f, double upper, const SmallFirmTech& small, double abs_tol) {
    if (upper <= 0.0) return 0.0;
    if (small.k() >= 1.0) {
        return numerics::integrate(
            [&](double c) { return f(c) * pareto_density(c, small); }, 0.0, upper, abs_tol);
    }
    const double inv_k = 1.0 / small.k();
    return numerics::integrate(
        [&](double u) { return f(small.c_M() * std::pow(u, inv_k)); }, 0.0,
        pareto_cdf(upper, small), abs_tol);
}

} // namespace coexist
