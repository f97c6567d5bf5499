#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coexist::numerics {

struct BisectOptions {
    /// Stop once the bracket is narrower than this; 0 means run to adjacent doubles.
    double abs_tol = 0.0;
    int max_iter = 200;
};

/// Root of a continuous f on [lo, hi] with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, BisectOptions opt = {}) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0))
        throw std::invalid_argument("bisect: no sign change on bracket");
    for (int it = 0; it < opt.max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi || hi - lo <= opt.abs_tol) break;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Richardson: the two-panel estimate carries 1/16 of the one-panel error.
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with Richardson extrapolation on each panel.
/// `tol` is an absolute error target for the whole interval.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, tol, max_depth);
    // Start from a few panels so that kinks near an endpoint are not missed.
    constexpr int panels = 8;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == panels) ? b : lo + h;
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += detail::simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / panels, max_depth);
    }
    return total;
}

inline double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

} // namespace coexist::numerics
