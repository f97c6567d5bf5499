#include "coexist/entry_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "coexist/errors.hpp"
#include "coexist/feasibility.hpp"
#include "coexist/numerics.hpp"
#include "coexist/pareto_quadrature.hpp"

namespace coexist {

double DiscretizedMarket::total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

DiscretizedMarket discretize_market(const ModelParams& p, EconomyMode mode, double entrant_mass,
                                    int J) {
    if (J < 1) throw std::invalid_argument("discretize_market: J must be positive");
    if (!(entrant_mass >= 0.0))
        throw std::invalid_argument("discretize_market: negative entrant mass");
    const auto& s = p.small();
    const double h = s.c_M() / J;
    const int copies = mode == EconomyMode::open ? 2 : 1;

    DiscretizedMarket m;
    m.grid_costs.reserve(copies * J);
    m.half_widths.reserve(copies * J);
    m.weights.reserve(copies * J);
    for (int copy = 0; copy < copies; ++copy) {
        const double scale = copy == 0 ? 1.0 : p.tau();
        double G_lo = 0.0;
        for (int j = 0; j < J; ++j) {
            const double b = (j + 1 == J) ? s.c_M() : (j + 1) * h;
            const double G_hi = pareto_cdf(b, s);
            m.grid_costs.push_back(scale * (j + 0.5) * h);
            m.half_widths.push_back(scale * 0.5 * h);
            m.weights.push_back(entrant_mass * (G_hi - G_lo));
            G_lo = G_hi;
        }
    }
    const double N = p.large().N();
    if (N > 0.0) {
        m.large.push_back({p.large().C(), N});
        if (mode == EconomyMode::open) m.large.push_back({p.tau() * p.large().C(), N});
    }
    m.prices.assign(m.grid_costs.size(), 0.0);
    m.large_prices.assign(m.large.size(), 0.0);
    return m;
}

namespace {

// Selling mass S(p), cost mass T(p) = integral of c dS over sellers, and active
// large-firm count n(p) as functions of the choke price p. Each small cell adds a
// linear ramp of S between its cost bounds; zero-width cells and large groups add
// jumps. On (x[i], x[i+1]] the functions are S = S0 + s (p - x[i]),
// T = T0 + s (p^2 - x[i]^2) / 2 and n = n0, with x = -inf before the first point.
class SellerProfile {
public:
    explicit SellerProfile(const DiscretizedMarket& m) {
        struct Event {
            double x;
            double slope;  // change in dS/dp
            double jump_S; // mass entering at x (counted for p > x)
            double jump_T;
            double jump_n;
        };
        std::vector<Event> ev;
        ev.reserve(2 * m.grid_costs.size() + m.large.size());
        for (std::size_t j = 0; j < m.grid_costs.size(); ++j) {
            const double w = m.weights[j];
            if (w == 0.0) continue;
            const double lo = m.grid_costs[j] - m.half_widths[j];
            const double hi = m.grid_costs[j] + m.half_widths[j];
            if (hi > lo) {
                const double s = w / (hi - lo);
                ev.push_back({lo, s, 0.0, 0.0, 0.0});
                ev.push_back({hi, -s, 0.0, 0.0, 0.0});
            } else {
                ev.push_back({lo, 0.0, w, w * lo, 0.0});
            }
        }
        for (const auto& g : m.large) ev.push_back({g.delivered_cost, 0.0, 0.0, 0.0, g.count});
        std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });

        double S = 0.0, T = 0.0, n = 0.0, s = 0.0, x_prev = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const double x = ev[i].x;
            if (!x_.empty()) {
                S += s * (x - x_prev);
                T += 0.5 * s * (x * x - x_prev * x_prev);
            }
            if (x_.empty() || x > x_.back()) {
                x_.push_back(x);
                S0_.push_back(S);
                T0_.push_back(T);
                n0_.push_back(n);
                s_.push_back(s);
            }
            // Jumps at x apply to p > x, i.e. to the interval starting at x.
            S += ev[i].jump_S;
            T += ev[i].jump_T;
            n += ev[i].jump_n;
            s += ev[i].slope;
            S0_.back() = S;
            T0_.back() = T;
            n0_.back() = n;
            s_.back() = s;
            x_prev = x;
        }
    }

    struct Point {
        double S;
        double T;
        double n;
    };

    Point at(double p) const {
        // Interval i covers (x[i], x[i+1]]; p <= x[0] means no sellers.
        const auto it = std::lower_bound(x_.begin(), x_.end(), p);
        if (it == x_.begin()) return {0.0, 0.0, 0.0};
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double d = p - x_[i];
        return {S0_[i] + s_[i] * d, T0_[i] + 0.5 * s_[i] * (p * p - x_[i] * x_[i]), n0_[i]};
    }

    /// Choke price p given lagged large-firm prices: the unique root of
    ///   p beta + gamma (p S(p) - T(p)) / 2 + gamma sum_{P_g < p} N_g (p - P_g) = alpha beta,
    /// i.e. the demand intercept with small firms pricing at (p + c) / 2 and each
    /// large group selling iff its price is below p. The left side is continuous
    /// and strictly increasing.
    double choke(double alpha_beta, double beta, double gamma,
                 const std::vector<std::pair<double, double>>& large) const {
        auto lhs_at = [&](double p) {
            const Point q = at(p);
            double v = p * beta + 0.5 * gamma * (p * q.S - q.T);
            for (const auto& [price, count] : large)
                if (price < p) v += gamma * count * (p - price);
            return v;
        };
        std::size_t lo = 0, hi = x_.size();
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (lhs_at(x_[mid]) >= alpha_beta)
                hi = mid;
            else
                lo = mid + 1;
        }
        // Small-firm profile is quadratic on (a, b]; split further at large prices.
        double a = lo == 0 ? 0.0 : x_[lo - 1];
        const double b = lo < x_.size() ? x_[lo] : std::numeric_limits<double>::infinity();
        std::vector<double> cuts;
        for (const auto& lp : large)
            if (lp.first > a && lp.first < b) cuts.push_back(lp.first);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(b);
        for (double cut : cuts) {
            if (cut < b && lhs_at(cut) < alpha_beta) {
                a = cut;
                continue;
            }
            // Coefficients of A p^2 + B p - K on (a, cut].
            double A = 0.0, B = beta, K = 0.0;
            if (lo > 0) {
                const std::size_t i = lo - 1;
                const double s = s_[i], x = x_[i];
                A = 0.25 * gamma * s;
                B += 0.5 * gamma * (S0_[i] - s * x);
                K += 0.5 * gamma * (T0_[i] - 0.5 * s * x * x);
            }
            for (const auto& [price, count] : large)
                if (price <= a) {
                    B += gamma * count;
                    K += gamma * count * price;
                }
            const double rhs = alpha_beta + K;
            double p = A > 0.0 ? 2.0 * rhs / (B + std::sqrt(B * B + 4.0 * A * rhs)) : rhs / B;
            return std::clamp(p, a, cut);
        }
        return a; // unreachable: the last cut is b
    }

private:
    std::vector<double> x_, S0_, T0_, n0_, s_;
};

enum class Stage2Failure { none, not_converged, not_monotone };

struct Attempt {
    Stage2Failure failure = Stage2Failure::none;
    Stage2Result result;
};

Attempt iterate(const DiscretizedMarket& start, const SellerProfile& profile,
                const Preferences& pr, const Stage2Options& opt, double damping) {
    const double ab = pr.alpha() * pr.beta();
    const double beta = pr.beta();
    const double gamma = pr.gamma();
    constexpr double inactive = std::numeric_limits<double>::infinity();

    // Lagged large-firm prices; a non-positive warm start means "not yet set".
    std::vector<std::pair<double, double>> large;
    for (std::size_t g = 0; g < start.large.size(); ++g) {
        const double warm = g < start.large_prices.size() ? start.large_prices[g] : 0.0;
        large.emplace_back(warm > 0.0 ? warm : inactive, start.large[g].count);
    }
    bool seeded = false;
    for (const auto& lp : large) seeded = seeded || lp.first != inactive;

    double p_prev = std::numeric_limits<double>::quiet_NaN();
    int direction = 0;
    Attempt out;
    for (long it = 1; it <= opt.max_iterations; ++it) {
        const double p_max = profile.choke(ab, beta, gamma, large);
        const auto sellers = profile.at(p_max);
        // A group best-responds as a seller whenever its cost is below the choke
        // price, so it counts itself in Theta even if its lagged price does not sell.
        double n = 0.0;
        for (std::size_t g = 0; g < large.size(); ++g)
            if (start.large[g].delivered_cost < p_max) n += large[g].second;
        const double Theta = gamma / (beta + gamma * (sellers.S + n));

        // Best responses to this choke price; a group priced out stays inactive.
        double large_change = 0.0;
        for (std::size_t g = 0; g < large.size(); ++g) {
            const double C = start.large[g].delivered_cost;
            const double br = C < p_max ? (p_max + (1.0 - Theta) * C) / (2.0 - Theta) : inactive;
            double& cur = large[g].first;
            const double next = (cur == inactive || br == inactive || !seeded)
                                    ? br
                                    : cur + damping * (br - cur);
            large_change = std::max(large_change, cur == next ? 0.0 : std::abs(next - cur));
            cur = next;
        }
        seeded = true;

        if (it > opt.monotone_after && std::isfinite(p_prev)) {
            const double step = p_max - p_prev;
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, p_max);
            if (std::abs(step) > noise) {
                const int sign = step > 0.0 ? 1 : -1;
                if (direction != 0 && sign != direction) {
                    out.failure = Stage2Failure::not_monotone;
                    return out;
                }
                direction = sign;
            }
        }

        const bool converged = it > 1 && std::abs(p_max - p_prev) < opt.tolerance &&
                               large_change < opt.tolerance;
        p_prev = p_max;

        if (converged) {
            Stage2Result& r = out.result;
            r.market = start;
            for (std::size_t j = 0; j < r.market.grid_costs.size(); ++j)
                r.market.prices[j] = 0.5 * (p_max + r.market.grid_costs[j]);
            double P = 0.5 * (p_max * sellers.S + sellers.T);
            for (std::size_t g = 0; g < large.size(); ++g) {
                const bool active = large[g].first < p_max;
                // An inactive firm prices at the choke price and sells nothing.
                r.market.large_prices[g] = active ? large[g].first : p_max;
                if (active) P += large[g].second * large[g].first;
            }
            r.market.P_agg = P;
            r.p_max = p_max;
            r.selling_mass = sellers.S;
            r.active_large = n;
            r.Theta = Theta;
            r.iterations = it;
            r.damping = damping;
            return out;
        }
    }
    out.failure = Stage2Failure::not_converged;
    return out;
}

} // namespace

Stage2Result stage2_fixed_point(const DiscretizedMarket& market, const Preferences& prefs,
                                Stage2Options opt) {
    if (market.grid_costs.size() != market.weights.size() ||
        market.grid_costs.size() != market.half_widths.size())
        throw std::invalid_argument("stage2_fixed_point: inconsistent market arrays");
    if (!(opt.damping > 0.0 && opt.damping <= 1.0))
        throw std::invalid_argument("stage2_fixed_point: damping must lie in (0, 1]");

    const SellerProfile profile(market);
    Attempt a = iterate(market, profile, prefs, opt, opt.damping);
    if (a.failure == Stage2Failure::none) return a.result;
    a = iterate(market, profile, prefs, opt, 0.5 * opt.damping);
    if (a.failure == Stage2Failure::none) return a.result;
    throw ConvergenceError(a.failure == Stage2Failure::not_monotone
                               ? "stage2_fixed_point: aggregate price oscillates"
                               : "stage2_fixed_point: no convergence within the iteration cap");
}

double oracle_entry_profit(double c_D, const ModelParams& p, EconomyMode mode, double rel_tol) {
    const auto& s = p.small();
    if (!(c_D >= 0.0 && c_D <= s.c_M()))
        throw std::domain_error("oracle_entry_profit: cutoff outside [0, c_M]");
    const double scale = p.L() / (4.0 * p.prefs().beta());
    auto squared_margin = [](double cutoff) {
        return [cutoff](double c) { return (cutoff - c) * (cutoff - c); };
    };
    // Each integral is bounded by cutoff^2.
    double total = integrate_pareto(squared_margin(c_D), c_D, s, rel_tol * c_D * c_D);
    if (mode == EconomyMode::open) {
        const double tau = p.tau();
        const double c_X = c_D / tau;
        total += tau * tau * integrate_pareto(squared_margin(c_X), c_X, s, rel_tol * c_D * c_D);
    }
    return scale * total;
}

double oracle_cutoff(const ModelParams& p, EconomyMode mode, double rel_tol) {
    const auto& s = p.small();
    const double at_top = oracle_entry_profit(s.c_M(), p, mode, rel_tol);
    if (at_top < s.f_E()) {
        std::ostringstream os;
        os.precision(17);
        os << "support violation: expected profit at c_M (" << at_top
           << ") is below the entry cost " << s.f_E();
        throw SupportViolation(os.str(), s.c_M());
    }
    return numerics::bisect(
        [&](double c) { return oracle_entry_profit(c, p, mode, rel_tol) - s.f_E(); }, 0.0,
        s.c_M());
}

OracleResult free_entry_oracle(const ModelParams& p, EconomyMode mode, OracleOptions opt) {
    if (opt.J < 100) throw std::invalid_argument("free_entry_oracle: J must be at least 100");
    const double c_D = oracle_cutoff(p, mode, opt.quadrature_tol);
    const auto& pr = p.prefs();

    // Large firms sell iff their delivered cost is below the choke price c_D.
    FeasibilityReport report;
    report.add(condition::support, p.small().c_M(), c_D, Relation::greater_equal);
    const double N = p.large().N();
    if (N > 0.0) {
        if (mode == EconomyMode::closed) {
            report.add(condition::large_viable, c_D, p.large().C());
        } else {
            report.add(condition::large_domestic, c_D, p.large().C());
            report.add(condition::large_export, c_D / p.tau(), p.large().C());
        }
    }
    if (auto failed = report.first_failure())
        throw InfeasibleEquilibrium("oracle: " + failed->name, report);

    // Without small firms the choke price must still exceed c_D.
    auto choke = [&](double entrant_mass, const std::vector<double>& warm) {
        DiscretizedMarket m = discretize_market(p, mode, entrant_mass, opt.J);
        if (warm.size() == m.large_prices.size()) m.large_prices = warm;
        return stage2_fixed_point(m, pr, opt.stage2);
    };
    const Stage2Result empty = choke(0.0, {});
    report.add(mode == EconomyMode::closed ? condition::positive_mass
                                           : condition::open_positive_mass,
               empty.p_max, c_D);
    if (auto failed = report.first_failure())
        throw InfeasibleEquilibrium("oracle: " + failed->name, report);

    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> warm = empty.market.large_prices;
    for (int i = 0;; ++i) {
        const Stage2Result r = choke(hi, warm);
        if (r.p_max < c_D) break;
        if (i == 200) throw ConvergenceError("oracle: could not bracket the entrant mass");
        warm = r.market.large_prices;
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > opt.mass_rel_tol * hi) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const Stage2Result r = choke(mid, warm);
        warm = r.market.large_prices;
        if (r.p_max > c_D)
            lo = mid;
        else
            hi = mid;
    }
    const double entrants = lo + 0.5 * (hi - lo);
    const Stage2Result fin = choke(entrants, warm);
    return {c_D, fin.selling_mass, entrants, fin.p_max, fin.Theta};
}

} // namespace coexist
