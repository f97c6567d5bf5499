// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// quantities behind each verdict. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coexist/closed_economy.hpp"
#include "coexist/comparative_statics.hpp"
#include "coexist/entry_simulator.hpp"
#include "coexist/errors.hpp"
#include "coexist/numerics.hpp"
#include "coexist/open_economy.hpp"
#include "support/draws.hpp"
#include "support/golden_cases.hpp"

using namespace coexist;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
    bool informational = false;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return numerics::relative_difference(a, b); }

ModelParams closed_of(const ModelParams& p) {
    return ModelParams(p.prefs(), p.small(), p.large(), p.L());
}

template <class T>
bool feasible(const std::function<T()>& solve) {
    try {
        solve();
        return true;
    } catch (const SupportViolation&) {
    } catch (const InfeasibleEquilibrium&) {
    }
    return false;
}

/// `count` draws whose closed economy is feasible.
std::vector<ModelParams> feasible_closed_draws(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<ModelParams> out;
    while (static_cast<int>(out.size()) < count) {
        const auto p = closed_of(testing::random_params(rng));
        if (feasible<ClosedEquilibrium>([&] { return solve_closed(p); })) out.push_back(p);
    }
    return out;
}

std::vector<ModelParams> feasible_open_draws(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<ModelParams> out;
    while (static_cast<int>(out.size()) < count) {
        const auto p = testing::random_params(rng);
        if (feasible<OpenEquilibrium>([&] { return solve_open(p); })) out.push_back(p);
    }
    return out;
}

std::string failure_name(const std::function<void()>& f) {
    try {
        f();
        return "feasible";
    } catch (const SupportViolation&) {
        return condition::support;
    } catch (const InfeasibleEquilibrium& e) {
        return e.failed_condition();
    }
}

// 1. Closed-form cutoff versus the quadrature oracle; entry profit at the cutoff.
Verdict criterion_1() {
    const auto draws = feasible_closed_draws(101, 200);
    double worst_cutoff = 0.0, worst_profit = 0.0, worst_mass = 0.0;
    for (const auto& p : draws) {
        const double c_D = solve_cutoff_closed(p);
        const auto o = free_entry_oracle(p, EconomyMode::closed);
        worst_cutoff = std::max(worst_cutoff, rel(o.c_D, c_D));
        worst_mass = std::max(worst_mass, rel(o.M, solve_closed(p).M));
        worst_profit = std::max(worst_profit, rel(expected_entry_profit(c_D, p), p.small().f_E()));
    }
    // Feasibility classification on arbitrary draws.
    std::mt19937_64 rng(102);
    int disagreements = 0, infeasible = 0;
    for (int i = 0; i < 200; ++i) {
        const auto p = closed_of(testing::random_params(rng));
        const auto a = failure_name([&] { solve_closed(p); });
        if (a == "feasible") continue;
        ++infeasible;
        if (failure_name([&] { free_entry_oracle(p, EconomyMode::closed); }) != a) ++disagreements;
    }
    const bool pass = worst_cutoff <= 1e-4 && worst_profit <= 1e-10 && worst_mass <= 1e-4 &&
                      disagreements == 0;
    return {pass, fmt("200 draws: max rel |c_D oracle - closed form| = %.3g (tol 1e-4), "
                      "max rel |profit - f_E| = %.3g (tol 1e-10), max rel M gap = %.3g (tol 1e-4); "
                      "feasibility classification %d/%d infeasible draws agree",
                      worst_cutoff, worst_profit, worst_mass, infeasible - disagreements, infeasible)};
}

// 2. Mass equation residual and the no-large-firm closed form.
Verdict criterion_2() {
    const auto draws = feasible_closed_draws(201, 200);
    double worst_residual = 0.0;
    for (const auto& p : draws) {
        const auto eq = solve_closed(p);
        const double lhs = (p.prefs().alpha() - eq.c_D) * p.prefs().beta() / p.prefs().gamma();
        worst_residual = std::max(worst_residual, std::abs(closed_mass_residual(eq.M, eq.c_D, p)) / std::max(1.0, lhs));
    }
    std::mt19937_64 rng(202);
    int n0 = 0;
    double worst_n0 = 0.0;
    while (n0 < 200) {
        const auto d = testing::random_params(rng);
        const ModelParams p(d.prefs(), d.small(), LargeFirmSector(0, 0), d.L());
        ClosedEquilibrium eq;
        try {
            eq = solve_closed(p);
        } catch (const std::exception&) {
            continue;
        }
        ++n0;
        const double k = p.small().k();
        const double exact = 2 * (k + 1) * p.prefs().beta() * (p.prefs().alpha() - eq.c_D) / (p.prefs().gamma() * eq.c_D);
        worst_n0 = std::max(worst_n0, std::abs(eq.M - exact) / std::max(1.0, exact));
    }
    return {worst_residual <= 1e-10 && worst_n0 <= 1e-12,
            fmt("200 draws: max scaled residual %.3g (tol 1e-10); N=0 closed form on 200 draws: max gap %.3g (tol 1e-12)",
                worst_residual, worst_n0)};
}

// 3. Solve succeeds exactly when the coexistence check passes; zero-mass factor identity.
Verdict criterion_3() {
    std::mt19937_64 rng(301);
    int disagreements = 0, feasible_count = 0;
    double worst_identity = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = closed_of(testing::random_params(rng));
        const auto report = coexistence_check(p);
        const bool solved = failure_name([&] { solve_closed(p); }) == "feasible";
        if (solved != report.feasible()) ++disagreements;
        feasible_count += solved;
        const double N = p.large().N();
        if (N > 0.0) {
            const double T0 = internalization(0.0, N, p.prefs());
            worst_identity = std::max(worst_identity,
                                      std::abs(zero_mass_markup_factor(N, p.prefs()) - (1 - T0) / (2 - T0)));
            // The reported right-hand side uses the same factor.
            const auto* ii = report.find(condition::positive_mass);
            const double c_D = report.find(condition::support)->rhs;
            const double expect = p.prefs().gamma() * N * (c_D - p.large().C()) * (1 - T0) / (2 - T0);
            worst_identity = std::max(worst_identity, std::abs(ii->rhs - expect) / std::max(1.0, std::abs(expect)));
        }
    }
    return {disagreements == 0 && worst_identity <= 1e-12,
            fmt("1000 draws (%d feasible): %d disagreements; max Theta(0) identity gap %.3g (tol 1e-12)",
                feasible_count, disagreements, worst_identity)};
}

// 4. Stage-2 best responses at the analytic entrant mass reproduce the analytic prices.
Verdict criterion_4() {
    std::vector<std::pair<ModelParams, EconomyMode>> fixtures;
    std::mt19937_64 rng(401);
    while (fixtures.size() < 20) {
        const auto d = testing::random_params(rng);
        if (d.large().N() == 0.0) continue;
        const bool open = fixtures.size() % 2 == 1;
        const auto p = open ? d : closed_of(d);
        const bool ok = open ? feasible<OpenEquilibrium>([&] { return solve_open(p); })
                             : feasible<ClosedEquilibrium>([&] { return solve_closed(p); });
        if (ok) fixtures.emplace_back(p, open ? EconomyMode::open : EconomyMode::closed);
    }
    double worst = 0.0;
    for (const auto& [p, mode] : fixtures) {
        double c_D, entrants;
        std::vector<double> large_expected;
        if (mode == EconomyMode::closed) {
            const auto eq = solve_closed(p);
            c_D = eq.c_D;
            entrants = eq.M / pareto_cdf(eq.c_D, p.small());
            large_expected = {*eq.P_large};
        } else {
            const auto eq = solve_open(p);
            c_D = eq.c_D;
            entrants = eq.M_entrants;
            large_expected = {*eq.P_D, *eq.P_X};
        }
        const auto r = stage2_fixed_point(discretize_market(p, mode, entrants, 2000), p.prefs());
        worst = std::max(worst, std::abs(r.p_max - c_D));
        for (std::size_t g = 0; g < large_expected.size(); ++g)
            worst = std::max(worst, std::abs(r.market.large_prices[g] - large_expected[g]));
        for (std::size_t j = 0; j < r.market.grid_costs.size(); ++j) {
            const double c = r.market.grid_costs[j];
            if (c >= c_D) continue;
            worst = std::max(worst, std::abs(r.market.prices[j] - 0.5 * (c_D + c)));
        }
    }
    return {worst <= 1e-6, fmt("20 fixtures (10 closed, 10 open) at J=2000: max price gap %.3g (tol 1e-6)", worst)};
}

// 5. Open-economy identities and limits.
Verdict criterion_5() {
    const auto draws = feasible_open_draws(501, 300);
    bool exact_cx = true;
    double worst_entry = 0.0, worst_acc = 0.0;
    for (const auto& p : draws) {
        const auto eq = solve_open(p);
        exact_cx = exact_cx && eq.c_X == eq.c_D / p.tau();
        worst_entry = std::max(worst_entry, rel(oracle_entry_profit(eq.c_D, p, EconomyMode::open, 1e-13), p.small().f_E()));
        const double scale = std::max(1.0, eq.M);
        const auto& s = p.small();
        worst_acc = std::max(worst_acc, std::abs(eq.M_producers * (1 + eq.rho) - eq.M) / scale);
        worst_acc = std::max(worst_acc, std::abs(eq.M_entrants * (pareto_cdf(eq.c_D, s) + pareto_cdf(eq.c_X, s)) - eq.M) / scale);
    }
    // Limits on the feasible draws: tau = 1 and prohibitive tau.
    double worst_free = 0.0, worst_far = 0.0;
    int free_n = 0, far_n = 0;
    for (const auto& d : draws) {
        const auto p1 = d.with_tau(1.0);
        if (feasible<OpenEquilibrium>([&] { return solve_open(p1); })) {
            const auto eq = solve_open(p1);
            const double k = p1.small().k();
            const double expect = std::pow(p1.prefs().beta() * technology_index(p1.small()) / (2 * p1.L()), 1 / (k + 2));
            worst_free = std::max({worst_free, rel(eq.c_D, expect), rel(eq.c_X, eq.c_D), rel(eq.M_producers, 0.5 * eq.M)});
            if (eq.P_D) worst_free = std::max(worst_free, rel(*eq.P_X, *eq.P_D));
            ++free_n;
        }
        const ModelParams pn(d.prefs(), d.small(), LargeFirmSector(0, 0), d.L(), 1e6);
        if (feasible<OpenEquilibrium>([&] { return solve_open(pn); }) &&
            feasible<ClosedEquilibrium>([&] { return solve_closed(closed_of(pn)); })) {
            const auto eq = solve_open(pn);
            const auto ce = solve_closed(closed_of(pn));
            worst_far = std::max({worst_far, rel(eq.c_D, ce.c_D), rel(eq.M, ce.M), rel(eq.M_producers, eq.M)});
            ++far_n;
        }
    }
    const bool pass = exact_cx && worst_entry <= 1e-8 && worst_acc <= 1e-12 && worst_free <= 1e-12 &&
                      worst_far <= 1e-6 && free_n > 0 && far_n > 0;
    return {pass, fmt("300 feasible draws: c_X == c_D/tau exact: %s; max free-entry quadrature gap %.3g (tol 1e-8); "
                      "max accounting gap %.3g (tol 1e-12); tau=1 limit on %d draws: max gap %.3g; "
                      "tau=1e6 vs closed on %d draws: max gap %.3g (rho = %.1e)",
                      exact_cx ? "yes" : "no", worst_entry, worst_acc, free_n, worst_free, far_n, worst_far,
                      std::pow(1e6, -1.0))};
}

struct StaticsSample {
    ModelParams params;
    ComparativeStaticsResult r;
};

std::vector<StaticsSample> statics_draws() {
    static std::vector<StaticsSample> cache = [] {
        std::vector<StaticsSample> out;
        for (const auto& p : feasible_open_draws(601, 1000)) out.push_back({p, comparative_statics(p)});
        return out;
    }();
    return cache;
}

// 6. Derivatives against finite differences.
Verdict criterion_6() {
    double worst_c = 0.0, worst_m = 0.0;
    for (const auto& s : statics_draws()) {
        const double tau = s.params.tau();
        const double h = 1e-6 * tau;
        const double fd = (solve_cutoffs_open(s.params.with_tau(tau + h)).c_D -
                           solve_cutoffs_open(s.params.with_tau(tau - h)).c_D) / (2 * h);
        worst_c = std::max(worst_c, rel(s.r.dcD_dtau, fd));
        worst_m = std::max(worst_m, rel(s.r.dM_dtau_implicit, s.r.dM_dtau_fd));
    }
    return {worst_c <= 1e-6 && worst_m <= 1e-5,
            fmt("1000 feasible draws: max rel dc_D/dtau gap %.3g (tol 1e-6); max rel dM/dtau implicit-FD gap %.3g (tol 1e-5)",
                worst_c, worst_m)};
}

// 7. Seller-mass condition versus the sign of dM/dtau; display residuals reported.
Verdict criterion_7() {
    int agree = 0, total = 0, n0 = 0, residual_nonzero = 0;
    double max_residual = 0.0, max_n0_residual = 0.0;
    std::vector<double> residuals;
    for (const auto& s : statics_draws()) {
        ++total;
        agree += (s.r.dM_dtau_implicit < 0) == s.r.seller_condition.holds;
        const double res = std::abs(s.r.display_residual) / std::max(1.0, std::abs(s.r.dM_dtau_implicit));
        residuals.push_back(res);
        max_residual = std::max(max_residual, res);
        if (res > 1e-12) ++residual_nonzero;
        if (s.params.large().N() == 0.0) {
            ++n0;
            max_n0_residual = std::max(max_n0_residual, res);
        }
    }
    std::sort(residuals.begin(), residuals.end());
    return {agree == total,
            fmt("%d/%d draws agree (100%% required). Display vs implicit dM/dtau (informational): scaled residual "
                "median %.3g, max %.3g, nonzero on %d draws; at N=0 (%d draws) max %.3g",
                agree, total, residuals[residuals.size() / 2], max_residual, residual_nonzero, n0, max_n0_residual)};
}

// 8. Illustrative parameter points: search (k, c_M) for the required producer-mass signs.
Verdict criterion_8() {
    struct Outcome {
        bool feasible;
        double dMD;
        std::string failure;
    };
    auto evaluate = [](double alpha, double N, double C, double k, double c_M) -> Outcome {
        const ModelParams p(Preferences(alpha, 1, 1), SmallFirmTech(c_M, k, 1.0), LargeFirmSector(N, C), 100.0, 1.5);
        try {
            return {true, comparative_statics(p).dMD_dtau.total, ""};
        } catch (const SupportViolation&) {
            return {false, NAN, condition::support};
        } catch (const InfeasibleEquilibrium& e) {
            return {false, NAN, e.failed_condition()};
        }
    };
    std::vector<std::string> hits, misses;
    for (double k : {1.0, 2.0, 3.0, 4.0})
        for (double c_M : {0.25, 0.5, 1.0, 2.0}) {
            const auto a = evaluate(0.6, 1, 0.01, k, c_M);
            const auto b = evaluate(2.4, 2, 0.02, k, c_M);
            const bool ok = a.feasible && b.feasible && a.dMD < 0 && b.dMD > 0;
            const std::string desc = fmt("(k=%g, c_M=%g): point 1 %s, point 2 %s", k, c_M,
                                         a.feasible ? fmt("dM_D/dtau=%.4g", a.dMD).c_str() : a.failure.c_str(),
                                         b.feasible ? fmt("dM_D/dtau=%.4g", b.dMD).c_str() : b.failure.c_str());
            (ok ? hits : misses).push_back(desc);
        }
    if (!hits.empty()) {
        std::string d = fmt("%zu of 16 grid pairs reproduce both signs:", hits.size());
        for (const auto& h : hits) d += " " + h;
        return {true, d};
    }
    std::string d = "no grid pair reproduces both signs; nearest misses:";
    for (const auto& m : misses) d += "\n      " + m;
    return {false, d};
}

// 9. Printed producer-mass inequality versus the sign of dM_D/dtau (informational).
Verdict criterion_9() {
    int agree = 0, total = 0, n0 = 0, n0_agree = 0, finite = 0;
    int dis_pred_neg = 0, dis_pred_pos = 0;
    double dis_min_NC = INFINITY, dis_max_NC = 0.0;
    for (const auto& s : statics_draws()) {
        ++total;
        const bool direct = s.r.dMD_dtau.total < 0;
        const bool printed = s.r.producer_condition.holds;
        finite += std::isfinite(s.r.dMD_dtau.total) && std::isfinite(s.r.producer_condition.slack());
        if (direct == printed) {
            ++agree;
        } else {
            (printed ? dis_pred_neg : dis_pred_pos)++;
            const double NC = s.params.large().N() * s.params.large().C();
            dis_min_NC = std::min(dis_min_NC, NC);
            dis_max_NC = std::max(dis_max_NC, NC);
        }
        if (s.params.large().N() == 0.0) {
            ++n0;
            n0_agree += direct == printed;
        }
    }
    std::string region = agree == total
                             ? std::string("none")
                             : fmt("%d predict a fall that does not occur, %d miss a fall; N*C in [%.3g, %.3g]",
                                   dis_pred_neg, dis_pred_pos, dis_min_NC, dis_max_NC);
    return {finite == total && n0_agree == n0,
            fmt("agreement %d/%d (%.2f%%); disagreement region: %s; N=0 subset %d/%d agree",
                agree, total, 100.0 * agree / total, region.c_str(), n0_agree, n0),
            true};
}

// 10. Command-line golden files and exit codes.
Verdict criterion_10() {
    int ok = 0;
    std::string failures;
    const auto& cases = testing::golden_cases();
    for (const auto& c : cases) {
        const auto o = testing::check_case(c, COEXIST_CLI_PATH, COEXIST_TEST_DATA);
        if (o.exit_ok && o.output_ok) {
            ++ok;
        } else {
            failures += " " + c.golden + fmt("(exit %d, expected %d%s)", o.exit_code, c.expected_exit,
                                             o.output_ok ? "" : ", output differs");
        }
    }
    // Byte stability of the sweep CSV across repeated runs.
    const std::string cmd = std::string("'") + COEXIST_CLI_PATH + "' sweep fixtures/feasible.scn";
    const bool stable = testing::run_in(COEXIST_TEST_DATA, cmd).output == testing::run_in(COEXIST_TEST_DATA, cmd).output;
    return {ok == static_cast<int>(cases.size()) && stable,
            fmt("%d/%zu golden cases match (5 subcommands x feasible/infeasible/malformed, plus csv/json variants); "
                "sweep CSV byte-stable across runs: %s",
                ok, cases.size(), stable ? "yes" : "no") + failures};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {1, "closed-form cutoff vs free-entry oracle", criterion_1},
        {2, "mass solver residual and N=0 closed form", criterion_2},
        {3, "coexistence gate", criterion_3},
        {4, "stage-2 best-response prices", criterion_4},
        {5, "open-economy identities and limits", criterion_5},
        {6, "comparative statics vs finite differences", criterion_6},
        {7, "seller-mass condition vs sign of dM/dtau", criterion_7},
        {8, "illustrative parameter points", criterion_8},
        {9, "producer-mass inequality cross-check", criterion_9},
        {10, "command-line golden files", criterion_10},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = v.pass ? (v.informational ? "PASS (informational)" : "PASS") : "FAIL";
        std::printf("[%s] %d. %s (%.1fs): %s\n", tag, c.id, c.title, secs, v.detail.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
