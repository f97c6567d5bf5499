#include "coexist/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "coexist/closed_economy.hpp"
#include "coexist/comparative_statics.hpp"
#include "coexist/entry_simulator.hpp"
#include "coexist/errors.hpp"
#include "coexist/numerics.hpp"
#include "coexist/open_economy.hpp"

namespace coexist::cli {

using Json = nlohmann::ordered_json;

std::string format_number(double x) {
    if (!std::isfinite(x)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

constexpr int kSchema = 1;

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::string cell(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

std::string cell(bool b) { return b ? "true" : "false"; }

// Quotes a CSV field when it contains a delimiter, quote or newline.
std::string text_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line + '\n';
}

Json params_json(const ModelParams& p) {
    return Json{{"alpha", p.prefs().alpha()}, {"beta", p.prefs().beta()},
                {"gamma", p.prefs().gamma()}, {"L", p.L()},
                {"N", p.large().N()},          {"C", p.large().C()},
                {"c_M", p.small().c_M()},      {"k", p.small().k()},
                {"f_E", p.small().f_E()},      {"tau", p.tau()}};
}

Json report_json(const FeasibilityReport& r) {
    Json rows = Json::array();
    for (const auto& c : r.conditions())
        rows.push_back({{"name", c.name},
                        {"lhs", number(c.lhs)},
                        {"rhs", number(c.rhs)},
                        {"slack", number(c.slack())},
                        {"relation", c.relation == Relation::greater ? ">" : ">="},
                        {"binding", c.binding},
                        {"pass", c.pass()}});
    return rows;
}

Json condition_json(const ConditionValue& c) {
    return {{"holds", c.holds}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"slack", number(c.slack())}};
}

Json header(const char* command, const Scenario& sc) {
    return Json{{"schema", kSchema}, {"command", command}, {"params", params_json(sc.params)}};
}

std::string dump(const Json& j) { return j.dump(2) + '\n'; }

// Outcome of an analytic solve: either a value or the report explaining why not.
template <class T>
struct Solved {
    std::optional<T> value;
    FeasibilityReport report;
    std::string failed; ///< empty when feasible
    std::optional<double> min_c_M;
};

FeasibilityReport support_report(const SupportViolation& e) {
    FeasibilityReport r;
    r.add(condition::support, e.c_M(), e.cutoff(), Relation::greater_equal);
    return r;
}

Solved<ClosedEquilibrium> try_closed(const ModelParams& p) {
    Solved<ClosedEquilibrium> s;
    try {
        s.value = solve_closed(p);
        s.report = s.value->report;
    } catch (const SupportViolation& e) {
        s.report = coexistence_check(p);
        s.failed = condition::support;
        s.min_c_M = e.min_c_M();
    } catch (const InfeasibleEquilibrium& e) {
        s.report = e.report();
        s.failed = e.failed_condition();
    }
    return s;
}

Solved<OpenEquilibrium> try_open(const ModelParams& p) {
    Solved<OpenEquilibrium> s;
    try {
        s.value = solve_open(p);
        s.report = s.value->report;
    } catch (const SupportViolation& e) {
        s.report = support_report(e);
        s.failed = condition::support;
        s.min_c_M = e.min_c_M();
    } catch (const InfeasibleEquilibrium& e) {
        s.report = e.report();
        s.failed = e.failed_condition();
    }
    return s;
}

template <class T>
void add_status(Json& j, const Solved<T>& s) {
    j["status"] = s.value ? "feasible" : "infeasible";
    if (!s.value) j["failed_condition"] = s.failed;
    if (s.min_c_M) j["min_c_M"] = number(*s.min_c_M);
}

template <class T>
std::string status_cell(const Solved<T>& s) {
    return text_cell(s.value ? std::string("feasible") : s.failed);
}

Json open_equilibrium_json(const OpenEquilibrium& eq) {
    return {{"c_D", eq.c_D},       {"c_X", eq.c_X},
            {"rho", eq.rho},       {"M", eq.M},
            {"M_E", eq.M_entrants}, {"M_D", eq.M_producers},
            {"Theta", eq.Theta},   {"P_D", number(eq.P_D)},
            {"P_X", number(eq.P_X)}};
}

} // namespace

CommandResult solve_closed_command(const Scenario& sc, Format format) {
    const auto s = try_closed(sc.params);
    const int code = s.value ? exit_code::ok : exit_code::infeasible;
    if (format == Format::csv) {
        std::string out = join({"c_D", "M", "Theta", "P_large", "P_agg", "status"});
        if (s.value) {
            const auto& eq = *s.value;
            out += join({format_number(eq.c_D), format_number(eq.M), format_number(eq.Theta),
                         cell(eq.P_large), format_number(eq.P_agg), status_cell(s)});
        } else {
            out += join({"NA", "NA", "NA", "NA", "NA", status_cell(s)});
        }
        return {code, out};
    }
    Json j = header("solve-closed", sc);
    add_status(j, s);
    if (s.value) {
        const auto& eq = *s.value;
        j["equilibrium"] = {{"c_D", eq.c_D},
                            {"M", eq.M},
                            {"Theta", eq.Theta},
                            {"P_large", number(eq.P_large)},
                            {"P_agg", eq.P_agg}};
    } else {
        j["equilibrium"] = nullptr;
    }
    j["feasibility"] = report_json(s.report);
    return {code, dump(j)};
}

CommandResult solve_open_command(const Scenario& sc, Format format) {
    const auto s = try_open(sc.params);
    const int code = s.value ? exit_code::ok : exit_code::infeasible;
    if (format == Format::csv) {
        std::string out =
            join({"tau", "rho", "c_D", "c_X", "M", "M_D", "M_E", "Theta", "P_D", "P_X", "status"});
        if (s.value) {
            const auto& eq = *s.value;
            out += join({format_number(sc.params.tau()), format_number(eq.rho),
                         format_number(eq.c_D), format_number(eq.c_X), format_number(eq.M),
                         format_number(eq.M_producers), format_number(eq.M_entrants),
                         format_number(eq.Theta), cell(eq.P_D), cell(eq.P_X), status_cell(s)});
        } else {
            out += join({format_number(sc.params.tau()), "NA", "NA", "NA", "NA", "NA", "NA", "NA",
                         "NA", "NA", status_cell(s)});
        }
        return {code, out};
    }
    Json j = header("solve-open", sc);
    add_status(j, s);
    j["equilibrium"] = s.value ? open_equilibrium_json(*s.value) : Json(nullptr);
    j["feasibility"] = report_json(s.report);
    j["positivity_variants_disagree"] = positivity_variants_disagree(s.report);
    return {code, dump(j)};
}

CommandResult statics_command(const Scenario& sc, Format format) {
    if (!(sc.params.tau() > 1.0))
        throw ScenarioError("statics requires tau > 1 (the derivatives are taken at interior trade costs)");
    std::optional<ComparativeStaticsResult> r;
    Solved<OpenEquilibrium> s = try_open(sc.params);
    if (s.value) {
        try {
            r = comparative_statics(sc.params);
        } catch (const DegenerateJacobian&) {
            s.value.reset();
            s.failed = "degenerate Jacobian of the mass equation";
        }
    }
    const int code = r ? exit_code::ok : exit_code::infeasible;

    if (format == Format::csv) {
        std::string out = join({"tau", "rho", "c_D", "c_X", "M", "M_D", "M_E", "dcD_dtau",
                                "dM_dtau_display", "dM_dtau_implicit", "dM_dtau_fd",
                                "display_residual", "dMD_dtau", "dMD_mass_change",
                                "dMD_reallocation", "prop2", "prop2_slack", "prop3",
                                "prop3_slack", "status"});
        if (r) {
            const auto& eq = r->eq;
            out += join({format_number(sc.params.tau()), format_number(eq.rho),
                         format_number(eq.c_D), format_number(eq.c_X), format_number(eq.M),
                         format_number(eq.M_producers), format_number(eq.M_entrants),
                         format_number(r->dcD_dtau), format_number(r->dM_dtau_display),
                         format_number(r->dM_dtau_implicit), format_number(r->dM_dtau_fd),
                         format_number(r->display_residual), format_number(r->dMD_dtau.total),
                         format_number(r->dMD_dtau.mass_change),
                         format_number(r->dMD_dtau.reallocation), cell(r->seller_condition.holds),
                         format_number(r->seller_condition.slack()),
                         cell(r->producer_condition.holds),
                         format_number(r->producer_condition.slack()), status_cell(s)});
        } else {
            std::vector<std::string> row(20, "NA");
            row[0] = format_number(sc.params.tau());
            row[19] = status_cell(s);
            out += join(row);
        }
        return {code, out};
    }

    Json j = header("statics", sc);
    add_status(j, s);
    if (r) {
        j["equilibrium"] = open_equilibrium_json(r->eq);
        const auto& a = r->agreement;
        j["statics"] = {
            {"dcD_dtau", r->dcD_dtau},
            {"dM_dtau_display", number(r->dM_dtau_display)},
            {"dM_dtau_implicit", r->dM_dtau_implicit},
            {"dM_dtau_fd", r->dM_dtau_fd},
            {"display_residual", number(r->display_residual)},
            {"dMD_dtau",
             {{"mass_change", r->dMD_dtau.mass_change},
              {"reallocation", r->dMD_dtau.reallocation},
              {"total", r->dMD_dtau.total}}},
            {"prop2", condition_json(r->seller_condition)},
            {"prop3", condition_json(r->producer_condition)},
            {"agreement",
             {{"magnitude_tolerance", DerivativeAgreement::magnitude_tolerance},
              {"implicit_fd_sign", a.implicit_fd_sign},
              {"implicit_fd_magnitude", a.implicit_fd_magnitude},
              {"implicit_display_sign", a.implicit_display_sign},
              {"implicit_display_magnitude", a.implicit_display_magnitude},
              {"fd_display_sign", a.fd_display_sign},
              {"fd_display_magnitude", a.fd_display_magnitude}}}};
    } else {
        j["equilibrium"] = nullptr;
        j["statics"] = nullptr;
    }
    j["feasibility"] = report_json(s.report);
    return {code, dump(j)};
}

CommandResult sweep_command(const Scenario& sc, Format format) {
    if (!sc.sweep) throw ScenarioError("sweep requires a [sweep] block (tau_min, tau_max, steps)");
    const auto grid = sweep_grid(*sc.sweep);
    const auto rows = tau_sweep(sc.params, grid);
    bool all_feasible = true;
    for (const auto& row : rows) all_feasible = all_feasible && row.values.has_value();
    const int code = all_feasible ? exit_code::ok : exit_code::infeasible;

    if (format == Format::csv) {
        std::string out = join({"tau", "rho", "c_D", "c_X", "M", "M_D", "M_E", "dM_dtau_implicit",
                                "dMD_dtau", "prop2", "prop3", "status"});
        for (const auto& row : rows) {
            if (row.values) {
                const auto& v = *row.values;
                out += join({format_number(row.tau), format_number(v.rho), format_number(v.c_D),
                             format_number(v.c_X), format_number(v.M),
                             format_number(v.M_producers), format_number(v.M_entrants),
                             format_number(v.dM_dtau_implicit), format_number(v.dMD_dtau),
                             cell(v.seller_condition), cell(v.producer_condition), "feasible"});
            } else {
                std::vector<std::string> cells(12, "NA");
                cells[0] = format_number(row.tau);
                cells[11] = text_cell(row.failed_condition);
                out += join(cells);
            }
        }
        return {code, out};
    }

    Json j = header("sweep", sc);
    j["status"] = all_feasible ? "feasible" : "partially infeasible";
    Json table = Json::array();
    for (const auto& row : rows) {
        Json r{{"tau", row.tau}};
        if (row.values) {
            const auto& v = *row.values;
            r.update(Json{{"rho", v.rho},
                          {"c_D", v.c_D},
                          {"c_X", v.c_X},
                          {"M", v.M},
                          {"M_D", v.M_producers},
                          {"M_E", v.M_entrants},
                          {"dM_dtau_implicit", v.dM_dtau_implicit},
                          {"dMD_dtau", v.dMD_dtau},
                          {"prop2", v.seller_condition},
                          {"prop3", v.producer_condition},
                          {"status", "feasible"}});
        } else {
            for (const char* key : {"rho", "c_D", "c_X", "M", "M_D", "M_E", "dM_dtau_implicit",
                                    "dMD_dtau", "prop2", "prop3"})
                r[key] = nullptr;
            r["status"] = row.failed_condition;
        }
        table.push_back(std::move(r));
    }
    j["rows"] = std::move(table);
    return {code, dump(j)};
}

namespace {

struct Comparison {
    std::string quantity;
    double analytic;
    double oracle;
    double rel_diff;
    double tolerance;
    bool pass;
};

struct RefinementRow {
    int J;
    double c_D_rel_error;
    double M_rel_error;
};

struct ModeVerification {
    const char* mode;
    std::string analytic_status; ///< "feasible" or the failed condition
    std::string oracle_status;
    std::vector<Comparison> comparisons;
    std::vector<RefinementRow> refinement;
    bool refinement_monotone = true;

    bool classification_agrees() const { return analytic_status == oracle_status; }
    bool pass() const {
        if (!classification_agrees()) return false;
        for (const auto& c : comparisons)
            if (!c.pass) return false;
        return true;
    }
};

struct AnalyticPoint {
    double c_D;
    double M;
};

std::string oracle_status_of(const ModelParams& p, EconomyMode mode, const OracleOptions& opt,
                             std::optional<OracleResult>& out) {
    try {
        out = free_entry_oracle(p, mode, opt);
        return "feasible";
    } catch (const SupportViolation&) {
        return condition::support;
    } catch (const InfeasibleEquilibrium& e) {
        return e.failed_condition();
    }
}

ModeVerification verify_mode(const Scenario& sc, EconomyMode mode) {
    ModeVerification v;
    v.mode = mode == EconomyMode::closed ? "closed" : "open";
    std::optional<AnalyticPoint> analytic;
    if (mode == EconomyMode::closed) {
        const auto s = try_closed(sc.params);
        v.analytic_status = s.value ? "feasible" : s.failed;
        if (s.value) analytic = AnalyticPoint{s.value->c_D, s.value->M};
    } else {
        const auto s = try_open(sc.params);
        v.analytic_status = s.value ? "feasible" : s.failed;
        if (s.value) analytic = AnalyticPoint{s.value->c_D, s.value->M};
    }

    OracleOptions opt;
    opt.J = sc.oracle.J;
    std::optional<OracleResult> oracle;
    v.oracle_status = oracle_status_of(sc.params, mode, opt, oracle);
    if (!analytic || !oracle) return v;

    auto compare = [&](const char* q, double a, double o, double tol) {
        const double d = numerics::relative_difference(o, a);
        v.comparisons.push_back({q, a, o, d, tol, d <= tol});
    };
    compare("c_D", analytic->c_D, oracle->c_D, sc.oracle.tol_cutoff);
    compare("M", analytic->M, oracle->M, sc.oracle.tol_mass);

    double prev = INFINITY;
    for (int J : {250, 500, 1000, 2000}) {
        OracleOptions o;
        o.J = J;
        const auto r = free_entry_oracle(sc.params, mode, o);
        const double err_M = numerics::relative_difference(r.M, analytic->M);
        v.refinement.push_back({J, numerics::relative_difference(r.c_D, analytic->c_D), err_M});
        if (!(err_M < prev)) v.refinement_monotone = false;
        prev = err_M;
    }
    return v;
}

} // namespace

CommandResult verify_command(const Scenario& sc, Format format) {
    const std::vector<ModeVerification> modes{verify_mode(sc, EconomyMode::closed),
                                              verify_mode(sc, EconomyMode::open)};
    bool pass = true;
    bool feasible = true;
    for (const auto& m : modes) {
        pass = pass && m.pass();
        feasible = feasible && m.analytic_status == "feasible";
    }
    const int code = !pass      ? exit_code::verification_failed
                     : feasible ? exit_code::ok
                                : exit_code::infeasible;
    const char* status = !pass ? "fail" : feasible ? "pass" : "infeasible";

    if (format == Format::csv) {
        std::string out =
            join({"section", "mode", "J", "quantity", "analytic", "oracle", "rel_diff", "tolerance", "pass"});
        const std::string J = std::to_string(sc.oracle.J);
        for (const auto& m : modes) {
            out += join({"classification", m.mode, J, "status", text_cell(m.analytic_status),
                         text_cell(m.oracle_status), "NA", "NA", cell(m.classification_agrees())});
            for (const auto& c : m.comparisons)
                out += join({"comparison", m.mode, J, c.quantity, format_number(c.analytic),
                             format_number(c.oracle), format_number(c.rel_diff),
                             format_number(c.tolerance), cell(c.pass)});
            for (const auto& r : m.refinement) {
                out += join({"refinement", m.mode, std::to_string(r.J), "c_D", "NA", "NA",
                             format_number(r.c_D_rel_error), "NA", "NA"});
                out += join({"refinement", m.mode, std::to_string(r.J), "M", "NA", "NA",
                             format_number(r.M_rel_error), "NA", "NA"});
            }
        }
        return {code, out};
    }

    Json j = header("verify", sc);
    j["status"] = status;
    j["oracle"] = {{"J", sc.oracle.J}, {"tol_cutoff", sc.oracle.tol_cutoff}, {"tol_mass", sc.oracle.tol_mass}};
    Json jm = Json::array();
    for (const auto& m : modes) {
        Json comps = Json::array();
        for (const auto& c : m.comparisons)
            comps.push_back({{"quantity", c.quantity},
                             {"analytic", c.analytic},
                             {"oracle", c.oracle},
                             {"rel_diff", number(c.rel_diff)},
                             {"tolerance", c.tolerance},
                             {"pass", c.pass}});
        Json refine = Json::array();
        for (const auto& r : m.refinement)
            refine.push_back({{"J", r.J}, {"c_D_rel_error", number(r.c_D_rel_error)}, {"M_rel_error", number(r.M_rel_error)}});
        Json entry{{"mode", m.mode},
                   {"analytic_status", m.analytic_status},
                   {"oracle_status", m.oracle_status},
                   {"classification_agrees", m.classification_agrees()},
                   {"comparisons", std::move(comps)},
                   {"refinement", std::move(refine)}};
        if (!m.refinement.empty()) entry["refinement_monotone"] = m.refinement_monotone;
        jm.push_back(std::move(entry));
    }
    j["modes"] = std::move(jm);
    return {code, dump(j)};
}

} // namespace coexist::cli
