#include "coexist/cli/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string_view>

namespace coexist::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"", {"alpha", "beta", "gamma", "L", "N", "C", "c_M", "k", "f_E", "tau"}},
        {"sweep", {"tau_min", "tau_max", "steps"}},
        {"oracle", {"J", "tol_cutoff", "tol_mass"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ScenarioError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(origin_ + ": " + msg); }

    void read(std::istream& in) {
        std::string raw;
        int line = 0;
        std::string section;
        while (std::getline(in, raw)) {
            ++line;
            std::string_view s = raw;
            if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') fail(line, "unterminated section header");
                section = std::string(trim(s.substr(1, s.size() - 2)));
                if (!allowed_keys().count(section) || section.empty())
                    fail(line, "unknown section [" + section + "]");
                if (!seen_sections_.insert(section).second)
                    fail(line, "duplicate section [" + section + "]");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string_view::npos) fail(line, "expected 'key = value'");
            const std::string key(trim(s.substr(0, eq)));
            const std::string value(trim(s.substr(eq + 1)));
            if (key.empty()) fail(line, "missing key before '='");
            if (value.empty()) fail(line, "missing value for key '" + key + "'");
            if (!allowed_keys().at(section).count(key))
                fail(line, "unknown key '" + key + "'" +
                               (section.empty() ? std::string() : " in [" + section + "]"));
            auto& sec = sections_[section];
            if (auto it = sec.find(key); it != sec.end())
                fail(line, "duplicate key '" + key + "' (first set on line " +
                               std::to_string(it->second.line) + ")");
            sec[key] = {value, line};
        }
    }

    bool has_section(const std::string& name) const { return seen_sections_.count(name) > 0; }

    const Entry* find(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        const auto e = s->second.find(key);
        return e == s->second.end() ? nullptr : &e->second;
    }

    double real(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) fail("missing required key '" + key + "'" + where(section));
        return parse_real(*e, key);
    }

    std::optional<double> optional_real(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        return parse_real(*e, key);
    }

    int integer(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) fail("missing required key '" + key + "'" + where(section));
        return parse_int(*e, key);
    }

    std::optional<int> optional_integer(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        return parse_int(*e, key);
    }

private:
    static std::string where(const std::string& section) {
        return section.empty() ? std::string() : " in [" + section + "]";
    }

    double parse_real(const Entry& e, const std::string& key) const {
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            fail(e.line, "key '" + key + "': '" + e.value + "' is not a decimal number");
        return v;
    }

    int parse_int(const Entry& e, const std::string& key) const {
        int v = 0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            fail(e.line, "key '" + key + "': '" + e.value + "' is not an integer");
        return v;
    }

    std::string origin_;
    std::map<std::string, Section> sections_;
    std::set<std::string> seen_sections_;
};

} // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Reader r(origin);
    r.read(in);

    const double alpha = r.real("", "alpha");
    const double beta = r.real("", "beta");
    const double gamma = r.real("", "gamma");
    const double L = r.real("", "L");
    const int N = r.integer("", "N");
    const double C = r.real("", "C");
    const double c_M = r.real("", "c_M");
    const double k = r.real("", "k");
    const double f_E = r.real("", "f_E");
    const double tau = r.optional_real("", "tau").value_or(1.0);

    std::optional<ModelParams> params;
    try {
        params.emplace(Preferences(alpha, beta, gamma), SmallFirmTech(c_M, k, f_E),
                       LargeFirmSector(static_cast<double>(N), C), L, tau);
    } catch (const std::invalid_argument& e) {
        r.fail(std::string("invalid parameters: ") + e.what());
    }
    Scenario sc{*params, std::nullopt, {}};

    if (r.has_section("sweep")) {
        SweepBlock sw{r.real("sweep", "tau_min"), r.real("sweep", "tau_max"), r.integer("sweep", "steps")};
        if (sw.steps < 1) r.fail("[sweep] steps must be at least 1");
        if (!(sw.tau_min > 1.0)) r.fail("[sweep] tau_min must exceed 1");
        if (sw.steps > 1 && !(sw.tau_max > sw.tau_min))
            r.fail("[sweep] tau_max must exceed tau_min");
        sc.sweep = sw;
    }
    if (r.has_section("oracle")) {
        sc.oracle.J = r.optional_integer("oracle", "J").value_or(sc.oracle.J);
        sc.oracle.tol_cutoff = r.optional_real("oracle", "tol_cutoff").value_or(sc.oracle.tol_cutoff);
        sc.oracle.tol_mass = r.optional_real("oracle", "tol_mass").value_or(sc.oracle.tol_mass);
        if (sc.oracle.J < 100) r.fail("[oracle] J must be at least 100");
        if (!(sc.oracle.tol_cutoff > 0.0) || !(sc.oracle.tol_mass > 0.0))
            r.fail("[oracle] tolerances must be positive");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    return parse_scenario(in, path);
}

std::vector<double> sweep_grid(const SweepBlock& sw) {
    std::vector<double> grid;
    grid.reserve(sw.steps);
    if (sw.steps == 1) {
        grid.push_back(sw.tau_min);
        return grid;
    }
    const double span = sw.tau_max - sw.tau_min;
    for (int i = 0; i < sw.steps; ++i)
        grid.push_back(i + 1 == sw.steps ? sw.tau_max : sw.tau_min + span * i / (sw.steps - 1));
    return grid;
}

} // namespace coexist::cli
