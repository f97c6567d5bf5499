#pragma once

#include <optional>
#include <string>
#include <vector>

namespace coexist {

enum class Relation { greater, greater_equal };

/// One existence inequality `lhs > rhs` (or `>=`), evaluated at a parameter point.
struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::greater;
    /// Binding conditions decide feasibility; the rest are reported for comparison.
    bool binding = true;

    double slack() const { return lhs - rhs; }
    bool pass() const;
};

class FeasibilityReport {
public:
    void add(std::string name, double lhs, double rhs,
             Relation relation = Relation::greater, bool binding = true);

    const std::vector<Condition>& conditions() const noexcept { return conditions_; }
    bool feasible() const;
    const Condition* find(const std::string& name) const;
    std::optional<Condition> first_failure() const;

private:
    std::vector<Condition> conditions_;
};

// Condition names shared by the analytic solvers, the oracle and the CLI.
namespace condition {
inline constexpr const char* support = "cutoff within support: c_M >= c_D";
inline constexpr const char* large_viable = "Proposition 1 (i): C < c_D";
inline constexpr const char* positive_mass = "Proposition 1 (ii): positive small-firm mass";
inline constexpr const char* large_domestic = "large firms sell domestically: C < c_D";
inline constexpr const char* large_export = "large firms export: C < c_X";
inline constexpr const char* open_positive_mass = "positive small-firm mass (internalization with 2N firms)";
inline constexpr const char* open_positive_mass_printed = "positive small-firm mass (printed factor with N firms)";
} // namespace condition

} // namespace coexist
