#include "coexist/feasibility.hpp"
#include "coexist/errors.hpp"

#include <limits>
#include <sstream>
#include <utility>

namespace coexist {

bool Condition::pass() const {
    return relation == Relation::greater ? lhs > rhs : lhs >= rhs;
}

void FeasibilityReport::add(std::string name, double lhs, double rhs, Relation relation,
                            bool binding) {
    conditions_.push_back({std::move(name), lhs, rhs, relation, binding});
}

bool FeasibilityReport::feasible() const {
    for (const auto& c : conditions_)
        if (c.binding && !c.pass()) return false;
    return true;
}

const Condition* FeasibilityReport::find(const std::string& name) const {
    for (const auto& c : conditions_)
        if (c.name == name) return &c;
    return nullptr;
}

std::optional<Condition> FeasibilityReport::first_failure() const {
    for (const auto& c : conditions_)
        if (c.binding && !c.pass()) return c;
    return std::nullopt;
}

namespace {

std::string support_message(double cutoff, double c_M, double min_c_M) {
    std::ostringstream os;
    os.precision(17);
    os << "support violation: cutoff " << cutoff << " exceeds c_M = " << c_M
       << "; c_M >= " << min_c_M << " restores an interior cutoff";
    return os.str();
}

} // namespace

SupportViolation::SupportViolation(double cutoff, double c_M, double min_c_M)
    : std::domain_error(support_message(cutoff, c_M, min_c_M)),
      cutoff_(cutoff), c_M_(c_M), min_c_M_(min_c_M) {}

SupportViolation::SupportViolation(const std::string& what, double c_M)
    : std::domain_error(what), cutoff_(std::numeric_limits<double>::quiet_NaN()), c_M_(c_M),
      min_c_M_(std::numeric_limits<double>::quiet_NaN()) {}

InfeasibleEquilibrium::InfeasibleEquilibrium(const std::string& what, FeasibilityReport report)
    : std::runtime_error(what), report_(std::move(report)) {}

std::string InfeasibleEquilibrium::failed_condition() const {
    auto f = report_.first_failure();
    return f ? f->name : std::string{};
}

} // namespace coexist
