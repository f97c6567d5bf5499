#pragma once

#include <stdexcept>
#include <string>

#include "coexist/feasibility.hpp"

namespace coexist {

/// The free-entry cutoff lies above the upper bound of the cost support.
class SupportViolation : public std::domain_error {
public:
    SupportViolation(double cutoff, double c_M, double min_c_M);
    /// When the cutoff itself is unknown (e.g. found by search); cutoff and
    /// min_c_M are NaN.
    SupportViolation(const std::string& what, double c_M);

    double cutoff() const noexcept { return cutoff_; }
    double c_M() const noexcept { return c_M_; }
    /// Smallest support bound for which the cutoff would be interior.
    double min_c_M() const noexcept { return min_c_M_; }

private:
    double cutoff_;
    double c_M_;
    double min_c_M_;
};

/// A regime assumption failed; the report holds every evaluated condition.
class InfeasibleEquilibrium : public std::runtime_error {
public:
    InfeasibleEquilibrium(const std::string& what, FeasibilityReport report);

    const FeasibilityReport& report() const noexcept { return report_; }
    /// Name of the first binding condition that failed (empty if none recorded).
    std::string failed_condition() const;

private:
    FeasibilityReport report_;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InternalInconsistency : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DegenerateJacobian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace coexist
