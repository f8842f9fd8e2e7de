#pragma once

#include <stdexcept>
#include <string>

namespace bose {

// Error taxonomy. Each class maps onto one failure mode of the library
// surface so callers (and the CLI) can react without string matching.

/// Bad input: violated precondition, malformed config, power-law cap breach.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested basis would exceed the configured state-count limit.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters outside the regime where a formula or bound is defined.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Shell decomposition cannot fit the geometry (shell width would be < 1).
struct infeasible_plan_error : std::runtime_error {
    explicit infeasible_plan_error(const std::string& what) : std::runtime_error(what) {}
};

/// Unitarity drift or other numerical breakdown; the run must abort.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Coupling pattern cannot satisfy the power-law cap at any positive rate.
struct cap_violation_error : std::runtime_error {
    explicit cap_violation_error(const std::string& what) : std::runtime_error(what) {}
};

/// No admissible ancilla path exists in the given geometry.
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

/// Statistic undefined for this input (e.g. too few nonzero entries).
struct degenerate_error : std::runtime_error {
    explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter refinement failed to converge to the requested tolerance.
struct no_solution_error : std::runtime_error {
    explicit no_solution_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bose
