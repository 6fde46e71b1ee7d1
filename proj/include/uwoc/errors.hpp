#pragma once
#include <stdexcept>
#include <string>

namespace uwoc {

// Invalid argument outside a function's stated domain (x <= 0 etc).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameter set the evaluator cannot represent (pole collisions etc).
struct UnsupportedParameters : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iteration/quadrature budget exhausted before reaching tolerance.
// Carries the best estimate so callers can degrade gracefully.
struct NoConvergence : std::runtime_error {
    double best_estimate;
    double err_estimate;
    NoConvergence(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), err_estimate(err) {}
};

// Configuration file / CLI input problem; message carries the field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace uwoc
