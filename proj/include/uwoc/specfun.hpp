#pragma once
#include <complex>

namespace uwoc {

// ln Gamma(x) for x > 0. Relative error <= 1e-13 on [1e-6, 1e6].
// Throws DomainError for x <= 0.
double log_gamma(double x);

// ln|Gamma(x)| plus the sign of Gamma(x), valid for any non-pole real x.
// At a pole (x = 0, -1, -2, ...) returns {+inf, 0}; a sign of 0 marks the
// pole so callers can treat 1/Gamma as an exact zero.
struct SignedLogGamma {
    double log_abs;
    int sign;
};
SignedLogGamma signed_log_gamma(double x);

// Principal-branch log Gamma for complex z (any branch offset is harmless
// to callers that only exponentiate sums of these).
std::complex<double> log_gamma(std::complex<double> z);

// Modified Bessel function of the second kind K_v(x), x > 0.
// Relative error <= 1e-10 for x in [1e-4, 50], |v| <= 50.
double bessel_k(double v, double x);

// Scaled variant: returns {ln K_v(x), K_v(x)} so large-order values that
// overflow a double still carry their logarithm.
struct BesselKResult {
    double log_value;
    double value;  // may be +inf when log_value > ~709
};
BesselKResult bessel_k_log(double v, double x);

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Series for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

}  // namespace uwoc
