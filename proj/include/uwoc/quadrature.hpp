#pragma once
#include <functional>
#include <vector>

namespace uwoc {

struct QuadResult {
    double value;
    double err_estimate;  // absolute
    long nodes_used;
    bool converged;
};

// Adaptive Gauss-Kronrod 15(7) on a finite interval. Splits the worst
// subinterval until the summed error estimate satisfies
// |err| <= max(abs_tol, rel_tol * |value|) or the node budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol = 1e-10,
                              double abs_tol = 0.0, long max_nodes = 200000);

// Convenience wrapper that throws NoConvergence when the tolerance is not
// reached.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10,
                          double abs_tol = 0.0, long max_nodes = 200000);

// Semi-infinite integral over [a, inf): geometric panels [a + s*(g^k - 1),
// a + s*(g^{k+1} - 1)) integrated adaptively, stopped once several
// consecutive panels contribute below tolerance.
QuadResult integrate_to_infinity(const std::function<double(double)>& f,
                                 double a, double rel_tol = 1e-10,
                                 double scale = 1.0, long max_nodes = 400000);

// Non-adaptive composite Gauss-Legendre (20-point) over [a, b] split into
// n_panels equal (or log-spaced) panels. Used by the turbulence spectra
// where the integrand is smooth and the node placement must be cheap.
double integrate_gl_panels(const std::function<double(double)>& f, double a,
                           double b, int n_panels, bool log_spaced = false);

}  // namespace uwoc
