#pragma once
#include <vector>

namespace uwoc {

// Order/parameter description of a Meijer-G instance G^{m,n}_{p,q}(z | a; b).
// a has length p (first n entries form the numerator group), b has length q
// (first m entries form the numerator group). Construction validates the
// counts and rejects pole-collision parameter sets (some a_j - b_k a positive
// integer for j < n, k < m), which make the defining contour ill-posed.
struct MeijerOrder {
    int m = 0, n = 0;
    std::vector<double> a, b;

    MeijerOrder(int m_, int n_, std::vector<double> a_, std::vector<double> b_);
    int p() const { return int(a.size()); }
    int q() const { return int(b.size()); }
};

struct EvalAccuracy {
    double rel_tol = 1e-10;     // requested; 1e-8 is the guaranteed contract
    long max_nodes = 2000000;   // quadrature/series budget
};

enum MeijerFlag : unsigned {
    kMeijerPerturbed = 1u,       // coincident b-parameters nudged by ~1e-7
    kMeijerContour = 2u,         // evaluated on the Mellin-Barnes line
    kMeijerCancellation = 4u,    // residue path lost digits, fell back
    kMeijerInverted = 8u,        // argument-inversion identity applied
};

struct MeijerResult {
    double value = 0.0;    // sign * exp(log_abs); +-inf when log_abs > ~709
    double log_abs = 0.0;  // ln |G|; usable even when value overflows
    int sign = 0;          // -1, 0, +1
    double rel_err = 0.0;  // estimated relative error
    unsigned flags = 0;
    bool converged = true;
};

// Numerical Meijer-G for z > 0. Residue (Slater) series fast path when the
// numerator-group b poles are simple and the series is well conditioned;
// Mellin-Barnes contour integration otherwise. Throws DomainError for
// z <= 0 and UnsupportedParameters for parameter sets outside the contract;
// budget exhaustion is reported via converged=false (value holds the best
// estimate).
MeijerResult meijer_g(const MeijerOrder& order, double z,
                      const EvalAccuracy& acc = {});

// Convenience wrapper: returns the value, throwing NoConvergence when the
// evaluator could not reach its tolerance.
double meijer_g_value(const MeijerOrder& order, double z,
                      const EvalAccuracy& acc = {});

}  // namespace uwoc
