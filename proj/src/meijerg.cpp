#include "uwoc/meijerg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "uwoc/errors.hpp"
#include "uwoc/quadrature.hpp"
#include "uwoc/specfun.hpp"

namespace uwoc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxSeriesTerms = 800;
// Terms whose scaled log exceeds this trigger a rescale of the accumulator.
constexpr double kRescaleLog = 280.0;
}  // namespace

MeijerOrder::MeijerOrder(int m_, int n_, std::vector<double> a_,
                         std::vector<double> b_)
    : m(m_), n(n_), a(std::move(a_)), b(std::move(b_)) {
    if (m < 0 || n < 0 || m > int(b.size()) || n > int(a.size())) {
        throw UnsupportedParameters(
            "meijer_g: require 0 <= n <= p and 0 <= m <= q");
    }
    // A numerator a-pole colliding with a numerator b-pole (a_j - b_k a
    // positive integer) leaves no contour separating the two families.
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < m; ++k) {
            const double d = a[j] - b[k];
            const double r = std::round(d);
            if (r >= 1.0 && std::fabs(d - r) < 1e-12) {
                throw UnsupportedParameters(
                    "meijer_g: a[j] - b[k] is a positive integer "
                    "(numerator pole collision)");
            }
        }
    }
}

namespace {

// ---------------------------------------------------------------------------
// Residue (Slater-type) expansion over the numerator-group b poles:
//   G = sum_{h<m} sum_{k>=0} T_{h,k},
//   T_{h,k} = (-1)^k/k! * prod_{j<m, j!=h} Gamma(b_j - b_h - k)
//             * prod_{j<n} Gamma(1 - a_j + b_h + k)
//             / [ prod_{m<=j<q} Gamma(1 - b_j + b_h + k)
//               * prod_{n<=j<p} Gamma(a_j - b_h - k) ] * z^{b_h + k}.
// Valid when the b_h (h < m) are pairwise non-congruent mod 1 and either
// p < q, or p == q with z < 1. Terms are built directly in signed-log space;
// a denominator Gamma at a pole makes the term exactly zero, which is how
// whole pole families drop out when an a-parameter coincides with a
// denominator b-parameter.

struct SeriesOutcome {
    double value = 0.0;      // sum scaled by e^{-log_scale}
    double log_scale = 0.0;  // G = value * e^{log_scale}
    double rel_err = 0.0;
    bool converged = true;
    bool singular = false;   // numerator Gamma pole encountered: series invalid
};

SeriesOutcome residue_series(const MeijerOrder& o, double z, double rel_tol) {
    const int m = o.m, n = o.n, p = o.p(), q = o.q();
    const double ln_z = std::log(z);
    SeriesOutcome out;

    // Shared scale keeps families of wildly different magnitude summable in
    // one accumulator; grown on the fly when a term would overflow it.
    double scale = -kInf;
    for (int h = 0; h < m; ++h) scale = std::max(scale, o.b[h] * ln_z);
    if (!std::isfinite(scale)) scale = 0.0;

    double sum = 0.0, comp = 0.0;  // Kahan-compensated accumulator
    double trunc = 0.0;            // scaled bound on the neglected tails
    double max_term_log = -kInf;   // unscaled, nonzero terms only
    double max_sum_log = -kInf;    // unscaled peak of the running sum
    const double quiet_frac = std::max(rel_tol, 1e-14) * 1e-2;

    for (int h = 0; h < m; ++h) {
        const double bh = o.b[h];
        int quiet = 0;
        bool family_done = false;
        double family_abs = 0.0;  // scaled magnitude of largest term so far
        double last_small = 0.0;
        for (int k = 0; k < kMaxSeriesTerms && !family_done; ++k) {
            double log_mag = -log_gamma(double(k) + 1.0) + (bh + k) * ln_z;
            int sign = (k % 2 == 0) ? 1 : -1;
            bool zero = false;
            bool zero_persistent = false;
            for (int j = 0; j < m; ++j) {
                if (j == h) continue;
                const SignedLogGamma g = signed_log_gamma(o.b[j] - bh - k);
                if (g.sign == 0) {  // coincident-mod-1 b pair: not expandable
                    out.singular = true;
                    return out;
                }
                log_mag += g.log_abs;
                sign *= g.sign;
            }
            for (int j = 0; j < n; ++j) {
                const SignedLogGamma g = signed_log_gamma(1.0 - o.a[j] + bh + k);
                if (g.sign == 0) {  // excluded by construction; stay safe
                    out.singular = true;
                    return out;
                }
                log_mag += g.log_abs;
                sign *= g.sign;
            }
            // Denominator (1/Gamma) factors: a pole zeroes the whole term.
            for (int j = m; j < q && !zero; ++j) {
                const SignedLogGamma g = signed_log_gamma(1.0 - o.b[j] + bh + k);
                if (g.sign == 0) {
                    zero = true;  // argument grows with k: transient zero
                } else {
                    log_mag -= g.log_abs;
                    sign *= g.sign;
                }
            }
            for (int j = n; j < p && !zero; ++j) {
                const SignedLogGamma g = signed_log_gamma(o.a[j] - bh - k);
                if (g.sign == 0) {
                    zero = true;
                    zero_persistent = true;  // argument falls with k: stays at
                                             // non-positive integers forever
                } else {
                    log_mag -= g.log_abs;
                    sign *= g.sign;
                }
            }

            double term = 0.0;
            if (!zero) {
                double tsl = log_mag - scale;
                if (tsl > kRescaleLog) {
                    const double f = std::exp(scale - log_mag);
                    sum *= f;
                    comp *= f;
                    trunc *= f;
                    family_abs *= f;
                    scale = log_mag;
                    tsl = 0.0;
                }
                term = sign * std::exp(tsl);
                max_term_log = std::max(max_term_log, log_mag);
                family_abs = std::max(family_abs, std::fabs(term));
            }
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if (sum != 0.0) {
                max_sum_log =
                    std::max(max_sum_log, scale + std::log(std::fabs(sum)));
            }

            if (zero_persistent) {  // every later term of this family is zero
                family_done = true;
                break;
            }
            if (zero) continue;  // transient zero: no evidence of tail decay
            // The threshold is relative to this family's own largest term;
            // the shared accumulator can dwarf a later family whose terms
            // are still climbing, and stopping on it would orphan the
            // cross-family cancellation.
            const double small = family_abs * quiet_frac + 1e-320;
            if (std::fabs(term) <= small && k >= 8) {
                if (++quiet >= 3) {
                    last_small = small;
                    family_done = true;
                }
            } else {
                quiet = 0;
            }
        }
        if (!family_done) out.converged = false;
        trunc = std::max(trunc, 4.0 * last_small);
    }

    out.value = sum;
    out.log_scale = scale;
    const double mag = std::fabs(sum);
    if (mag > 0.0 && std::isfinite(max_term_log)) {
        // Digits lost to cancellation against the largest term or the
        // largest intermediate sum (a family can exceed its own terms and
        // then be cancelled by the next family), plus the truncation bound
        // recorded at the stopping tests.
        const double cancel = std::max(max_term_log, max_sum_log) -
                              (scale + std::log(mag));
        out.rel_err = 1e-16 * std::exp(std::clamp(cancel, 0.0, 690.0)) +
                      trunc / mag;
    } else {
        out.rel_err = 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mellin-Barnes contour. With F(s) the Gamma-ratio kernel,
//   G = (1/pi) * Int_0^inf Re[ F(sigma + it) z^{sigma+it} ] dt
// (conjugate symmetry folds the line integral onto t >= 0). The line offset
// sigma is placed near the minimum of |F z^s| on the real axis, which is the
// saddle of the exponent: there the phase is stationary at t = 0 and the
// integrand is a smooth bump instead of an oscillatory fringe.

class ContourIntegrand {
  public:
    ContourIntegrand(const MeijerOrder& o, double ln_z) : o_(o), ln_z_(ln_z) {}

    // log of F(s) z^s; individual Gamma-log branch offsets are multiples of
    // 2*pi*i and drop out of cos(Im .) below.
    std::complex<double> log_f(std::complex<double> s) const {
        std::complex<double> w = s * ln_z_;
        for (int j = 0; j < o_.m; ++j) w += log_gamma(o_.b[j] - s);
        for (int j = 0; j < o_.n; ++j) w += log_gamma(1.0 - o_.a[j] + s);
        for (int j = o_.m; j < o_.q(); ++j) w -= log_gamma(1.0 - o_.b[j] + s);
        for (int j = o_.n; j < o_.p(); ++j) w -= log_gamma(o_.a[j] - s);
        return w;
    }

    // Search objective: log-modulus slightly off axis, so zeros of 1/Gamma
    // denominators sitting on the real axis do not masquerade as minima.
    double objective(double sigma) const {
        return log_f({sigma, 0.5}).real();
    }

  private:
    const MeijerOrder& o_;
    double ln_z_;
};

struct ContourOutcome {
    double value = 0.0;      // scaled: G = value * e^{log_scale}
    double log_scale = 0.0;
    double rel_err = 0.0;
    bool converged = false;
};

ContourOutcome contour_integral(const MeijerOrder& o, double z, double rel_tol,
                                long max_nodes) {
    const double ln_z = std::log(z);
    const ContourIntegrand f(o, ln_z);

    // Admissible strip between the two pole families.
    double hi = kInf;
    for (int j = 0; j < o.m; ++j) hi = std::min(hi, o.b[j]);
    double lo = -kInf;
    for (int j = 0; j < o.n; ++j) lo = std::max(lo, o.a[j] - 1.0);

    double right, left;
    if (std::isfinite(lo)) {
        const double margin = std::min(0.05, (hi - lo) / 8.0);
        left = lo + margin;
        right = hi - margin;
    } else {
        right = hi - 0.05;
        // Unbounded below: march down with doubling steps while the
        // objective still decreases, then bracket the minimum.
        double s0 = right - 0.5;
        double v0 = f.objective(s0);
        double step = 1.0;
        for (int i = 0; i < 90; ++i) {
            const double s1 = s0 - step;
            const double v1 = f.objective(s1);
            if (v1 >= v0) break;
            s0 = s1;
            v0 = v1;
            step *= 2.0;
        }
        left = s0 - step;
    }
    if (!(left < right)) left = right - 1e-3;

    // Golden-section minimization of the off-axis log-modulus.
    const double gr = 0.61803398874989485;
    double a = left, b = right;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f.objective(x1), f2 = f.objective(x2);
    for (int i = 0; i < 90 && (b - a) > 1e-9 * (1.0 + std::fabs(a)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f.objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f.objective(x2);
        }
    }
    const double sigma = 0.5 * (a + b);

    // Scale from the on-axis peak; probe slightly off axis too in case the
    // axis value sits in a denominator-zero dip.
    const double m0 = f.log_f({sigma, 0.0}).real();
    const double m1 = f.log_f({sigma, 0.5}).real();
    const double peak = std::max(m0, m1);

    // Residual phase speed and Gaussian curvature along t size the panels.
    const double h = 1e-3;
    const std::complex<double> wp = f.log_f({sigma, h});
    const double omega = std::fabs((wp.imag() - f.log_f({sigma, 0.0}).imag()) / h);
    double curv = -2.0 * (wp.real() - m0) / (h * h);
    if (!(curv > 1e-12)) curv = 1e-2;
    const double width = std::clamp(1.0 / std::sqrt(curv), 0.5, 500.0);
    const int pq = o.p() + o.q();
    double wpanel = 2.0 * kPi / (omega + pq / 8.0 + 0.2);
    wpanel = std::max(std::min(wpanel, 4.0 * width), 1e-6);

    auto g = [&](double t) {
        const std::complex<double> w = f.log_f({sigma, t});
        double re = w.real() - peak;
        if (re > 700.0) re = 700.0;  // cannot occur at a true peak; safety
        return std::exp(re) * std::cos(w.imag());
    };

    ContourOutcome out;
    out.log_scale = peak;
    double acc = 0.0, err_sum = 0.0, abs_sum = 0.0;
    long nodes = 0;
    int quiet = 0;
    for (long k = 0; k < 4000000; ++k) {
        const double t0 = double(k) * wpanel;
        const QuadResult r = integrate_adaptive(g, t0, t0 + wpanel, 1e-12,
                                                1e-18, 4000);
        acc += r.value;
        err_sum += r.err_estimate;
        abs_sum += std::fabs(r.value);
        nodes += r.nodes_used;
        const double tol_now =
            std::max(std::fabs(acc) * rel_tol, abs_sum * 1e-17) / 8.0;
        if (k >= 16 && std::fabs(r.value) <= tol_now) {
            if (++quiet >= 6) {
                out.converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        if (nodes > max_nodes) break;
    }
    out.value = acc / kPi;
    const double mag = std::fabs(acc);
    out.rel_err =
        (mag > 0.0) ? (err_sum + 1e-16 * abs_sum) / mag : err_sum + 1e-16;
    return out;
}

// ---------------------------------------------------------------------------

MeijerResult assemble(double scaled_value, double log_scale, double rel_err,
                      unsigned flags, bool converged) {
    MeijerResult r;
    r.flags = flags;
    r.converged = converged;
    r.rel_err = rel_err;
    if (scaled_value == 0.0) {
        r.value = 0.0;
        r.log_abs = -kInf;
        r.sign = 0;
        return r;
    }
    if (!std::isfinite(scaled_value)) {
        r.value = scaled_value;
        r.log_abs = kInf;
        r.sign = scaled_value > 0 ? 1 : -1;
        r.converged = false;
        return r;
    }
    r.sign = scaled_value > 0.0 ? 1 : -1;
    r.log_abs = log_scale + std::log(std::fabs(scaled_value));
    r.value = r.sign * std::exp(r.log_abs);  // may overflow to +-inf
    return r;
}

// Average of two residue evaluations with the coincident b-parameters spread
// apart by +-eps; mirroring the spread cancels the O(eps) error.
MeijerResult perturbed_residue(const MeijerOrder& o, double z, double rel_tol,
                               unsigned flags) {
    constexpr double eps = 1e-7;
    SeriesOutcome r[2];
    for (int dir = 0; dir < 2; ++dir) {
        std::vector<double> bb = o.b;
        std::vector<bool> used(o.m, false);
        for (int i = 0; i < o.m; ++i) {
            if (used[i]) continue;
            std::vector<int> cluster{i};
            for (int j = i + 1; j < o.m; ++j) {
                if (!used[j] && std::fabs(o.b[j] - o.b[i]) <= 1e-9) {
                    cluster.push_back(j);
                    used[j] = true;
                }
            }
            const double sgn = dir == 0 ? 1.0 : -1.0;
            for (size_t c = 0; c < cluster.size(); ++c) {
                bb[cluster[c]] +=
                    sgn * (double(c) - 0.5 * double(cluster.size() - 1)) * eps;
            }
        }
        const MeijerOrder po(o.m, o.n, o.a, bb);
        r[dir] = residue_series(po, z, rel_tol);
        if (r[dir].singular || !r[dir].converged) {
            return assemble(r[dir].value, r[dir].log_scale, 1.0, flags, false);
        }
    }
    const double s = std::max(r[0].log_scale, r[1].log_scale);
    const double v0 = r[0].value * std::exp(r[0].log_scale - s);
    const double v1 = r[1].value * std::exp(r[1].log_scale - s);
    const double v = 0.5 * (v0 + v1);
    double rel = std::max(r[0].rel_err, r[1].rel_err);
    if (v != 0.0) rel += 0.5 * std::fabs(v0 - v1) / std::fabs(v);
    return assemble(v, s, rel, flags, true);
}

}  // namespace

MeijerResult meijer_g(const MeijerOrder& order, double z,
                      const EvalAccuracy& acc) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DomainError("meijer_g: argument must be finite and positive");
    }

    unsigned flags = 0;
    MeijerOrder o = order;
    // Argument inversion maps p > q (divergent-series side) onto p < q:
    // G^{m,n}_{p,q}(z | a; b) = G^{n,m}_{q,p}(1/z | 1-b; 1-a).
    if (o.p() > o.q() || (o.p() == o.q() && z > 1.0)) {
        std::vector<double> na(o.b.size()), nb(o.a.size());
        for (size_t j = 0; j < o.b.size(); ++j) na[j] = 1.0 - o.b[j];
        for (size_t j = 0; j < o.a.size(); ++j) nb[j] = 1.0 - o.a[j];
        o = MeijerOrder(o.n, o.m, std::move(na), std::move(nb));
        z = 1.0 / z;
        flags |= kMeijerInverted;
    }
    if (o.m == 0) {
        throw UnsupportedParameters(
            "meijer_g: no numerator b-parameters after normalization");
    }

    // Pairwise structure of the numerator b group decides the route: exactly
    // coincident or integer-spaced parameters have non-simple poles the
    // residue expansion cannot see, and nearly-so make it ill-conditioned.
    bool equal_pair = false, awkward_pair = false;
    for (int i = 0; i < o.m; ++i) {
        for (int j = i + 1; j < o.m; ++j) {
            const double d = o.b[i] - o.b[j];
            if (std::fabs(d) <= 1e-9) {
                equal_pair = true;
            } else if (std::fabs(d - std::round(d)) < 1e-5) {
                awkward_pair = true;
            }
        }
    }

    // Contour availability: needs a non-empty strip and integrand decay
    // along the vertical line, |F| ~ exp(-c|t|) with
    // c = (pi/2) * (2(m+n) - p - q) > 0.
    const double c_decay = 0.5 * kPi * (2.0 * (o.m + o.n) - o.p() - o.q());
    double strip_hi = kInf, strip_lo = -kInf;
    for (int j = 0; j < o.m; ++j) strip_hi = std::min(strip_hi, o.b[j]);
    for (int j = 0; j < o.n; ++j) strip_lo = std::max(strip_lo, o.a[j] - 1.0);
    const bool contour_ok = c_decay > 1e-12 && strip_lo < strip_hi;
    const bool series_ok = o.p() < o.q() || (o.p() == o.q() && z < 1.0);

    const double accept_tol = std::max(acc.rel_tol * 10.0, 1e-10);

    if (equal_pair || awkward_pair) {
        if (contour_ok) {
            const ContourOutcome c =
                contour_integral(o, z, acc.rel_tol, acc.max_nodes);
            return assemble(c.value, c.log_scale, c.rel_err,
                            flags | kMeijerContour, c.converged);
        }
        if (equal_pair && series_ok) {
            return perturbed_residue(o, z, acc.rel_tol,
                                     flags | kMeijerPerturbed);
        }
        if (!series_ok) {
            throw UnsupportedParameters(
                "meijer_g: no admissible evaluation path for this parameter "
                "set");
        }
        // Integer-spaced but not coincident, contour unavailable: fall
        // through to the plain series with its honest error estimate.
    }

    if (series_ok) {
        const SeriesOutcome s = residue_series(o, z, acc.rel_tol);
        const bool good = !s.singular && s.converged && s.rel_err <= accept_tol;
        if (good) {
            return assemble(s.value, s.log_scale, s.rel_err, flags,
                            s.converged);
        }
        if (contour_ok) {
            unsigned cflags = flags | kMeijerContour;
            if (!s.singular && s.rel_err > accept_tol) {
                cflags |= kMeijerCancellation;
            }
            const ContourOutcome c =
                contour_integral(o, z, acc.rel_tol, acc.max_nodes);
            // Keep whichever estimate is better supported.
            if (!s.singular && s.converged &&
                (!c.converged || s.rel_err < c.rel_err)) {
                return assemble(s.value, s.log_scale, s.rel_err,
                                flags | kMeijerCancellation, true);
            }
            return assemble(c.value, c.log_scale, c.rel_err, cflags,
                            c.converged);
        }
        if (s.singular) {
            throw UnsupportedParameters(
                "meijer_g: coincident-mod-1 numerator b-parameters without a "
                "usable contour");
        }
        return assemble(s.value, s.log_scale, s.rel_err, flags, s.converged);
    }

    if (!contour_ok) {
        throw UnsupportedParameters(
            "meijer_g: no admissible evaluation path for this parameter set");
    }
    const ContourOutcome c = contour_integral(o, z, acc.rel_tol, acc.max_nodes);
    return assemble(c.value, c.log_scale, c.rel_err, flags | kMeijerContour,
                    c.converged);
}

double meijer_g_value(const MeijerOrder& order, double z,
                      const EvalAccuracy& acc) {
    const MeijerResult r = meijer_g(order, z, acc);
    if (!r.converged) {
        throw NoConvergence("meijer_g: evaluation did not converge", r.value,
                            r.rel_err * std::fabs(r.value));
    }
    return r.value;
}

}  // namespace uwoc
