#include "uwoc/turbulence.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "uwoc/errors.hpp"
#include "uwoc/quadrature.hpp"

namespace uwoc {
namespace {

constexpr double kPi = 3.14159265358979323846;

// 10-point Gauss-Legendre rule (positive half; symmetric).
constexpr double kGl10X[5] = {0.14887433898163122, 0.4333953941292472,
                              0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
constexpr double kGl10W[5] = {0.295524224714753, 0.2692667193099965,
                              0.219086362515982, 0.14945134915058036,
                              0.06667134430868807};

template <typename F>
double gl10(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
        s += kGl10W[i] * (f(mid - half * kGl10X[i]) + f(mid + half * kGl10X[i]));
    }
    return s * half;
}

// Seawater refractive-index fit coefficients.
constexpr double kQf[10] = {1.31405,  1.779e-4, -1.05e-6, 1.6e-8, -2.02e-6,
                            15.868,   0.01155,  -0.00423, -4382.0, 1.1455e6};

}  // namespace

void OceanSpectrumParams::validate() const {
    if (!(epsilon > 0.0) || !(chi_t > 0.0) || !(nu > 0.0)) {
        throw DomainError(
            "ocean spectrum: epsilon, chi_t, nu must all be positive");
    }
    if (!(omega >= -5.0 && omega < 0.0)) {
        throw DomainError("ocean spectrum: omega must lie in [-5, 0)");
    }
}

double BeamGeometry::k() const { return 2.0 * kPi / wavelength; }

double BeamGeometry::theta0() const {
    if (f0 <= 0.0 || std::isinf(f0)) return 1.0;  // collimated launch
    return 1.0 - length / f0;
}

double BeamGeometry::lam0() const { return 2.0 * length / (k() * w0 * w0); }

double BeamGeometry::theta1() const {
    const double t0 = theta0(), l0 = lam0();
    return t0 / (t0 * t0 + l0 * l0);
}

double BeamGeometry::lam1() const {
    const double t0 = theta0(), l0 = lam0();
    return l0 / (t0 * t0 + l0 * l0);
}

double BeamGeometry::beam_radius() const {
    const double t0 = theta0(), l0 = lam0();
    return w0 * std::sqrt(t0 * t0 + l0 * l0);
}

// ---------------------------------------------------------------------------
// Plane-wave pipeline

double spectrum_phi_n_strong(double kappa, const OceanSpectrumParams& p) {
    p.validate();
    if (!(kappa > 0.0)) {
        throw DomainError("spectrum_phi_n_strong: kappa must be > 0");
    }
    const double w = p.omega;
    const double delta = 8.28 * std::pow(kappa, 4.0 / 3.0) * p.nu *
                             std::pow(p.epsilon, -1.0 / 3.0) +
                         12.978 * kappa * kappa * std::pow(p.nu, 1.5) /
                             std::sqrt(p.epsilon);
    const double bracket = w * w * std::exp(-p.a_t * delta) +
                           std::exp(-p.a_s * delta) -
                           2.0 * w * std::exp(-p.a_ts * delta);
    return 0.388e-8 * std::pow(p.epsilon, -1.0 / 3.0) *
           std::pow(kappa, -11.0 / 3.0) *
           (1.0 + 2.35 * std::pow(kappa, 2.0 / 3.0) * std::sqrt(p.nu) *
                      std::pow(p.epsilon, -1.0 / 6.0)) *
           p.chi_t / (w * w) * bracket;
}

namespace {

// Outer spectrum integrals run over u = ln kappa, but their integrands
// oscillate through the path kernels with phase proportional to kappa^2.
// A single adaptive pass over seventeen log-units aliases those
// oscillations badly enough to "converge" on the wrong value, so the outer
// range is cut at the phase multiples of pi as well: adaptive quadrature on
// the smooth head (and tail, when the oscillation is damped out before the
// spectrum cutoff), one Gauss-Legendre panel per half-oscillation between.
//
// phase(kappa) = phase_coef * kappa^2; panels span [u_head, u_tail].
template <typename F>
double integrate_outer_phase_split(const F& f_u, double u_lo, double u_hi,
                                   double phase_coef, double phase_tail,
                                   double rel_tol, double* err_out,
                                   bool* converged_out) {
    double acc = 0.0, err = 0.0;
    bool converged = true;
    const double u_head = 0.5 * std::log(kPi / phase_coef);
    if (u_head >= u_hi) {  // whole range inside the first half-oscillation
        const QuadResult r =
            integrate_adaptive(f_u, u_lo, u_hi, rel_tol, 0.0, 400000);
        *err_out = r.err_estimate;
        *converged_out = r.converged;
        return r.value;
    }
    {
        const QuadResult head =
            integrate_adaptive(f_u, u_lo, u_head, rel_tol, 0.0, 400000);
        acc += head.value;
        err += head.err_estimate;
        converged = converged && head.converged;
    }
    const double u_tail =
        (phase_tail > kPi) ? 0.5 * std::log(phase_tail / phase_coef) : u_head;
    double prev = u_head;
    for (long j = 2; prev < std::min(u_tail, u_hi); ++j) {
        const double uj = 0.5 * std::log(double(j) * kPi / phase_coef);
        if (uj >= std::min(u_tail, u_hi)) break;
        acc += gl10(f_u, prev, uj);
        prev = uj;
    }
    if (u_tail < u_hi) {
        acc += gl10(f_u, prev, u_tail);
        const QuadResult tail =
            integrate_adaptive(f_u, u_tail, u_hi, rel_tol, 0.0, 400000);
        acc += tail.value;
        err += tail.err_estimate;
        converged = converged && tail.converged;
    } else {
        acc += gl10(f_u, prev, u_hi);
    }
    *err_out = err;
    *converged_out = converged;
    return acc;
}

// Path integral of the spreading kernel, Z(kappa) =
//   int_0^L 2 sin^2( zeta (L - zeta) kappa^2 / (2 k L) ) dzeta,
// the 1 - cos(...) factor written cancellation-free. The phase peaks at
// g = kappa^2 L / (4k) mid-path; panels are cut wherever the phase crosses a
// multiple of pi so no oscillation is ever under-sampled.
double path_kernel_integral(double kappa, double length, double k_opt) {
    const double g = kappa * kappa * length / (4.0 * k_opt);
    const double rate = kappa * kappa / (k_opt * length);
    auto f = [&](double z) {
        const double phase = z * (length - z) * rate;
        const double s = std::sin(0.5 * phase);
        return 2.0 * s * s;
    };
    // Symmetric about mid-path: integrate the first half and double.
    const double half = 0.5 * length;
    double total = 0.0;
    double prev = 0.0;
    // phase(z) = j*pi  =>  z_j = (L/2) (1 - sqrt(1 - j*pi/g))
    const long jmax = (g > kPi) ? long(g / kPi) : 0;
    for (long j = 1; j <= jmax; ++j) {
        const double frac = 1.0 - double(j) * kPi / g;
        if (frac <= 0.0) break;
        const double zj = half * (1.0 - std::sqrt(frac));
        total += gl10(f, prev, zj);
        prev = zj;
    }
    total += gl10(f, prev, half);
    return 2.0 * total;
}

}  // namespace

double cn2_strong(const OceanSpectrumParams& p, double wavelength,
                  double length, double rel_tol) {
    p.validate();
    if (!(wavelength > 0.0) || !(length > 0.0)) {
        throw DomainError("cn2_strong: wavelength and length must be > 0");
    }
    const double k_opt = 2.0 * kPi / wavelength;
    // Truncate where the weakest exponential damping term reaches e^{-45}.
    const double c2 = p.a_s * 12.978 * std::pow(p.nu, 1.5) / std::sqrt(p.epsilon);
    const double kappa_max = std::sqrt(45.0 / c2);
    const double kappa_min = 1e-3;

    auto integrand_u = [&](double u) {  // u = ln kappa
        const double kappa = std::exp(u);
        return kappa * kappa * spectrum_phi_n_strong(kappa, p) *
               path_kernel_integral(kappa, length, k_opt);
    };
    // Mid-path kernel phase g = kappa^2 L / (4k); its oscillation decays
    // only algebraically, so phase panels run to the spectrum cutoff.
    const double phase_coef = length / (4.0 * k_opt);
    double err = 0.0;
    bool converged = true;
    const double value = integrate_outer_phase_split(
        integrand_u, std::log(kappa_min), std::log(kappa_max), phase_coef,
        std::numeric_limits<double>::infinity(), rel_tol / 3.0, &err,
        &converged);
    const double pref = 16.0 * kPi * kPi * std::pow(k_opt, 5.0 / 6.0) *
                        std::pow(length, -11.0 / 6.0);
    if (!converged) {
        throw NoConvergence("cn2_strong: spectrum quadrature did not converge",
                            pref * value, pref * err);
    }
    return pref * value;
}

double rytov_plane(double cn2, double k, double length) {
    if (!(cn2 >= 0.0) || !(k > 0.0) || !(length > 0.0)) {
        throw DomainError("rytov_plane: requires cn2 >= 0, k > 0, length > 0");
    }
    return 1.23 * cn2 * std::pow(k, 7.0 / 6.0) * std::pow(length, 11.0 / 6.0);
}

GGShape gg_from_rytov(double sigma_l1_sq, double sigma_l2_sq) {
    if (!(sigma_l1_sq > 0.0) || !(sigma_l2_sq > 0.0)) {
        throw DomainError("gg_from_rytov: degenerate-no-turbulence");
    }
    const double s1 = sigma_l1_sq, s2 = sigma_l2_sq;
    const double alpha =
        1.0 / std::expm1(0.17 * s1 /
                         std::pow(1.0 + 0.167 * std::pow(s1, 1.2), 7.0 / 6.0));
    const double beta =
        1.0 / std::expm1(0.225 * s2 /
                         std::pow(1.0 + 0.259 * std::pow(s2, 1.2), 5.0 / 6.0));
    return {alpha, beta};
}

// ---------------------------------------------------------------------------
// OTOPS pipeline

double quan_fry_index(double t_c, double s, double lambda_nm) {
    if (t_c < 0.0 || t_c > 30.0 || s < 0.0 || s > 40.0) {
        std::fprintf(stderr,
                     "warning: quan_fry_index outside fit range "
                     "(T=%g degC, S=%g g/kg)\n",
                     t_c, s);
    }
    const double* a = kQf;
    return a[0] + (a[1] + a[2] * t_c + a[3] * t_c * t_c) * s +
           a[4] * t_c * t_c + (a[5] + a[6] * s + a[7] * t_c) / lambda_nm +
           a[8] / (lambda_nm * lambda_nm) +
           a[9] / (lambda_nm * lambda_nm * lambda_nm);
}

ThermalSalinity thermal_salinity_coeffs(const OTOPSEnv& env, double lambda_nm) {
    const double* c = kQf;
    const double t = env.t_mean, s = env.s_a;
    return {c[2] * s + 2.0 * c[3] * t * s + 2.0 * c[4] * t + c[7] / lambda_nm,
            c[1] + c[2] * t + c[3] * t * t + c[6] / lambda_nm};
}

double eddy_diffusivity_ratio(double r_p) {
    if (!(r_p > 0.0)) {
        throw DomainError("eddy_diffusivity_ratio: requires r_p > 0");
    }
    if (r_p >= 1.0) return r_p + std::sqrt(r_p) * std::sqrt(r_p - 1.0);
    if (r_p >= 0.5) return 1.85 * r_p - 0.85;
    return 0.15 * r_p;
}

OTOPSDerived otops_derived(const OTOPSEnv& env, double lambda_nm) {
    if (env.h == 0.0) {
        throw DomainError(
            "otops: gradient ratio h = 0 leaves chi_s, chi_ts undefined");
    }
    const ThermalSalinity ts = thermal_salinity_coeffs(env, lambda_nm);
    OTOPSDerived d;
    d.a = ts.a;
    d.b = ts.b;
    d.r_p = std::fabs(env.h) * env.alpha_t / env.beta_s;
    d.d_r = eddy_diffusivity_ratio(d.r_p);
    d.chi_s = d.d_r * env.chi_t / (env.h * env.h);
    d.chi_ts = 0.5 * (1.0 + d.d_r) * env.chi_t / env.h;
    d.eta = std::pow(env.nu * env.nu * env.nu / env.epsilon, 0.25);
    return d;
}

namespace {

struct OTOPSCs {
    double c_t, c_s, c_ts;
};

OTOPSCs otops_cs(const OTOPSEnv& env) {
    const double base = std::pow(0.072, 4.0 / 3.0) * env.beta0;
    return {base / env.pr, base / env.sc,
            base * (env.pr + env.sc) / (2.0 * env.pr * env.sc)};
}

// One chi-normalized spectrum template (multiply by the matching chi_i).
double otops_part(double kappa, double eta, double c, double beta0,
                  double epsilon) {
    const double ke = kappa * eta;
    const double damp = std::exp(-174.9 * ke * ke * std::pow(c, 0.96));
    const double bracket = 1.0 +
                           21.61 * std::pow(ke, 0.61) * std::pow(c, 0.02) -
                           18.18 * std::pow(ke, 0.55) * std::pow(c, 0.04);
    return beta0 * std::pow(epsilon, -1.0 / 3.0) *
           std::pow(kappa, -11.0 / 3.0) / (4.0 * kPi) * damp * bracket;
}

}  // namespace

double otops_spectrum(double kappa, const OTOPSEnv& env, double lambda_nm) {
    if (!(kappa > 0.0)) {
        throw DomainError("otops_spectrum: kappa must be > 0");
    }
    const OTOPSDerived d = otops_derived(env, lambda_nm);
    const OTOPSCs cs = otops_cs(env);
    const double pt = otops_part(kappa, d.eta, cs.c_t, env.beta0, env.epsilon);
    const double ps = otops_part(kappa, d.eta, cs.c_s, env.beta0, env.epsilon);
    const double pts =
        otops_part(kappa, d.eta, cs.c_ts, env.beta0, env.epsilon);
    return d.a * d.a * pt * env.chi_t + d.b * d.b * ps * d.chi_s +
           2.0 * d.a * d.b * pts * d.chi_ts;
}

namespace {

// Transverse integral of the beam kernel,
//   I(q) = int_0^1 exp(-lam1 q xi^2) 2 sin^2( q xi (1 - cbar xi) / 2 ) dxi,
// q = L kappa^2 / k, cbar = 1 - theta1. Panels cut at phase multiples of pi,
// truncated where the Gaussian damping factor is below e^{-40}.
double beam_kernel_integral(double q, double lam1, double cbar) {
    const double p = lam1 * q;
    auto f = [&](double xi) {
        const double s = std::sin(0.5 * q * xi * (1.0 - cbar * xi));
        return std::exp(-p * xi * xi) * 2.0 * s * s;
    };
    double xi_end = 1.0;
    if (p > 40.0) xi_end = std::min(1.0, std::sqrt(40.0 / p));
    double total = 0.0, prev = 0.0;
    // phase = j*pi  =>  q xi - q cbar xi^2 = j*pi, stable root form. This is
    // the ascending branch; cbar <= 1/2 keeps the phase monotone on [0, 1].
    long j_top = 0;
    for (long j = 1;; ++j) {
        const double disc = 1.0 - 4.0 * double(j) * kPi * cbar / q;
        if (disc < 0.0) break;
        const double xj =
            2.0 * double(j) * kPi / (q * (1.0 + std::sqrt(disc)));
        if (xj >= xi_end) break;
        total += gl10(f, prev, xj);
        prev = xj;
        j_top = j;
    }
    if (cbar > 0.5) {
        // Interior stationary point xi* = 1/(2 cbar): the phase descends
        // past it, re-crossing the same multiples of pi.
        const double xi_star = 0.5 / cbar;
        if (xi_star > prev && xi_star < xi_end) {
            total += gl10(f, prev, xi_star);
            prev = xi_star;
            for (long j = j_top; j >= 1; --j) {
                const double disc = 1.0 - 4.0 * double(j) * kPi * cbar / q;
                const double xj = (1.0 + std::sqrt(disc)) / (2.0 * cbar);
                if (xj <= prev) continue;
                if (xj >= xi_end) break;
                total += gl10(f, prev, xj);
                prev = xj;
            }
        }
    }
    total += gl10(f, prev, xi_end);
    return total;
}

}  // namespace

double rytov_gaussian(const OTOPSEnv& env, const BeamGeometry& beam,
                      double rel_tol) {
    if (!(beam.length > 0.0)) {
        throw DomainError("rytov_gaussian: beam length must be > 0");
    }
    const double lambda_nm = beam.wavelength * 1e9;
    const OTOPSDerived d = otops_derived(env, lambda_nm);
    const OTOPSCs cs = otops_cs(env);
    const double k_opt = beam.k();
    const double lam1 = beam.lam1();
    const double cbar = 1.0 - beam.theta1();

    const double c_min = std::min(cs.c_t, std::min(cs.c_s, cs.c_ts));
    const double kappa_max =
        std::sqrt(45.0 / (174.9 * std::pow(c_min, 0.96))) / d.eta;
    const double kappa_min = 1e-3;

    auto integrand_u = [&](double u) {  // u = ln kappa
        const double kappa = std::exp(u);
        const double q = beam.length * kappa * kappa / k_opt;
        return kappa * kappa * otops_spectrum(kappa, env, lambda_nm) *
               beam_kernel_integral(q, lam1, cbar);
    };
    // The kernel oscillates through its xi = 1 endpoint with phase
    // q (1 - cbar) (stationary-phase scale 1/(4 cbar) when an interior
    // stationary point exists), damped by exp(-lam1 q); beyond
    // lam1 q ~ 45 the integrand is smooth again.
    double phase_scale = std::fabs(1.0 - cbar);
    if (cbar > 0.5) phase_scale = std::max(phase_scale, 0.25 / cbar);
    const double phase_coef = phase_scale * beam.length / k_opt;
    const double phase_tail =
        (lam1 > 0.0) ? 45.0 * phase_scale / lam1
                     : std::numeric_limits<double>::infinity();
    double err = 0.0;
    bool converged = true;
    const double value = integrate_outer_phase_split(
        integrand_u, std::log(kappa_min), std::log(kappa_max), phase_coef,
        phase_tail, rel_tol / 3.0, &err, &converged);
    const double pref = 8.0 * kPi * kPi * k_opt * k_opt * beam.length;
    if (!converged) {
        throw NoConvergence(
            "rytov_gaussian: spectrum quadrature did not converge",
            pref * value, pref * err);
    }
    return pref * value;
}

GGShape gg_from_log_variances(double sigma_lnx_sq, double sigma_lny_sq) {
    if (!(sigma_lnx_sq > 0.0) || !(sigma_lny_sq > 0.0)) {
        throw DomainError("gg_from_log_variances: degenerate-no-turbulence");
    }
    return {1.0 / std::expm1(sigma_lnx_sq), 1.0 / std::expm1(sigma_lny_sq)};
}

GGShape gg_from_otops(double sigma_b2, double theta1) {
    if (!(sigma_b2 > 0.0)) {
        throw DomainError("gg_from_otops: degenerate-no-turbulence");
    }
    const double s65 = std::pow(sigma_b2, 1.2);
    const double slnx =
        0.49 * sigma_b2 /
        std::pow(1.0 + 0.56 * (1.0 + theta1) * s65, 7.0 / 6.0);
    const double slny = 0.51 * sigma_b2 / std::pow(1.0 + 0.69 * s65, 5.0 / 6.0);
    return gg_from_log_variances(slnx, slny);
}

}  // namespace uwoc
