#include "uwoc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "uwoc/errors.hpp"
#include "uwoc/meijerg.hpp"
#include "uwoc/quadrature.hpp"
#include "uwoc/specfun.hpp"

namespace uwoc {

namespace {

constexpr double kLnPi = 1.1447298858494002;  // ln(pi)
constexpr double kLn2 = 0.6931471805599453;   // ln(2)

// Probabilities may exit [0, 1] by a few ulp of kernel noise; anything
// larger signals a broken evaluation and must not be silently repaired.
double clamp_probability(double p, const char* what) {
    if (p >= 0.0 && p <= 1.0) return p;
    const double excess = p < 0.0 ? -p : p - 1.0;
    if (!(excess <= 1e-9)) {
        throw NoConvergence(std::string(what) +
                                ": probability escaped [0, 1] beyond noise",
                            p, excess);
    }
    std::fprintf(stderr, "uwoc: %s: clamping %.17g to [0, 1]\n", what, p);
    return p < 0.0 ? 0.0 : 1.0;
}

// sign * exp(ln_pre + ln|G|), refusing results the kernel did not certify.
double assemble(const MeijerResult& g, double ln_pre, const char* what) {
    if (!g.converged) {
        throw NoConvergence(
            std::string(what) + ": kernel did not converge",
            g.sign * std::exp(ln_pre + g.log_abs), g.rel_err);
    }
    if (g.sign == 0) return 0.0;
    return g.sign * std::exp(ln_pre + g.log_abs);
}

void validate_direct(const DirectLink& link, const char* what) {
    if (!(link.alpha > 0.0) || !(link.xi_sq > 0.0) || !(link.a0 > 0.0) ||
        !(link.a0 <= 1.0)) {
        throw DomainError(std::string(what) +
                          ": direct link needs alpha, xi_sq > 0 and a0 in "
                          "(0, 1]");
    }
}

void validate_oris(const OrisLink& link, const char* what) {
    if (!(link.a > 0.0) || !(link.b > 0.0) || !(link.xi_sq > 0.0) ||
        !(link.a0 > 0.0) || !(link.a0 <= 1.0) || link.n < 1) {
        throw DomainError(std::string(what) +
                          ": reflected link needs a, b, xi_sq > 0, a0 in "
                          "(0, 1], n >= 1");
    }
}

void require_positive(double x, const char* what, const char* name) {
    if (!(x > 0.0)) {
        throw DomainError(std::string(what) + ": " + name +
                          " must be positive");
    }
}

// Shared prefactor pieces of the direct-link transforms:
// xi^2 2^(alpha - xi^2 - 2) / (sqrt(pi) Gamma(alpha)).
double ln_direct_front(const DirectLink& l) {
    return std::log(l.xi_sq) + (l.alpha - l.xi_sq - 2.0) * kLn2 -
           0.5 * kLnPi - log_gamma(l.alpha);
}

// Reflected-link counterpart: 2^(A+B-5) A B xi^2 / (pi N Gamma(A) Gamma(B) A0).
double ln_oris_front(const OrisLink& l) {
    return (l.a + l.b - 5.0) * kLn2 + std::log(l.a) + std::log(l.b) +
           std::log(l.xi_sq) - kLnPi - std::log(double(l.n)) -
           log_gamma(l.a) - log_gamma(l.b) - std::log(l.a0);
}

std::vector<double> direct_b_row(const DirectLink& l) {
    return {(l.alpha - l.xi_sq) / 2.0, (l.alpha - l.xi_sq + 1.0) / 2.0, 0.0,
            0.5, -l.xi_sq / 2.0};
}

std::vector<double> oris_b_row(const OrisLink& l) {
    return {(l.xi_sq - 1.0) / 2.0, l.xi_sq / 2.0, (l.a - 1.0) / 2.0,
            (l.b - 1.0) / 2.0, l.a / 2.0, l.b / 2.0, -0.5};
}

}  // namespace

// ---------------------------------------------------------------------------
// Modulation and detection

ModulationSpec modulation_bfsk() { return {"BFSK", 1.0, 1.0, {0.5}}; }

ModulationSpec modulation_bpsk() { return {"BPSK", 0.5, 1.0, {1.0}}; }

namespace {
bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }
}  // namespace

ModulationSpec modulation_mqam(int m) {
    if (!power_of_two(m) || m < 4) {
        throw DomainError("modulation_mqam: order must be a power of two "
                          ">= 4");
    }
    const double md = double(m);
    const double log2m = std::log2(md);
    ModulationSpec spec;
    spec.name = std::to_string(m) + "-QAM";
    spec.p = 0.5;
    spec.delta = 4.0 / log2m * (1.0 - 1.0 / std::sqrt(md));
    const int terms = std::max(int(std::floor(std::sqrt(md) / 2.0)), 1);
    for (int k = 1; k <= terms; ++k) {
        const double odd = 2.0 * k - 1.0;
        spec.q_k.push_back(3.0 * odd * odd / (2.0 * (md - 1.0)));
    }
    return spec;
}

ModulationSpec modulation_mpsk(int m) {
    if (!power_of_two(m) || m < 2) {
        throw DomainError("modulation_mpsk: order must be a power of two "
                          ">= 2");
    }
    const double md = double(m);
    ModulationSpec spec;
    spec.name = std::to_string(m) + "-PSK";
    spec.p = 0.5;
    spec.delta = 2.0 / std::max(std::log2(md), 2.0);
    const int terms = std::max(m / 4, 1);
    for (int k = 1; k <= terms; ++k) {
        const double s = std::sin((2.0 * k - 1.0) * std::numbers::pi / md);
        spec.q_k.push_back(s * s);
    }
    return spec;
}

void validate_modulation(const ModulationSpec& mod) {
    if (!(mod.p > 0.0) || !(mod.delta > 0.0) || mod.q_k.empty()) {
        throw DomainError("modulation: p, delta must be positive and q_k "
                          "non-empty");
    }
    for (double q : mod.q_k) {
        if (!(q > 0.0)) throw DomainError("modulation: all q_k must be positive");
    }
}

double detection_tau(Detection det) {
    return det == Detection::kHeterodyne
               ? 1.0
               : std::numbers::e / (2.0 * std::numbers::pi);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
    if (!(linear > 0.0)) {
        throw DomainError("linear_to_db: value must be positive");
    }
    return 10.0 * std::log10(linear);
}

// ---------------------------------------------------------------------------
// Outage probability

double op_direct(double gamma_bar, double gamma_th, const DirectLink& link) {
    validate_direct(link, "op_direct");
    require_positive(gamma_bar, "op_direct", "gamma_bar");
    if (gamma_th < 0.0) throw DomainError("op_direct: gamma_th must be >= 0");
    if (gamma_th == 0.0) return 0.0;
    const double z = link.alpha * link.alpha * gamma_th /
                     (4.0 * link.a0 * link.a0 * gamma_bar);
    const MeijerOrder order(
        4, 1, {1.0 - link.xi_sq / 2.0, 0.5, 1.0}, direct_b_row(link));
    const MeijerResult g = meijer_g(order, z);
    const double ln_pre =
        link.xi_sq * std::log(link.alpha / (link.a0 * std::sqrt(gamma_bar))) +
        ln_direct_front(link) + 0.5 * link.xi_sq * std::log(gamma_th);
    return clamp_probability(assemble(g, ln_pre, "op_direct"), "op_direct");
}

double op_oris(double gamma_bar, double gamma_th, const OrisLink& link) {
    validate_oris(link, "op_oris");
    require_positive(gamma_bar, "op_oris", "gamma_bar");
    if (gamma_th < 0.0) throw DomainError("op_oris: gamma_th must be >= 0");
    if (gamma_th == 0.0) return 0.0;
    const double n = double(link.n);
    const double z = link.a * link.a * link.b * link.b * gamma_th /
                     (16.0 * n * n * link.a0 * link.a0 * gamma_bar);
    const MeijerOrder order(
        6, 1, {0.5, link.xi_sq / 2.0, (link.xi_sq + 1.0) / 2.0},
        oris_b_row(link));
    const MeijerResult g = meijer_g(order, z);
    const double ln_pre =
        ln_oris_front(link) + 0.5 * (std::log(gamma_th) - std::log(gamma_bar));
    return clamp_probability(assemble(g, ln_pre, "op_oris"), "op_oris");
}

double op_sc(double op_direct_val, double op_oris_val) {
    if (!(op_direct_val >= 0.0) || !(op_direct_val <= 1.0) ||
        !(op_oris_val >= 0.0) || !(op_oris_val <= 1.0)) {
        throw DomainError("op_sc: inputs must be probabilities in [0, 1]");
    }
    return op_direct_val * op_oris_val;
}

double op_mrc(double gamma_bar, double gamma_th, const DirectLink& d,
              const OrisLink& r) {
    validate_direct(d, "op_mrc");
    validate_oris(r, "op_mrc");
    require_positive(gamma_bar, "op_mrc", "gamma_bar");
    if (gamma_th < 0.0) throw DomainError("op_mrc: gamma_th must be >= 0");
    if (gamma_th == 0.0) return 0.0;
    // Pr(g_D + g_R <= g_th) = Int_0^g_th F_R(g_th - g) f_D(g) dg; the
    // substitution g = g_th t^2 absorbs the integrable g^(xi^2/2 - 1)
    // behavior of f_D at the origin.
    const auto integrand = [&](double t) {
        const double g_d = gamma_th * t * t;
        if (g_d <= 0.0) return 0.0;
        const double g_rem = gamma_th - g_d;
        if (g_rem <= 0.0) return 0.0;
        const double cdf_r = op_oris(gamma_bar, g_rem, r);
        if (cdf_r == 0.0) return 0.0;
        const double f_d =
            pdf_snr_direct(g_d, d.alpha, d.xi_sq, d.a0, gamma_bar);
        return cdf_r * f_d * 2.0 * gamma_th * t;
    };
    const double val = integrate_or_throw(integrand, 0.0, 1.0, 1e-6, 1e-300);
    return clamp_probability(val, "op_mrc");
}

double op_megg(double gamma_th, const MEGG& model, int r, double mu_r) {
    return megg_cdf(gamma_th, model, r, mu_r);
}

// ---------------------------------------------------------------------------
// Average bit error rate

double ber_direct(double gamma_bar, const DirectLink& link,
                  const ModulationSpec& mod) {
    validate_direct(link, "ber_direct");
    validate_modulation(mod);
    require_positive(gamma_bar, "ber_direct", "gamma_bar");
    const MeijerOrder order(
        4, 2,
        {1.0 - mod.p - link.xi_sq / 2.0, 1.0 - link.xi_sq / 2.0, 0.5, 1.0},
        direct_b_row(link));
    const double front = ln_direct_front(link);
    double sum = 0.0;
    for (double qk : mod.q_k) {
        const double z = link.alpha * link.alpha /
                         (4.0 * link.a0 * link.a0 * qk * gamma_bar);
        const MeijerResult g = meijer_g(order, z);
        const double ln_pre =
            front + link.xi_sq * std::log(link.alpha /
                                          (link.a0 * std::sqrt(qk * gamma_bar)));
        sum += assemble(g, ln_pre, "ber_direct");
    }
    const double ber =
        mod.delta / 2.0 * std::exp(-log_gamma(mod.p)) * sum;
    return clamp_probability(ber, "ber_direct");
}

double ber_oris(double gamma_bar, const OrisLink& link,
                const ModulationSpec& mod) {
    validate_oris(link, "ber_oris");
    validate_modulation(mod);
    require_positive(gamma_bar, "ber_oris", "gamma_bar");
    const MeijerOrder order(
        6, 2,
        {0.5, 0.5 - mod.p, link.xi_sq / 2.0, (link.xi_sq + 1.0) / 2.0},
        oris_b_row(link));
    const double n = double(link.n);
    const double front = ln_oris_front(link);
    double sum = 0.0;
    for (double qk : mod.q_k) {
        const double z = link.a * link.a * link.b * link.b /
                         (16.0 * qk * n * n * link.a0 * link.a0 * gamma_bar);
        const MeijerResult g = meijer_g(order, z);
        const double ln_pre = front - 0.5 * std::log(qk * gamma_bar);
        sum += assemble(g, ln_pre, "ber_oris");
    }
    const double ber =
        mod.delta / 2.0 * std::exp(-log_gamma(mod.p)) * sum;
    return clamp_probability(ber, "ber_oris");
}

// ---------------------------------------------------------------------------
// Ergodic capacity

double capacity_direct(double gamma_bar, const DirectLink& link,
                       Detection det) {
    validate_direct(link, "capacity_direct");
    require_positive(gamma_bar, "capacity_direct", "gamma_bar");
    const double tau = detection_tau(det);
    const double z = link.alpha * link.alpha /
                     (4.0 * link.a0 * link.a0 * tau * gamma_bar);
    std::vector<double> b = direct_b_row(link);
    b.push_back(-link.xi_sq / 2.0);  // pair with the a-row entry below
    const MeijerOrder order(
        6, 1, {-link.xi_sq / 2.0, 1.0 - link.xi_sq / 2.0, 0.5, 1.0}, b);
    const MeijerResult g = meijer_g(order, z);
    const double ln_pre =
        link.xi_sq *
            std::log(link.alpha / (link.a0 * std::sqrt(tau * gamma_bar))) +
        ln_direct_front(link) - std::log(kLn2);
    return assemble(g, ln_pre, "capacity_direct");
}

double capacity_oris(double gamma_bar, const OrisLink& link, Detection det) {
    validate_oris(link, "capacity_oris");
    require_positive(gamma_bar, "capacity_oris", "gamma_bar");
    const double tau = detection_tau(det);
    const double n = double(link.n);
    const double z = link.a * link.a * link.b * link.b /
                     (16.0 * n * n * link.a0 * link.a0 * tau * gamma_bar);
    std::vector<double> b = oris_b_row(link);
    b.push_back(-0.5);
    const MeijerOrder order(
        8, 1, {-0.5, 0.5, link.xi_sq / 2.0, (link.xi_sq + 1.0) / 2.0}, b);
    const MeijerResult g = meijer_g(order, z);
    const double ln_pre =
        ln_oris_front(link) - std::log(kLn2) - 0.5 * std::log(tau * gamma_bar);
    return assemble(g, ln_pre, "capacity_oris");
}

// ---------------------------------------------------------------------------
// Diversity diagnostics

namespace {

struct OrisKernelRatios {
    double ra;  // derivative kernel / outage kernel
    double rb;  // second-derivative kernel / outage kernel (when requested)
};

OrisKernelRatios oris_kernel_ratios(double gamma_bar, double gamma_th,
                                    const OrisLink& link, bool with_second,
                                    const char* what) {
    const double n = double(link.n);
    const double z = link.a * link.a * link.b * link.b * gamma_th /
                     (16.0 * n * n * link.a0 * link.a0 * gamma_bar);
    const std::vector<double> base_b = oris_b_row(link);
    const std::vector<double> xi_pair = {link.xi_sq / 2.0,
                                         (link.xi_sq + 1.0) / 2.0};

    std::vector<double> a_den = {0.5};
    a_den.insert(a_den.end(), xi_pair.begin(), xi_pair.end());
    const MeijerOrder den_order(6, 1, a_den, base_b);
    const MeijerResult den = meijer_g(den_order, z);
    if (!den.converged) {
        throw NoConvergence(std::string(what) + ": outage kernel did not "
                                                "converge",
                            den.value, den.rel_err);
    }
    if (den.sign == 0) {
        throw NoConvergence(std::string(what) + ": outage kernel vanished",
                            0.0, 1.0);
    }

    std::vector<double> a_num = {0.0, 0.5};
    a_num.insert(a_num.end(), xi_pair.begin(), xi_pair.end());
    std::vector<double> b_num = base_b;
    b_num.insert(b_num.end() - 1, 1.0);  // keep -1/2 as the trailing entry
    const MeijerOrder num_order(6, 2, a_num, b_num);
    const MeijerResult num = meijer_g(num_order, z);
    if (!num.converged) {
        throw NoConvergence(std::string(what) + ": derivative kernel did "
                                                "not converge",
                            num.value, num.rel_err);
    }

    OrisKernelRatios out{0.0, 0.0};
    out.ra = num.sign * den.sign * std::exp(num.log_abs - den.log_abs);
    if (!with_second) return out;

    std::vector<double> a_sec = {0.0, 0.0, 0.5};
    a_sec.insert(a_sec.end(), xi_pair.begin(), xi_pair.end());
    std::vector<double> b_sec = base_b;
    b_sec.insert(b_sec.end() - 1, 2, 1.0);
    const MeijerOrder sec_order(6, 3, a_sec, b_sec);
    const MeijerResult sec = meijer_g(sec_order, z);
    if (!sec.converged) {
        throw NoConvergence(std::string(what) + ": curvature kernel did "
                                                "not converge",
                            sec.value, sec.rel_err);
    }
    out.rb = sec.sign * den.sign * std::exp(sec.log_abs - den.log_abs);
    return out;
}

}  // namespace

double diversity_order(double gamma_bar, double gamma_th,
                       const OrisLink& link) {
    validate_oris(link, "diversity_order");
    require_positive(gamma_bar, "diversity_order", "gamma_bar");
    require_positive(gamma_th, "diversity_order", "gamma_th");
    const OrisKernelRatios k =
        oris_kernel_ratios(gamma_bar, gamma_th, link, false, "diversity_order");
    return 0.5 + k.ra;
}

double ado(double a, double b, double xi_sq) {
    if (!(a > 0.0) || !(b > 0.0) || !(xi_sq > 0.0)) {
        throw DomainError("ado: shape parameters must be positive");
    }
    return 0.5 * std::min(std::min(a, b), xi_sq);
}

double soc(double gamma_bar, double gamma_th, const OrisLink& link) {
    validate_oris(link, "soc");
    require_positive(gamma_bar, "soc", "gamma_bar");
    require_positive(gamma_th, "soc", "gamma_th");
    const OrisKernelRatios k =
        oris_kernel_ratios(gamma_bar, gamma_th, link, true, "soc");
    const double floor_exp =
        std::min(std::min(link.a, link.b), link.xi_sq);
    return 2.0 * (k.ra * k.ra - k.rb) / floor_exp;
}

// ---------------------------------------------------------------------------
// Access aggregation and link switching

double capacity_uoap(const std::vector<double>& direct_caps,
                     const std::vector<double>& oris_caps) {
    if (direct_caps.size() + oris_caps.size() > 5) {
        throw DomainError("capacity_uoap: at most 5 links per access point "
                          "(u + v <= 5)");
    }
    double sum = 0.0;
    for (const auto* list : {&direct_caps, &oris_caps}) {
        for (double c : *list) {
            if (!(c >= 0.0)) {
                throw DomainError("capacity_uoap: capacities must be "
                                  ">= 0");
            }
            sum += c;
        }
    }
    return sum;
}

double capacity_total(int t, double c_uoap, const PONConfig& pon) {
    if (t < 1) throw DomainError("capacity_total: need at least one node");
    if (!(c_uoap >= 0.0)) {
        throw DomainError("capacity_total: c_uoap must be >= 0");
    }
    if (!(pon.eta > 0.0) || !(pon.eta <= 1.0) || !(pon.r_up_total > 0.0)) {
        throw DomainError("capacity_total: pon.eta in (0,1] and "
                          "pon.r_up_total > 0 required");
    }
    return std::min(t * c_uoap, pon.eta * pon.r_up_total / t);
}

double hard_switch(double c_direct, double c_oris, double c_threshold,
                   SwitchMode mode) {
    if (mode == SwitchMode::kOptimal) return std::max(c_direct, c_oris);
    return c_direct >= c_threshold ? c_direct : c_oris;
}

}  // namespace uwoc
