#include "uwoc/channel.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uwoc/errors.hpp"
#include "uwoc/meijerg.hpp"
#include "uwoc/specfun.hpp"
#include "uwoc/turbulence.hpp"

namespace uwoc {
namespace {

constexpr double kXi2Cap = 1e6;  // sentinel for vanishing jitter

void require(bool ok, const char* msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

void validate_fading(const FadingModel& model) {
    if (const auto* d = std::get_if<DirectGamma>(&model)) {
        require(d->alpha > 0.0, "DirectGamma: alpha must be > 0");
        return;
    }
    if (const auto* g = std::get_if<CascadedGG>(&model)) {
        require(g->a > 0.0 && g->b > 0.0,
                "CascadedGG: shape pair must be > 0");
        require(g->n_elements >= 1, "CascadedGG: n_elements must be >= 1");
        return;
    }
    const auto& e = std::get<MEGG>(model);
    require(e.omega >= 0.0 && e.omega <= 1.0, "MEGG: omega must be in [0,1]");
    require(e.lambda > 0.0 && e.a > 0.0 && e.b > 0.0 && e.c > 0.0,
            "MEGG: lambda, a, b, c must be > 0");
    require(e.n_elements >= 1, "MEGG: n_elements must be >= 1");
}

double attenuation_for_water(const std::string& label) {
    if (label == "pure_sea") return 0.056;
    if (label == "clear_ocean") return 0.151;
    if (label == "coastal_ocean") return 0.305;
    throw ConfigError("unknown water type: " + label);
}

double path_loss(const LinkGeometry& geom, PathKind path) {
    require(geom.c_att >= 0.0, "path_loss: attenuation must be >= 0");
    if (path == PathKind::kDirect) {
        require(geom.l_d > 0.0, "path_loss: direct length must be > 0");
        return std::exp(-geom.c_att * geom.l_d);
    }
    require(geom.l_sr > 0.0 && geom.l_rd > 0.0,
            "path_loss: reflected legs must be > 0");
    return std::exp(-geom.c_att * (geom.l_sr + geom.l_rd));
}

namespace {

PointingError pointing_impl(double sigma_disp, double d_r, double w0,
                            double wavelength, double length) {
    require(d_r > 0.0 && w0 > 0.0 && wavelength > 0.0 && length > 0.0,
            "pointing: aperture, waist, wavelength, length must be > 0");
    BeamGeometry beam;
    beam.wavelength = wavelength;
    beam.w0 = w0;
    beam.length = length;
    const double wz = beam.beam_radius();
    const double v = std::sqrt(3.14159265358979323846 / 2.0) * (d_r / 2.0) / wz;
    const double a0 = std::erf(v) * std::erf(v);
    const double weq2 = wz * wz * std::sqrt(3.14159265358979323846) *
                        std::erf(v) / (2.0 * v * std::exp(-v * v));
    PointingError pe;
    pe.a0 = a0;
    pe.w_z = wz;
    pe.w_eq = std::sqrt(weq2);
    if (sigma_disp <= 0.0) {
        std::fprintf(stderr,
                     "warning: pointing jitter is zero; capping xi^2 at %g\n",
                     kXi2Cap);
        pe.xi_sq = kXi2Cap;
        return pe;
    }
    pe.xi_sq = std::min(weq2 / (4.0 * sigma_disp * sigma_disp), kXi2Cap);
    return pe;
}

}  // namespace

PointingError pointing_from_displacement(double sigma_disp, double d_r,
                                         double w0, double wavelength,
                                         double length) {
    return pointing_impl(sigma_disp, d_r, w0, wavelength, length);
}

PointingError pointing_from_jitter(double sigma_theta, double sigma_phi,
                                   double l_sr, double l_rd, double d_r,
                                   double w0, double wavelength) {
    require(l_sr > 0.0 && l_rd > 0.0, "pointing: leg lengths must be > 0");
    const double sigma_disp =
        std::hypot(sigma_theta * l_sr, sigma_phi * l_rd);
    return pointing_impl(sigma_disp, d_r, w0, wavelength, l_sr + l_rd);
}

SnrContext make_snr_context(double p_t_db, double sigma_n2_dbm, double h_l) {
    require(h_l > 0.0, "snr context: path loss must be > 0");
    const double p_t = std::pow(10.0, p_t_db / 10.0);
    const double sigma_n2 = std::pow(10.0, (sigma_n2_dbm - 30.0) / 10.0);
    return {p_t_db, sigma_n2_dbm, p_t * h_l * h_l / sigma_n2};
}

AggregateResult aggregate_gg(double alpha, double beta, int n) {
    require(alpha > 0.0 && beta > 0.0, "aggregate_gg: shapes must be > 0");
    require(n >= 1, "aggregate_gg: n must be >= 1");
    return {double(n) * alpha, double(n) * beta, double(n)};
}

AggregateResult aggregate_gg(double alpha, double beta, int n,
                             const std::vector<double>& rho) {
    require(alpha > 0.0 && beta > 0.0, "aggregate_gg: shapes must be > 0");
    require(n >= 1, "aggregate_gg: n must be >= 1");
    const size_t nn = size_t(n);
    if (rho.size() != nn * nn) {
        throw DomainError("aggregate_gg: correlation matrix must be N x N");
    }
    double pair_sum = 0.0;
    for (size_t i = 0; i < nn; ++i) {
        for (size_t j = 0; j < nn; ++j) {
            const double r = rho[i * nn + j];
            if (!(r >= 0.0 && r <= 1.0)) {
                throw DomainError(
                    "aggregate_gg: correlation entries must lie in [0,1]");
            }
            if (std::fabs(r - rho[j * nn + i]) > 1e-12) {
                throw DomainError(
                    "aggregate_gg: correlation matrix must be symmetric");
            }
            if (j > i) pair_sum += r;
        }
    }
    const double c = double(n) / (1.0 + (2.0 / double(n)) * pair_sum);
    return {c * alpha, c * beta, double(n)};
}

double pdf_fading_gg(double h, double a, double b) {
    require(h > 0.0, "pdf_fading_gg: h must be > 0");
    require(a > 0.0 && b > 0.0, "pdf_fading_gg: shapes must be > 0");
    const double half_sum = 0.5 * (a + b);
    const BesselKResult kv = bessel_k_log(a - b, 2.0 * std::sqrt(a * b * h));
    const double ln = std::log(2.0) + half_sum * std::log(a * b) -
                      log_gamma(a) - log_gamma(b) +
                      (half_sum - 1.0) * std::log(h) + kv.log_value;
    return std::exp(ln);
}

double pdf_snr_direct(double gamma, double alpha, double xi_sq, double a0,
                      double gamma_bar) {
    require(gamma > 0.0, "pdf_snr_direct: gamma must be > 0");
    require(alpha > 0.0 && xi_sq > 0.0 && a0 > 0.0 && gamma_bar > 0.0,
            "pdf_snr_direct: parameters must be > 0");
    const double w = alpha / (a0 * std::sqrt(gamma_bar));
    const MeijerOrder order(2, 0, {1.0}, {0.0, alpha - xi_sq});
    const MeijerResult g = meijer_g(order, w * std::sqrt(gamma));
    if (!g.converged) {
        throw NoConvergence("pdf_snr_direct: kernel did not converge", 0.0,
                            g.rel_err);
    }
    const double ln_pre = xi_sq * std::log(w) + std::log(xi_sq) -
                          std::log(2.0) - log_gamma(alpha) +
                          (0.5 * xi_sq - 1.0) * std::log(gamma);
    return g.sign * std::exp(ln_pre + g.log_abs);
}

double pdf_snr_oris(double gamma, double a, double b, double xi_sq, double a0,
                    int n, double gamma_bar) {
    require(gamma > 0.0, "pdf_snr_oris: gamma must be > 0");
    require(a > 0.0 && b > 0.0 && xi_sq > 0.0 && a0 > 0.0 && n >= 1 &&
                gamma_bar > 0.0,
            "pdf_snr_oris: parameters must be > 0");
    const double w =
        a * b / (double(n) * a0) * std::sqrt(gamma / gamma_bar);
    const MeijerOrder order(3, 0, {xi_sq},
                            {xi_sq - 1.0, a - 1.0, b - 1.0});
    const MeijerResult g = meijer_g(order, w);
    if (!g.converged) {
        throw NoConvergence("pdf_snr_oris: kernel did not converge", 0.0,
                            g.rel_err);
    }
    const double ln_pre = std::log(a) + std::log(b) + std::log(xi_sq) -
                          std::log(2.0) - std::log(double(n)) - log_gamma(a) -
                          log_gamma(b) - std::log(a0) -
                          0.5 * std::log(gamma_bar * gamma);
    return g.sign * std::exp(ln_pre + g.log_abs);
}

double egg_moment(const MEGG& model, int k) {
    require(k >= 0, "egg_moment: k must be >= 0");
    const double kk = double(k);
    const double exp_part =
        model.omega * std::pow(model.lambda, kk) * std::exp(log_gamma(1.0 + kk));
    const double gg_part =
        (1.0 - model.omega) * std::pow(model.b, kk) *
        std::exp(log_gamma(model.a + kk / model.c) - log_gamma(model.a));
    return exp_part + gg_part;
}

MEGGAggregate megg_aggregate(const MEGG& model) {
    validate_fading(FadingModel{model});
    const double m1 = egg_moment(model, 1);
    const double m2 = egg_moment(model, 2);
    const double n = double(model.n_elements);
    MEGGAggregate agg;
    agg.ey = n * m1;
    agg.var = n * (m2 - m1 * m1);
    require(agg.var > 0.0, "megg_aggregate: zero variance is degenerate");
    agg.m_u = agg.ey * agg.ey / agg.var;
    agg.w_u = agg.var / agg.ey;
    return agg;
}

namespace {

struct MEGGKernel {
    double m_u;
    double big_xi2;  // scale multiplier on gamma^{1/r}
};

MEGGKernel megg_kernel(const MEGG& model, int r, double mu_r) {
    require(r == 1 || r == 2, "megg: detection order r must be 1 or 2");
    require(mu_r > 0.0, "megg: mu_r must be > 0");
    const MEGGAggregate agg = megg_aggregate(model);
    const double xi2 =
        agg.ey / (agg.w_u * std::pow(mu_r, 1.0 / double(r)));
    return {agg.m_u, xi2};
}

}  // namespace

double megg_pdf(double gamma, const MEGG& model, int r, double mu_r) {
    require(gamma > 0.0, "megg_pdf: gamma must be > 0");
    const MEGGKernel k = megg_kernel(model, r, mu_r);
    const double rr = double(r);
    const double ln = k.m_u * std::log(k.big_xi2) - std::log(rr) -
                      log_gamma(k.m_u) +
                      (k.m_u / rr - 1.0) * std::log(gamma) -
                      k.big_xi2 * std::pow(gamma, 1.0 / rr);
    return std::exp(ln);
}

double megg_cdf(double gamma, const MEGG& model, int r, double mu_r) {
    require(gamma >= 0.0, "megg_cdf: gamma must be >= 0");
    if (gamma == 0.0) return 0.0;
    const MEGGKernel k = megg_kernel(model, r, mu_r);
    return gamma_p(k.m_u, k.big_xi2 * std::pow(gamma, 1.0 / double(r)));
}

std::vector<EGGRow> load_egg_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table: " + path);
    std::vector<EGGRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        const size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        EGGRow row;
        if (!(ls >> row.bubble_level >> row.temp_gradient >>
              row.sigma2_measured >> row.sigma2_egg >> row.omega >>
              row.lambda >> row.a >> row.b >> row.c)) {
            throw ConfigError("malformed table row in " + path + ": " + line);
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw ConfigError("empty table: " + path);
    return rows;
}

const EGGRow* find_egg_row(const std::vector<EGGRow>& table,
                           double bubble_level, double temp_gradient) {
    for (const EGGRow& row : table) {
        if (std::fabs(row.bubble_level - bubble_level) < 1e-9 &&
            std::fabs(row.temp_gradient - temp_gradient) < 1e-9) {
            return &row;
        }
    }
    return nullptr;
}

MEGG megg_from_row(const EGGRow& row, int n_elements) {
    MEGG model{row.omega, row.lambda, row.a, row.b, row.c, n_elements};
    validate_fading(FadingModel{model});
    return model;
}

std::string default_data_dir() {
    const char* env = std::getenv("UWOC_DATA_DIR");
    return env != nullptr ? std::string(env) : std::string("data");
}

}  // namespace uwoc
