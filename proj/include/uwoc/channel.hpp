#pragma once

#include <string>
#include <variant>
#include <vector>

namespace uwoc {

// ---------------------------------------------------------------------------
// Fading models

// Direct link: Gamma-distributed irradiance with shape alpha (unit mean).
struct DirectGamma {
    double alpha;
};

// Reflected link: N-element aggregate of cascaded Gamma-Gamma hops,
// moment-matched back to a single Gamma-Gamma pair (A, B).
struct CascadedGG {
    double a;
    double b;
    int n_elements;
};

// Exponential-generalized-Gamma alternative, parameters from the packaged
// measurement table; aggregated over n_elements reflectors by moment
// matching.
struct MEGG {
    double omega;   // mixture weight, in [0, 1]
    double lambda;  // exponential branch scale
    double a;       // generalized-Gamma shape
    double b;       // generalized-Gamma scale
    double c;       // generalized-Gamma exponent
    int n_elements;
};

using FadingModel = std::variant<DirectGamma, CascadedGG, MEGG>;

// Throws DomainError when a model's parameters breach its invariants.
void validate_fading(const FadingModel& model);

// ---------------------------------------------------------------------------
// Geometry, misalignment, SNR bookkeeping

struct LinkGeometry {
    double l_sr = 95.0;   // source -> reflector (m)
    double l_rd = 40.0;   // reflector -> destination (m)
    double l_d = 120.0;   // direct path (m)
    double c_att = 0.15;  // beam attenuation coefficient (1/m)
};

enum class PathKind { kDirect, kCascaded };

// Attenuation coefficient for a named water type:
// pure_sea 0.056, clear_ocean 0.151, coastal_ocean 0.305 (1/m).
double attenuation_for_water(const std::string& label);

// Beer-Lambert path loss h_l = exp(-c * L), with L the direct length or the
// summed reflected legs.
double path_loss(const LinkGeometry& geom, PathKind path);

// Zero-boresight misalignment statistics: the collected-power fraction is
// distributed as xi^2 A0^{-xi^2} h^{xi^2 - 1} on (0, A0].
struct PointingError {
    double xi_sq;  // (w_eq / 2 sigma_disp)^2
    double a0;     // power fraction at zero displacement
    double w_z;    // beam radius at the receiver plane (m)
    double w_eq;   // equivalent beam width (m)
};

// Displacement-jitter form (direct path): sigma_disp is the radial pointing
// standard deviation at the receiver plane. A non-positive jitter is
// degenerate; the result is capped at xi_sq = 1e6 with a warning on stderr.
PointingError pointing_from_displacement(double sigma_disp, double d_r,
                                         double w0, double wavelength,
                                         double length);

// Angular-jitter form (reflected path): per-leg angular deviations project
// to displacements sigma_theta*l_sr and sigma_phi*l_rd; the beam footprint
// is taken at the total propagated distance l_sr + l_rd.
PointingError pointing_from_jitter(double sigma_theta, double sigma_phi,
                                   double l_sr, double l_rd, double d_r,
                                   double w0, double wavelength);

struct SnrContext {
    double p_t_db;        // transmit power (dB)
    double sigma_n2_dbm;  // noise power (dBm)
    double gamma_bar;     // mean SNR, linear
};

SnrContext make_snr_context(double p_t_db, double sigma_n2_dbm, double h_l);

// ---------------------------------------------------------------------------
// Aggregation and densities

struct AggregateResult {
    double a;          // aggregated large-scale shape
    double b;          // aggregated small-scale shape
    double omega_bar;  // aggregate mean scale (N for unit-mean elements)
};

// i.i.d. elements: (N alpha, N beta).
AggregateResult aggregate_gg(double alpha, double beta, int n);

// Correlated elements: shapes scaled by c = N / (1 + (2/N) sum_{i<j} rho_ij).
// rho is row-major N x N, entries in [0, 1], symmetric.
AggregateResult aggregate_gg(double alpha, double beta, int n,
                             const std::vector<double>& rho);

// Gamma-Gamma irradiance density with shape pair (a, b), unit mean.
double pdf_fading_gg(double h, double a, double b);

// Instantaneous-SNR density of the direct link (Gamma turbulence shape
// alpha combined with misalignment (xi_sq, a0), mean SNR gamma_bar).
double pdf_snr_direct(double gamma, double alpha, double xi_sq, double a0,
                      double gamma_bar);

// Instantaneous-SNR density of the reflected link (aggregated Gamma-Gamma
// pair (a, b) over n elements, misalignment (xi_sq, a0)).
double pdf_snr_oris(double gamma, double a, double b, double xi_sq, double a0,
                    int n, double gamma_bar);

// ---------------------------------------------------------------------------
// mEGG aggregate SNR distribution

// Moment-matched aggregate of n_elements i.i.d. EGG variates.
struct MEGGAggregate {
    double ey;   // E[Y] of the element sum
    double var;  // Var[Y] of the element sum
    double m_u;  // matched shape
    double w_u;  // matched scale factor
};

MEGGAggregate megg_aggregate(const MEGG& model);

// k-th raw moment of a single EGG variate.
double egg_moment(const MEGG& model, int k);

// Density and distribution of the instantaneous SNR for detection order r
// (1: coherent, 2: intensity), with mu_r the corresponding mean-SNR proxy.
double megg_pdf(double gamma, const MEGG& model, int r, double mu_r);
double megg_cdf(double gamma, const MEGG& model, int r, double mu_r);

// ---------------------------------------------------------------------------
// Packaged measurement table

struct EGGRow {
    double bubble_level;     // L/min
    double temp_gradient;    // deg C / cm
    double sigma2_measured;  // measured scintillation index
    double sigma2_egg;       // scintillation index of the fitted EGG model
    double omega, lambda, a, b, c;
};

// Parse the packaged table (one row per condition, '#' comments). Throws
// ConfigError on unreadable or malformed content.
std::vector<EGGRow> load_egg_table(const std::string& path);

// Exact-match lookup on (bubble_level, temp_gradient); nullptr when absent.
const EGGRow* find_egg_row(const std::vector<EGGRow>& table,
                           double bubble_level, double temp_gradient);

MEGG megg_from_row(const EGGRow& row, int n_elements);

// $UWOC_DATA_DIR when set, otherwise "data".
std::string default_data_dir();

}  // namespace uwoc
