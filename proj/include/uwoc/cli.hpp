#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uwoc/backhaul.hpp"
#include "uwoc/channel.hpp"
#include "uwoc/metrics.hpp"
#include "uwoc/turbulence.hpp"

namespace uwoc {

inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Sweep definitions

enum class Figure {
    kOpVsSnr,
    kOpCombining,
    kOpConfigsMc,
    kBerVsSnr,
    kBerVsLength,
    kBerVsPlacement,
    kSocVsSnr,
    kDoVsSnr,
    kCapacityVsSnr,
    kSurface3d,
    kPonDelayThroughput,
    kTotalCapacitySwitching,
};

Figure figure_from_name(const std::string& name);  // throws ConfigError
std::string figure_name(Figure figure);
std::vector<std::string> figure_names();  // all twelve, declaration order

struct AxisSpec {
    double start = 0.0;
    double stop = 60.0;
    int points = 13;
    bool log_scale = false;

    std::vector<double> values() const;
};

// Normalized run parameters; every field has a documented default so an
// empty config file is a complete specification.
struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;

    // SNR bookkeeping
    double gamma_th_db = 15.0;
    double p_t_db = 20.0;
    double sigma_n2_oris_dbm = -100.0;
    double sigma_n2_direct_dbm = -95.5;

    // Geometry / water
    LinkGeometry geometry;  // l_sr 95, l_rd 40, l_d 120, c_att 0.15
    std::string water;      // named water type overrides c_att when set

    // Beam and apertures
    double wavelength = 532e-9;
    double w0 = 0.01;
    double d_r = 0.05;

    // Misalignment inputs
    double sigma_theta = 2e-3;
    double sigma_phi = 1.5e-3;
    double sigma_disp = 0.2;
    // Optional per-axis-point jitter overrides (empty = constant values
    // above; otherwise one entry per axis point).
    std::vector<double> sigma_theta_series;
    std::vector<double> sigma_phi_series;

    // Turbulence derivation
    enum class TurbMode { kFixed, kStrong, kOtops } turb_mode = TurbMode::kOtops;
    double alpha_direct_fixed = 4.0;
    double alpha_hop_fixed = 4.0;
    double beta_hop_fixed = 2.0;
    OTOPSEnv env;           // epsilon field is overridden per hop below
    double epsilon1 = 0.03;
    double epsilon2 = 0.0005;
    double omega = -2.5;    // temperature-salinity ratio (strong pipeline)

    // Reflecting surface
    int n_elements = 4;
    std::vector<int> n_list = {1, 4, 16};
    int quantizer_bits = 3;
    double sigma_phase = 0.5235987755982988;          // pi/6
    double active_gain_db = 7.0;
    double active_sigma_phase = 0.08726646259971647;  // pi/36
    double active_p_noise_dbw = -113.0;

    // Modulation / detection / MC
    std::vector<std::string> modulations = {"bpsk", "qpsk", "16qam"};
    Detection detection = Detection::kHeterodyne;
    long mc_trials = 100000;

    // Access aggregation and switching
    int u_links = 1;
    int v_links = 1;
    int t_nodes = 8;
    double c_th = 5.0;

    // Backhaul
    PONConfig pon;
    long pon_noise_seed = -1;  // < 0: deterministic delay (noise off)
};

struct SweepSpec {
    Figure figure = Figure::kOpVsSnr;
    AxisSpec axis;
    AxisSpec axis2;  // consumed by surface figures only
    RunConfig config;
    std::string normalized_json;  // full config document, defaults filled
    std::uint64_t config_hash = 0;
};

// ---------------------------------------------------------------------------
// Config file handling

// Parses JSON text (empty text = all defaults), fills defaults, normalizes
// units, and collects every violation as "path: message". Returns the spec
// when errors is empty; the normalized document is always populated.
std::optional<SweepSpec> parse_sweep(const std::string& json_text,
                                     std::vector<std::string>& errors);

// ---------------------------------------------------------------------------
// Sweep execution

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // CSV-ready cells
    std::vector<std::string> errors;             // per-point failure log
    double wall_time_s = 0.0;
    std::string csv;       // rendered table, header + rows
    std::string manifest;  // JSON run record
};

SweepResult run_sweep(const SweepSpec& spec);

// ---------------------------------------------------------------------------
// Oracle corpus

struct OracleReport {
    int total = 0;
    int failed = 0;
    std::vector<std::string> failures;
};

// Replays the packaged special-function corpus (one record per line) and
// checks every value to its recorded tolerance.
OracleReport run_oracle(const std::string& corpus_path);

// ---------------------------------------------------------------------------
// Small utilities (exposed for tests)

// Shortest decimal representation that round-trips to the same double.
std::string format_csv_value(double v);

std::uint64_t fnv1a64(const std::string& text);

// Applies the worker-count cap from the environment (UWOC_MAX_THREADS).
int resolve_threads(int requested);

}  // namespace uwoc
