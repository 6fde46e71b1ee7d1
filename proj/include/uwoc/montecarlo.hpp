#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uwoc/metrics.hpp"

namespace uwoc {

// ---------------------------------------------------------------------------
// Counter-based random numbers

// One keyed block of the 4x32 counter cipher (10 rounds).
std::array<std::uint32_t, 4> philox4x32(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key);

// Stream view over the cipher: (seed, stream) selects a disjoint 2^64-block
// counter range, so per-trial substreams never overlap and sampling results
// cannot depend on how trials are partitioned across workers.
class PhiloxStream {
  public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream);
    std::uint32_t next_u32();
    double next_unit();      // uniform on (0, 1)
    double next_gaussian();  // standard normal (Box-Muller, cached pair)
    // Unit-mean Gamma draw: shape `shape`, scale 1/shape.
    double next_gamma_unit(double shape);

  private:
    void refill();
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Reflecting-surface configurations

// No element control: random amplitude and fully random phase.
struct PassiveRandom {};
// Perfect phase compensation at unit amplitude.
struct PassiveIdeal {};
// Phase compensation with Gaussian residual error, random amplitude.
struct PassiveControlled {
    double sigma_phase;  // residual std (rad)
};
// Amplifying elements with Gaussian residual phase error; the noise the
// amplifiers inject shows up as the SNR denominator 1 + N * p_noise.
struct ActiveControlled {
    double gain_db;        // per-element amplitude gain, > 0 dB
    double sigma_phase;    // residual std (rad)
    double p_noise_dbw;    // per-element injected noise power
};
// Phase compensation restricted to 2^bits uniformly spaced levels, random
// amplitude.
struct PassiveQuantized {
    int bits;  // >= 1
};

using OrisConfig = std::variant<PassiveRandom, PassiveIdeal,
                                PassiveControlled, ActiveControlled,
                                PassiveQuantized>;

// Short stable label for CSV output ("random", "ideal", "controlled",
// "active", "quantized").
std::string config_label(const OrisConfig& config);

// Throws DomainError on breached invariants (sigma >= 0, bits in [1, 30],
// gain_db > 0).
void validate_oris_config(const OrisConfig& config);

// Nearest representable compensation phase for a 2^bits-level quantizer;
// the result is an exact multiple of 2*pi/2^bits.
double quantize_phase(double phi, int bits);

// ---------------------------------------------------------------------------
// Simulation plan

struct SimPlan {
    long trials = 0;
    std::uint64_t seed = 0;
    int n_elements = 1;
    double alpha = 2.0;      // first-hop fading shape
    double beta = 2.0;       // second-hop fading shape
    double xi_sq = 5.7;      // misalignment exponent
    double a0 = 1.0;         // zero-displacement power fraction
    double gamma_bar = 1.0;  // mean-SNR normalization (linear)
    int threads = 1;         // worker count; results identical for any value
};

void validate_plan(const SimPlan& plan);

// Product of two independent unit-mean Gamma draws (one two-leg cascade).
double sample_cascade(double alpha, double beta, PhiloxStream& rng);

// Per-trial instantaneous SNR gamma_bar * h_p^2 * |sum_m rho_m e^{j theta_m}
// h_m|^2 (divided by the active-noise denominator where applicable). One
// misalignment draw per trial is shared by all elements. Sample i depends
// only on (seed, i).
std::vector<double> simulate_snr(const OrisConfig& config,
                                 const SimPlan& plan);

// ---------------------------------------------------------------------------
// Estimators

struct OpEstimate {
    double op_hat;
    double lo, hi;  // Wilson 95% interval
    long n_below;
    long trials;
};

// Fraction of samples at or below the threshold. Throws DomainError on an
// empty stream.
OpEstimate empirical_op(const std::vector<double>& snr_samples,
                        double gamma_th);

struct BerEstimate {
    double ber_hat;
    double lo, hi;  // normal-approximation 95% interval
    long trials;
};

// Mean conditional bit-error probability
// delta/2 * sum_k Q(p, q_k * gamma) over the sample stream, with Q the
// regularized upper incomplete gamma (for BPSK this is Q(sqrt(2 gamma))).
BerEstimate empirical_ber(const std::vector<double>& snr_samples,
                          const ModulationSpec& mod);

// ---------------------------------------------------------------------------
// Aggregation-approximation validation

struct SumApproxReport {
    double mean_emp, mean_expected;
    double var_emp, var_expected;
    double mean_se;      // empirical standard error of the mean
    double ks_distance;  // vs the moment-matched shape pair (N alpha, N beta)
    long trials;
};

// Samples Y = sum of n i.i.d. cascades and compares its moments and
// distribution against the moment-matched aggregate model.
SumApproxReport validate_sum_approx(double alpha, double beta, int n,
                                    long trials, std::uint64_t seed,
                                    int threads = 1);

}  // namespace uwoc
