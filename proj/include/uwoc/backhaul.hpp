#pragma once
#include <cstdint>
#include <optional>
#include <vector>

namespace uwoc {

// Upstream PON backhaul model: dynamic-bandwidth-allocation delay chain,
// rank-skewed traffic demands, capped fair-share allocation, and an
// overload-driven packet-loss factor. Rates are Gbps, times are seconds.
struct PONConfig {
    double r_up_branch = 15.0;   // per-UOAP upstream rate (Gbps)
    double r_up_total = 240.0;   // aggregate upstream capacity (Gbps)
    double fiber_km = 80.0;      // feeder length
    double t_prop_per_km = 5e-6;  // propagation delay (s/km)
    double t_fec = 0.25e-3;      // forward-error-correction latency
    double t_proc = 0.2e-3;      // fixed processing latency
    double t_base = 0.4e-3;      // DBA base cycle
    double t_report = 0.4e-6;    // per-node bandwidth report slot
    double t_grant = 0.4e-6;     // per-node grant slot
    double t_guard = 100e-9;     // per-node guard interval
    double t_service = 100e-6;   // per-node service window
    double k_proc = 0.005e-3;    // DBA processing growth coefficient
    double alpha_powerlaw = 2.5;  // loss / queue growth exponent
    double eta = 0.85;           // usable fraction of upstream capacity
    double c_max = 15.0;         // per-node allocation cap (Gbps)
    double alpha_zipf = 1.0;     // demand skew across node ranks
    double overload_factor = 1.6;  // injected demand / nominal capacity
    // Queue-delay shape constants (model defaults, overridable in config).
    double t_queue_base = 0.1e-3;    // queueing floor
    double k_load = 0.2e-3;          // load-dependent queueing coefficient
    double queue_noise_std = 0.01e-3;  // jitter std when noise is enabled
};

// Throws DomainError when a field breaches its range (all positive,
// eta in (0, 1]).
void validate_pon(const PONConfig& pon);

struct ThroughputReport {
    std::vector<double> demand;     // D_i (Gbps)
    std::vector<double> allocated;  // A_i after cap and fair share
    std::vector<double> th_real;    // A_i degraded by packet loss
    double th_ideal;                // min(eta*R/T, c_max)
    double th_min, th_max, th_avg;  // over th_real
    double overload_ratio;          // max(total demand / (eta*R), 1)
    double p_loss;                  // min(0.25, 0.005 * ratio^alpha)
};

// Rank-skewed demands: D_i = (i^-alpha / sum_j j^-alpha) * (overload * R),
// i = 1..t. Sums to overload_factor * r_up_total exactly.
std::vector<double> zipf_demands(int t, double alpha, double r_up_total,
                                 double overload_factor);

// Capped fair-share allocation with overload-driven loss.
ThroughputReport allocate(const std::vector<double>& demands,
                          const PONConfig& pon);

// End-to-end upstream delay for t nodes: DBA cycle + FEC + processing +
// queueing + propagation + loss-driven retransmission. Deterministic when
// noise_seed is absent; a seed enables the Gaussian queue jitter term.
double total_delay(int t, const PONConfig& pon,
                   std::optional<std::uint64_t> noise_seed = std::nullopt);

}  // namespace uwoc
