#include "uwoc/backhaul.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "uwoc/errors.hpp"

namespace uwoc {

namespace {

// Overload-driven loss: min(0.25, 0.005 * ratio^alpha), ratio >= 1.
double loss_rate(double overload_ratio, double alpha_powerlaw) {
    return std::min(0.25, 0.005 * std::pow(overload_ratio, alpha_powerlaw));
}

constexpr double kRetransUnit = 0.4e-3;  // per-loss retransmission cost (s)

}  // namespace

void validate_pon(const PONConfig& pon) {
    struct Field {
        const char* name;
        double value;
    };
    const Field positives[] = {
        {"r_up_branch", pon.r_up_branch},
        {"r_up_total", pon.r_up_total},
        {"fiber_km", pon.fiber_km},
        {"t_prop_per_km", pon.t_prop_per_km},
        {"t_fec", pon.t_fec},
        {"t_proc", pon.t_proc},
        {"t_base", pon.t_base},
        {"t_report", pon.t_report},
        {"t_grant", pon.t_grant},
        {"t_guard", pon.t_guard},
        {"t_service", pon.t_service},
        {"k_proc", pon.k_proc},
        {"alpha_powerlaw", pon.alpha_powerlaw},
        {"c_max", pon.c_max},
        {"overload_factor", pon.overload_factor},
        {"t_queue_base", pon.t_queue_base},
        {"k_load", pon.k_load},
    };
    for (const auto& f : positives) {
        if (!(f.value > 0.0)) {
            throw DomainError(std::string("pon.") + f.name +
                              " must be positive");
        }
    }
    if (!(pon.eta > 0.0 && pon.eta <= 1.0)) {
        throw DomainError("pon.eta must lie in (0, 1]");
    }
    if (!(pon.alpha_zipf >= 0.0)) {
        throw DomainError("pon.alpha_zipf must be non-negative");
    }
    if (!(pon.queue_noise_std >= 0.0)) {
        throw DomainError("pon.queue_noise_std must be non-negative");
    }
}

std::vector<double> zipf_demands(int t, double alpha, double r_up_total,
                                 double overload_factor) {
    if (t < 1) throw DomainError("zipf_demands: node count must be >= 1");
    if (!(alpha >= 0.0) || !(r_up_total > 0.0) || !(overload_factor > 0.0)) {
        throw DomainError("zipf_demands: alpha >= 0 and positive rates "
                          "required");
    }
    std::vector<double> weights(t);
    double norm = 0.0;
    for (int i = 0; i < t; ++i) {
        weights[i] = std::pow(double(i + 1), -alpha);
        norm += weights[i];
    }
    const double total = overload_factor * r_up_total;
    for (double& w : weights) w = w / norm * total;
    return weights;
}

ThroughputReport allocate(const std::vector<double>& demands,
                          const PONConfig& pon) {
    if (demands.empty()) throw DomainError("allocate: demand list is empty");
    validate_pon(pon);
    const int t = int(demands.size());
    const double usable = pon.eta * pon.r_up_total;
    const double share = std::min(usable / t, pon.c_max);

    double total_demand = 0.0;
    for (double d : demands) {
        if (!(d >= 0.0)) throw DomainError("allocate: negative demand");
        total_demand += d;
    }

    ThroughputReport rep;
    rep.demand = demands;
    rep.th_ideal = share;
    rep.overload_ratio = std::max(total_demand / usable, 1.0);
    rep.p_loss = loss_rate(rep.overload_ratio, pon.alpha_powerlaw);
    rep.allocated.resize(t);
    rep.th_real.resize(t);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (int i = 0; i < t; ++i) {
        rep.allocated[i] = std::min(demands[i], share);
        rep.th_real[i] = rep.allocated[i] * (1.0 - rep.p_loss);
        lo = std::min(lo, rep.th_real[i]);
        hi = std::max(hi, rep.th_real[i]);
        sum += rep.th_real[i];
    }
    rep.th_min = lo;
    rep.th_max = hi;
    rep.th_avg = sum / t;
    return rep;
}

double total_delay(int t, const PONConfig& pon,
                   std::optional<std::uint64_t> noise_seed) {
    if (t < 1) throw DomainError("total_delay: node count must be >= 1");
    validate_pon(pon);

    const double t_polling =
        0.5 * t * (pon.t_report + pon.t_grant + pon.t_guard + pon.t_service);
    const double t_dba = pon.t_base + t_polling +
                         pon.k_proc * std::pow(double(t), pon.alpha_powerlaw);

    // Offered load of the rank-skewed demand profile; its total is
    // overload_factor * r_up_total independent of the split across nodes.
    const double rho =
        pon.overload_factor * pon.r_up_total / (pon.eta * pon.r_up_total);
    double t_queue =
        pon.t_queue_base + pon.k_load * std::pow(rho, pon.alpha_powerlaw);
    if (noise_seed) {
        std::mt19937_64 rng(*noise_seed);
        std::normal_distribution<double> zeta(0.0, pon.queue_noise_std);
        t_queue = std::max(t_queue + zeta(rng), 0.0);
    }

    const double p_loss =
        loss_rate(std::max(rho, 1.0), pon.alpha_powerlaw);
    const double t_prop = pon.fiber_km * pon.t_prop_per_km;
    const double t_retrans = p_loss * kRetransUnit;

    return t_dba + pon.t_fec + pon.t_proc + t_queue + t_prop + t_retrans;
}

}  // namespace uwoc
