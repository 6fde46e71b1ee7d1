#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "uwoc/backhaul.hpp"
#include "uwoc/errors.hpp"

using namespace uwoc;

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

// Hand-computed regression values for the default configuration.
constexpr double kDelayT16 = 0.008259183095904711;  // seconds
constexpr double kPLossDefault = 0.02430651227486908;

}  // namespace

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(validate_pon(PONConfig{}));
    PONConfig bad;
    bad.eta = 0.0;
    CHECK_THROWS_AS(validate_pon(bad), DomainError);
    bad = PONConfig{};
    bad.eta = 1.2;
    CHECK_THROWS_AS(validate_pon(bad), DomainError);
    bad = PONConfig{};
    bad.t_guard = -1e-9;
    CHECK_THROWS_AS(validate_pon(bad), DomainError);
    bad = PONConfig{};
    bad.c_max = 0.0;
    CHECK_THROWS_AS(validate_pon(bad), DomainError);
}

TEST_CASE("rank-skewed demand profile") {
    const PONConfig pon;
    const auto one = zipf_demands(1, pon.alpha_zipf, pon.r_up_total,
                                  pon.overload_factor);
    REQUIRE(one.size() == 1);
    CHECK(rel_err(one[0], 1.6 * 240.0) < 1e-15);

    const auto two = zipf_demands(2, 1.0, 240.0, 1.6);
    REQUIRE(two.size() == 2);
    CHECK(rel_err(two[0], 256.0) < 1e-14);  // weight 2/3 of 384
    CHECK(rel_err(two[1], 128.0) < 1e-14);  // weight 1/3 of 384

    for (int t : {3, 7, 16}) {
        const auto d = zipf_demands(t, 1.0, 240.0, 1.6);
        const double sum = std::accumulate(d.begin(), d.end(), 0.0);
        CHECK(rel_err(sum, 384.0) < 1e-12);
        for (int i = 1; i < t; ++i) CHECK(d[i] < d[i - 1]);
    }

    // Zero skew spreads the demand evenly.
    const auto flat = zipf_demands(4, 0.0, 240.0, 1.6);
    for (double d : flat) CHECK(rel_err(d, 96.0) < 1e-14);

    CHECK_THROWS_AS(zipf_demands(0, 1.0, 240.0, 1.6), DomainError);
    CHECK_THROWS_AS(zipf_demands(4, -1.0, 240.0, 1.6), DomainError);
    CHECK_THROWS_AS(zipf_demands(4, 1.0, 0.0, 1.6), DomainError);
}

TEST_CASE("allocation caps, loss, and throughput bookkeeping") {
    const PONConfig pon;
    const double usable = pon.eta * pon.r_up_total;  // 204 Gbps

    const auto demands = zipf_demands(16, pon.alpha_zipf, pon.r_up_total,
                                      pon.overload_factor);
    const ThroughputReport rep = allocate(demands, pon);
    CHECK(rel_err(rep.overload_ratio, 384.0 / 204.0) < 1e-14);
    CHECK(rel_err(rep.p_loss, kPLossDefault) < 1e-13);
    CHECK(rel_err(rep.th_ideal, usable / 16.0) < 1e-15);

    double allocated_sum = 0.0;
    for (int i = 0; i < 16; ++i) {
        CHECK(rep.th_real[i] <= rep.allocated[i]);
        CHECK(rep.allocated[i] <=
              std::min(pon.c_max, usable / 16.0) + 1e-12);
        CHECK(rep.allocated[i] <= rep.demand[i]);
        allocated_sum += rep.allocated[i];
    }
    CHECK(allocated_sum <= usable + 1e-9);
    CHECK(rep.th_min <= rep.th_avg);
    CHECK(rep.th_avg <= rep.th_max);

    // Realistic throughput never exceeds the usable capacity at any size.
    for (int t = 2; t <= 16; ++t) {
        const auto d = zipf_demands(t, pon.alpha_zipf, pon.r_up_total,
                                    pon.overload_factor);
        const ThroughputReport r = allocate(d, pon);
        const double total =
            std::accumulate(r.th_real.begin(), r.th_real.end(), 0.0);
        CHECK(total <= usable);
        CHECK(r.p_loss >= 0.0);
        CHECK(r.p_loss <= 0.25);
        CHECK(r.th_max <= r.th_ideal + 1e-12);
    }

    // Saturation: the fair share pins at c_max through t = 13, then decays.
    for (int t = 2; t <= 13; ++t) {
        const auto d = zipf_demands(t, pon.alpha_zipf, pon.r_up_total,
                                    pon.overload_factor);
        CHECK(allocate(d, pon).th_ideal == pon.c_max);
    }
    for (int t = 14; t <= 16; ++t) {
        const auto d = zipf_demands(t, pon.alpha_zipf, pon.r_up_total,
                                    pon.overload_factor);
        CHECK(rel_err(allocate(d, pon).th_ideal, usable / t) < 1e-15);
    }

    // Zero demand: clamped overload ratio, floor loss, zero throughput.
    const ThroughputReport idle = allocate({0.0, 0.0, 0.0}, pon);
    CHECK(idle.overload_ratio == 1.0);
    CHECK(idle.p_loss == 0.005);
    CHECK(idle.th_max == 0.0);

    CHECK_THROWS_AS(allocate({}, pon), DomainError);
    CHECK_THROWS_AS(allocate({-1.0}, pon), DomainError);
}

TEST_CASE("end-to-end delay decomposition") {
    const PONConfig pon;
    CHECK(rel_err(pon.fiber_km * pon.t_prop_per_km, 0.4e-3) < 1e-15);
    CHECK(rel_err(total_delay(16, pon), kDelayT16) < 1e-13);

    double prev = 0.0;
    for (int t = 1; t <= 16; ++t) {
        const double d = total_delay(t, pon);
        CHECK(d > prev);
        prev = d;
    }

    // Noise: reproducible per seed, differing across seeds, non-negative.
    const double with_a = total_delay(16, pon, 42);
    CHECK(with_a == total_delay(16, pon, 42));
    CHECK(with_a != total_delay(16, pon, 43));
    CHECK(with_a > 0.0);
    CHECK(std::fabs(with_a - kDelayT16) < 10.0 * pon.queue_noise_std);

    CHECK_THROWS_AS(total_delay(0, pon), DomainError);
}
