#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "uwoc/channel.hpp"
#include "uwoc/errors.hpp"
#include "uwoc/montecarlo.hpp"
#include "uwoc/quadrature.hpp"

using namespace uwoc;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double sample_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

double sample_se(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

SimPlan base_plan() {
    SimPlan plan;
    plan.trials = 100000;
    plan.seed = 20260817;
    plan.n_elements = 8;
    plan.alpha = 2.1;
    plan.beta = 1.8;
    plan.xi_sq = 5.7;
    plan.a0 = 0.95;
    plan.gamma_bar = 1.0;
    plan.threads = 2;
    return plan;
}

}  // namespace

TEST_CASE("counter cipher known-answer blocks") {
    const auto zero = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = philox4x32(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = philox4x32(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
        {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("stream draws are reproducible and stream-separated") {
    PhiloxStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool any_diff_stream = false, any_diff_seed = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint32_t va = a.next_u32();
        CHECK(va == b.next_u32());
        any_diff_stream = any_diff_stream || (va != c.next_u32());
        any_diff_seed = any_diff_seed || (va != d.next_u32());
    }
    CHECK(any_diff_stream);
    CHECK(any_diff_seed);

    PhiloxStream u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_unit();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    PhiloxStream g(2, 2);
    for (int i = 0; i < 1000; ++i) CHECK(std::isfinite(g.next_gaussian()));
}

TEST_CASE("gaussian and gamma draws match their moments") {
    PhiloxStream rng(99, 0);
    const long n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = rng.next_gaussian();
        sum += x;
        sum2 += x * x;
    }
    const double nd = static_cast<double>(n);
    CHECK(std::abs(sum / nd) < 3.0 / std::sqrt(nd));
    CHECK(std::abs(sum2 / nd - 1.0) < 0.02);

    // Unit-mean property, both above and below the shape-one boundary.
    for (double shape : {0.7, 1.0, 2.5, 8.0}) {
        PhiloxStream gs(123, static_cast<std::uint64_t>(shape * 100));
        std::vector<double> draws(100000);
        for (auto& v : draws) {
            v = gs.next_gamma_unit(shape);
            REQUIRE(v > 0.0);
        }
        const double m = sample_mean(draws);
        const double se = sample_se(draws);
        CHECK(std::abs(m - 1.0) < 3.5 * se);
        // Gamma(shape, 1/shape) variance is 1/shape.
        const double var = se * se * static_cast<double>(draws.size());
        CHECK(var == doctest::Approx(1.0 / shape).epsilon(0.05));
    }
    CHECK_THROWS_AS(rng.next_gamma_unit(0.0), DomainError);
    CHECK_THROWS_AS(rng.next_gamma_unit(-1.0), DomainError);
}

TEST_CASE("two-leg cascade moments and density histogram") {
    const double alpha = 2.1, beta = 1.8;
    PhiloxStream rng(2024, 5);
    const long n = 1000000;
    std::vector<double> draws(static_cast<std::size_t>(n));
    for (auto& v : draws) v = sample_cascade(alpha, beta, rng);

    const double m = sample_mean(draws);
    const double se = sample_se(draws);
    CHECK(std::abs(m - 1.0) < 3.5 * se);
    const double v_expect = 1.0 / alpha + 1.0 / beta + 1.0 / (alpha * beta);
    const double var = se * se * static_cast<double>(n);
    CHECK(var == doctest::Approx(v_expect).epsilon(0.03));

    // Bin frequencies against the analytic cascade density.
    const int n_bins = 25;
    const double lo = 0.1, width = 0.1;
    std::vector<long> counts(n_bins, 0);
    for (double x : draws) {
        const int b = static_cast<int>(std::floor((x - lo) / width));
        if (b >= 0 && b < n_bins) ++counts[static_cast<std::size_t>(b)];
    }
    int checked = 0;
    for (int b = 0; b < n_bins; ++b) {
        const double a = lo + width * b;
        const double p_exact = integrate_or_throw(
            [&](double h) { return pdf_fading_gg(h, alpha, beta); }, a,
            a + width, 1e-10, 0.0);
        if (p_exact < 0.01) continue;
        const double p_emp =
            static_cast<double>(counts[static_cast<std::size_t>(b)]) /
            static_cast<double>(n);
        // Binomial z-score per bin, plus a hard relative-deviation cap.
        const double bin_se =
            std::sqrt(p_exact * (1.0 - p_exact) / static_cast<double>(n));
        CHECK(std::abs(p_emp - p_exact) < 3.5 * bin_se);
        CHECK(std::abs(p_emp - p_exact) / p_exact < 0.04);
        ++checked;
    }
    CHECK(checked >= 15);
}

TEST_CASE("phase quantizer lands on exact grid points") {
    const int bits = 3;
    const double step = kTwoPi / 8.0;
    CHECK(quantize_phase(1.0, bits) == doctest::Approx(step).epsilon(1e-15));
    // Negative input wraps into [0, 2 pi) before snapping.
    CHECK(quantize_phase(-0.1, bits) == doctest::Approx(kTwoPi));

    PhiloxStream rng(7, 7);
    for (int i = 0; i < 300; ++i) {
        const double phi = kTwoPi * rng.next_unit();
        const double q = quantize_phase(phi, bits);
        const double k = std::round(q / step);
        CHECK(q == k * step);  // exact representable multiple
        CHECK(std::abs(q - phi) <= step / 2.0 * (1.0 + 1e-12));
    }
    for (int i = 0; i < 50; ++i) {
        const double q1 = quantize_phase(kTwoPi * rng.next_unit(), 1);
        const bool on_grid = q1 == 0.0 || q1 == kTwoPi / 2.0 || q1 == kTwoPi;
        CHECK(on_grid);
    }
    CHECK_THROWS_AS(quantize_phase(1.0, 0), DomainError);
    CHECK_THROWS_AS(quantize_phase(1.0, 31), DomainError);
    CHECK_THROWS_AS(
        quantize_phase(std::numeric_limits<double>::infinity(), 3),
        DomainError);
}

TEST_CASE("configuration labels and invariant checks") {
    CHECK(config_label(PassiveRandom{}) == "random");
    CHECK(config_label(PassiveIdeal{}) == "ideal");
    CHECK(config_label(PassiveControlled{0.1}) == "controlled");
    CHECK(config_label(ActiveControlled{7.0, 0.08, -113.0}) == "active");
    CHECK(config_label(PassiveQuantized{3}) == "quantized");

    CHECK_NOTHROW(validate_oris_config(PassiveControlled{0.0}));
    CHECK_THROWS_AS(validate_oris_config(PassiveControlled{-0.1}),
                    DomainError);
    CHECK_THROWS_AS(validate_oris_config(ActiveControlled{0.0, 0.1, -113.0}),
                    DomainError);
    CHECK_THROWS_AS(validate_oris_config(ActiveControlled{-3.0, 0.1, -113.0}),
                    DomainError);
    CHECK_THROWS_AS(validate_oris_config(ActiveControlled{7.0, -0.1, -113.0}),
                    DomainError);
    CHECK_THROWS_AS(
        validate_oris_config(ActiveControlled{7.0, 0.1, std::nan("")}),
        DomainError);
    CHECK_THROWS_AS(validate_oris_config(PassiveQuantized{0}), DomainError);
    CHECK_THROWS_AS(validate_oris_config(PassiveQuantized{31}), DomainError);

    SimPlan plan = base_plan();
    plan.trials = 0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.n_elements = 0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.alpha = -1.0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.xi_sq = 0.0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.a0 = 1.5;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.gamma_bar = 0.0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
    plan = base_plan();
    plan.threads = 0;
    CHECK_THROWS_AS(validate_plan(plan), DomainError);
}

TEST_CASE("simulated SNR is deterministic and worker-count independent") {
    SimPlan plan = base_plan();
    plan.trials = 20000;
    plan.n_elements = 4;
    plan.threads = 1;
    const OrisConfig cfg = PassiveControlled{0.3};
    const auto serial = simulate_snr(cfg, plan);
    plan.threads = 3;
    const auto parallel = simulate_snr(cfg, plan);
    REQUIRE(serial.size() == parallel.size());
    CHECK(std::equal(serial.begin(), serial.end(), parallel.begin()));

    plan.threads = 1;
    plan.seed = 1;
    const auto other = simulate_snr(cfg, plan);
    bool differs = false;
    for (std::size_t i = 0; i < other.size(); ++i) {
        differs = differs || (other[i] != serial[i]);
    }
    CHECK(differs);
    for (double g : serial) {
        CHECK(g >= 0.0);
        CHECK(std::isfinite(g));
    }
}

TEST_CASE("ideal combining reproduces the coherent-sum mean") {
    // Nearly disabled misalignment isolates the element-sum statistics.
    SimPlan plan = base_plan();
    plan.trials = 200000;
    plan.n_elements = 1;
    plan.alpha = 2.5;
    plan.beta = 2.0;
    plan.xi_sq = 1e6;
    plan.a0 = 1.0;
    plan.gamma_bar = 1.0;
    const auto single = simulate_snr(PassiveIdeal{}, plan);
    const double m1 = sample_mean(single);
    const double expect1 = (1.0 + 1.0 / plan.alpha) * (1.0 + 1.0 / plan.beta);
    CHECK(std::abs(m1 - expect1) < 3.5 * sample_se(single));

    // Full model: E[snr] = gbar * E[hp^2] * (N^2 + N * var(cascade)).
    plan.n_elements = 4;
    plan.xi_sq = 5.7;
    plan.a0 = 0.95;
    plan.gamma_bar = 100.0;
    const auto multi = simulate_snr(PassiveIdeal{}, plan);
    const double v = 1.0 / plan.alpha + 1.0 / plan.beta +
                     1.0 / (plan.alpha * plan.beta);
    const double hp2 = plan.a0 * plan.a0 * plan.xi_sq / (plan.xi_sq + 2.0);
    const double n = static_cast<double>(plan.n_elements);
    const double expect4 = plan.gamma_bar * hp2 * (n * n + n * v);
    CHECK(std::abs(sample_mean(multi) - expect4) < 3.5 * sample_se(multi));
}

TEST_CASE("mean SNR ranks the control strategies") {
    SimPlan plan = base_plan();  // N = 8, 1e5 trials
    const double m_ideal = sample_mean(simulate_snr(PassiveIdeal{}, plan));
    const double m_quant =
        sample_mean(simulate_snr(PassiveQuantized{3}, plan));
    const double m_ctrl = sample_mean(
        simulate_snr(PassiveControlled{kTwoPi / 12.0}, plan));  // pi/6
    const double m_rand = sample_mean(simulate_snr(PassiveRandom{}, plan));
    CHECK(m_ideal > m_quant);
    CHECK(m_quant > m_ctrl);
    CHECK(m_ctrl > m_rand);
    CHECK(m_rand > 0.0);
    // The coherent N^2 term should dominate the incoherent configuration.
    CHECK(m_ideal > 5.0 * m_rand);
}

TEST_CASE("active elements amplify and their noise penalizes") {
    SimPlan plan = base_plan();
    plan.trials = 50000;
    const double m_ideal = sample_mean(simulate_snr(PassiveIdeal{}, plan));

    // 7 dB amplitude gain, tight phase control, negligible injected noise:
    // the mean SNR should scale by roughly the squared amplitude gain.
    const double m_gain = sample_mean(simulate_snr(
        ActiveControlled{7.0, kTwoPi / 72.0, -113.0}, plan));
    CHECK(m_gain > 3.0 * m_ideal);
    CHECK(m_gain < 8.0 * m_ideal);

    // Strong injected noise drives the denominator 1 + N * p_noise.
    const double m_noisy = sample_mean(simulate_snr(
        ActiveControlled{0.1, 0.0, 10.0}, plan));
    CHECK(m_noisy < m_ideal / 50.0);
}

TEST_CASE("outage estimator produces calibrated intervals") {
    // Deterministic half-below stream: check the interval shrink rate.
    std::vector<double> small, large;
    for (int i = 0; i < 1000; ++i) small.push_back(i % 2 == 0 ? 0.5 : 2.0);
    for (int i = 0; i < 4000; ++i) large.push_back(i % 2 == 0 ? 0.5 : 2.0);
    const auto a = empirical_op(small, 1.0);
    const auto b = empirical_op(large, 1.0);
    CHECK(a.op_hat == doctest::Approx(0.5));
    CHECK(b.op_hat == doctest::Approx(0.5));
    CHECK(a.n_below == 500);
    const double wa = a.hi - a.lo, wb = b.hi - b.lo;
    // Quadrupling the trials should halve the interval width.
    CHECK(wa / wb == doctest::Approx(2.0).epsilon(0.1));
    CHECK(a.lo < 0.5);
    CHECK(a.hi > 0.5);

    const std::vector<double> above(100, 5.0);
    const auto none = empirical_op(above, 1.0);
    CHECK(none.op_hat == 0.0);
    CHECK(none.lo == 0.0);
    CHECK(none.hi > 0.0);
    CHECK(none.hi < 0.05);
    const auto all = empirical_op(above, 10.0);
    CHECK(all.op_hat == 1.0);
    CHECK(all.hi == 1.0);
    CHECK(all.lo < 1.0);

    CHECK_THROWS_AS(empirical_op({}, 1.0), DomainError);
    CHECK_THROWS_AS(empirical_op(above, -1.0), DomainError);
}

TEST_CASE("bit error estimator matches conditional closed forms") {
    // Binary phase keying at snr 1: erfc(1) / 2.
    const auto one = empirical_ber({1.0}, modulation_bpsk());
    CHECK(one.ber_hat ==
          doctest::Approx(0.5 * std::erfc(1.0)).epsilon(1e-12));
    CHECK(one.trials == 1);

    // Zero SNR is a coin flip for binary signalling.
    const auto zero = empirical_ber({0.0}, modulation_bpsk());
    CHECK(zero.ber_hat == doctest::Approx(0.5).epsilon(1e-14));

    // Square 16-point constellation at snr 2, against the erfc expansion.
    const auto qam = empirical_ber({2.0}, modulation_mqam(16));
    const double expect16 =
        0.375 * (std::erfc(std::sqrt(0.2)) + std::erfc(std::sqrt(1.8)));
    CHECK(qam.ber_hat == doctest::Approx(expect16).epsilon(1e-10));

    // Stream-level modulation ordening on a simulated link.
    SimPlan plan = base_plan();
    plan.trials = 5000;
    plan.n_elements = 4;
    plan.gamma_bar = 50.0;
    const auto snr = simulate_snr(PassiveIdeal{}, plan);
    const auto bpsk = empirical_ber(snr, modulation_bpsk());
    const auto qpsk = empirical_ber(snr, modulation_mpsk(4));
    const auto qam16 = empirical_ber(snr, modulation_mqam(16));
    CHECK(bpsk.ber_hat <= qpsk.ber_hat);
    CHECK(qpsk.ber_hat <= qam16.ber_hat);
    CHECK(bpsk.lo <= bpsk.ber_hat);
    CHECK(bpsk.ber_hat <= bpsk.hi);

    CHECK_THROWS_AS(empirical_ber({}, modulation_bpsk()), DomainError);
    CHECK_THROWS_AS(empirical_ber({-1.0}, modulation_bpsk()), DomainError);
}

TEST_CASE("aggregate shape pair tracks the element-sum distribution") {
    const double alpha = 2.1, beta = 1.8;
    const long trials = 100000;

    // A single cascade IS the reference law: KS at the resolution floor.
    const auto base = validate_sum_approx(alpha, beta, 1, trials, 777, 4);
    CHECK(base.ks_distance < 0.015);
    CHECK(std::abs(base.mean_emp - 1.0) < 3.5 * base.mean_se);
    CHECK(base.var_emp ==
          doctest::Approx(base.var_expected).epsilon(0.1));

    for (int n : {2, 4, 8, 16}) {
        const auto rep = validate_sum_approx(alpha, beta, n, trials, 777, 4);
        CHECK(rep.ks_distance < 0.05);
        CHECK(std::abs(rep.mean_emp - rep.mean_expected) < 3.5 * rep.mean_se);
        CHECK(rep.var_emp ==
              doctest::Approx(rep.var_expected).epsilon(0.15));
        CHECK(rep.trials == trials);
    }

    CHECK_THROWS_AS(validate_sum_approx(0.0, 1.0, 2, 1000, 1, 1),
                    DomainError);
    CHECK_THROWS_AS(validate_sum_approx(2.0, 2.0, 0, 1000, 1, 1),
                    DomainError);
    CHECK_THROWS_AS(validate_sum_approx(2.0, 2.0, 2, 1, 1, 1), DomainError);
}
