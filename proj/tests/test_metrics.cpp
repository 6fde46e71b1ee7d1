#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "uwoc/channel.hpp"
#include "uwoc/errors.hpp"
#include "uwoc/metrics.hpp"

#include "golden/physics_golden.inc"

using namespace uwoc;

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

// Generic parameter packs shared with the frozen spot values.
constexpr double kGbar = 1e4;
const double kGth = std::pow(10.0, 1.5);
const DirectLink kDirect{3.2, 2.7, 0.92};
const OrisLink kOris{8.4, 7.2, 5.7, 0.95, 4};

}  // namespace

TEST_CASE("modulation factories and validation") {
    const ModulationSpec bfsk = modulation_bfsk();
    CHECK(bfsk.p == 1.0);
    CHECK(bfsk.delta == 1.0);
    REQUIRE(bfsk.order() == 1);
    CHECK(bfsk.q_k[0] == 0.5);

    const ModulationSpec bpsk = modulation_bpsk();
    CHECK(bpsk.p == 0.5);
    CHECK(bpsk.delta == 1.0);
    REQUIRE(bpsk.order() == 1);
    CHECK(bpsk.q_k[0] == 1.0);

    const ModulationSpec qam16 = modulation_mqam(16);
    CHECK(qam16.p == 0.5);
    CHECK(rel_err(qam16.delta, 0.75) < 1e-15);
    REQUIRE(qam16.order() == 2);
    CHECK(rel_err(qam16.q_k[0], 0.1) < 1e-15);
    CHECK(rel_err(qam16.q_k[1], 0.9) < 1e-15);

    const ModulationSpec qam4 = modulation_mqam(4);
    CHECK(rel_err(qam4.delta, 1.0) < 1e-15);
    REQUIRE(qam4.order() == 1);
    CHECK(rel_err(qam4.q_k[0], 0.5) < 1e-15);

    // QPSK coincides with 4-QAM; 2-PSK collapses to the BPSK row.
    const ModulationSpec qpsk = modulation_mpsk(4);
    CHECK(rel_err(qpsk.delta, 1.0) < 1e-15);
    REQUIRE(qpsk.order() == 1);
    CHECK(rel_err(qpsk.q_k[0], 0.5) < 1e-14);
    const ModulationSpec psk2 = modulation_mpsk(2);
    CHECK(rel_err(psk2.delta, 1.0) < 1e-15);
    CHECK(rel_err(psk2.q_k[0], 1.0) < 1e-14);

    const ModulationSpec psk8 = modulation_mpsk(8);
    CHECK(rel_err(psk8.delta, 2.0 / 3.0) < 1e-15);
    REQUIRE(psk8.order() == 2);
    const double s1 = std::sin(std::numbers::pi / 8.0);
    CHECK(rel_err(psk8.q_k[0], s1 * s1) < 1e-14);

    CHECK_THROWS_AS(modulation_mqam(3), DomainError);
    CHECK_THROWS_AS(modulation_mqam(2), DomainError);
    CHECK_THROWS_AS(modulation_mpsk(0), DomainError);
    CHECK_THROWS_AS(modulation_mpsk(6), DomainError);

    CHECK_NOTHROW(validate_modulation(bpsk));
    ModulationSpec bad = bpsk;
    bad.p = 0.0;
    CHECK_THROWS_AS(validate_modulation(bad), DomainError);
    bad = bpsk;
    bad.q_k.clear();
    CHECK_THROWS_AS(validate_modulation(bad), DomainError);
    bad = bpsk;
    bad.q_k.push_back(-0.1);
    CHECK_THROWS_AS(validate_modulation(bad), DomainError);
}

TEST_CASE("detection scale and dB boundary") {
    CHECK(detection_tau(Detection::kHeterodyne) == 1.0);
    CHECK(rel_err(detection_tau(Detection::kIntensity),
                  std::numbers::e / (2.0 * std::numbers::pi)) < 1e-15);

    CHECK(rel_err(db_to_linear(40.0), 1e4) < 1e-14);
    CHECK(rel_err(db_to_linear(0.0), 1.0) < 1e-15);
    CHECK(std::fabs(linear_to_db(db_to_linear(17.3)) - 17.3) < 1e-12);
    CHECK_THROWS_AS(linear_to_db(0.0), DomainError);
}

TEST_CASE("outage probability matches frozen spot values") {
    CHECK(rel_err(op_direct(kGbar, kGth, kDirect), kOpDirectSpot) < 1e-7);
    CHECK(rel_err(op_oris(kGbar, kGth, kOris), kOpOrisSpot) < 1e-7);

    // Turbulence-pipeline shapes and geometry-driven misalignment.
    const OrisLink def_oris{4.0 * kShapeHop1Default, 4.0 * kShapeHop2Default,
                            kPointXi2_Oris9540, kPointA0_Oris9540, 4};
    CHECK(rel_err(op_oris(1e3, kGth, def_oris), kOpOrisDefaultGeom) < 1e-7);
    const DirectLink def_direct{kShapeDirectDefault, kPointXi2_Direct120,
                                kPointA0_Direct120};
    CHECK(rel_err(op_direct(1e3, kGth, def_direct), kOpDirectDefaultGeom) <
          1e-7);

    CHECK(op_direct(kGbar, 0.0, kDirect) == 0.0);
    CHECK(op_direct(1e30, kGth, kDirect) < 1e-12);
    CHECK_THROWS_AS(op_direct(0.0, kGth, kDirect), DomainError);
    CHECK_THROWS_AS(op_direct(kGbar, -1.0, kDirect), DomainError);
    CHECK_THROWS_AS(op_direct(kGbar, kGth, DirectLink{0.0, 2.7, 0.92}),
                    DomainError);
    CHECK_THROWS_AS(op_oris(kGbar, kGth, OrisLink{8.4, 7.2, 5.7, 0.95, 0}),
                    DomainError);
    CHECK_THROWS_AS(op_oris(kGbar, kGth, OrisLink{8.4, 7.2, 5.7, 1.5, 4}),
                    DomainError);
}

TEST_CASE("outage decreases along an increasing SNR grid") {
    double prev_d = 2.0, prev_r = 2.0;
    for (int i = 0; i < 20; ++i) {
        const double gbar = std::pow(10.0, 1.0 + 5.0 * i / 19.0);
        const double d = op_direct(gbar, kGth, kDirect);
        const double r = op_oris(gbar, kGth, kOris);
        CHECK(d < prev_d);
        CHECK(r < prev_r);
        prev_d = d;
        prev_r = r;
    }
}

TEST_CASE("more reflecting elements never hurt") {
    // Doubling N doubles the aggregated shape pair.
    const OrisLink n8{16.8, 14.4, 5.7, 0.95, 8};
    for (double gbar : {1e2, 1e3, 1e4}) {
        CHECK(op_oris(gbar, kGth, n8) <= op_oris(gbar, kGth, kOris));
        CHECK(ber_oris(gbar, n8, modulation_bpsk()) <=
              ber_oris(gbar, kOris, modulation_bpsk()));
        CHECK(capacity_oris(gbar, n8, Detection::kHeterodyne) >=
              capacity_oris(gbar, kOris, Detection::kHeterodyne));
    }
}

TEST_CASE("combining bounds the single-branch outages") {
    CHECK(op_sc(0.0, 0.7) == 0.0);
    CHECK(op_sc(1.0, 1.0) == 1.0);
    CHECK(rel_err(op_sc(2.43e-2, 8.36e-4), 2.43e-2 * 8.36e-4) < 1e-15);
    CHECK_THROWS_AS(op_sc(-0.1, 0.5), DomainError);
    CHECK_THROWS_AS(op_sc(0.5, 1.5), DomainError);

    CHECK(op_mrc(kGbar, 0.0, kDirect, kOris) == 0.0);
    for (int i = 0; i < 10; ++i) {
        const double gbar = std::pow(10.0, 1.5 + 3.0 * i / 9.0);
        const double d = op_direct(gbar, kGth, kDirect);
        const double r = op_oris(gbar, kGth, kOris);
        const double sc = op_sc(d, r);
        const double mrc = op_mrc(gbar, kGth, kDirect, kOris);
        CHECK(mrc <= sc);
        CHECK(sc <= std::min(d, r));
        if (sc > 1e-300) CHECK(mrc > 0.0);
    }
}

TEST_CASE("bit error rate matches frozen spot values") {
    CHECK(rel_err(ber_direct(kGbar, kDirect, modulation_bpsk()),
                  kBerBpskDirectSpot) < 1e-7);
    CHECK(rel_err(ber_oris(kGbar, kOris, modulation_bpsk()),
                  kBerBpskOrisSpot) < 1e-7);
    CHECK(rel_err(ber_direct(kGbar, kDirect, modulation_bfsk()),
                  kBerBfskDirectSpot) < 1e-7);
    CHECK(rel_err(ber_direct(kGbar, kDirect, modulation_mqam(16)),
                  kBer16qamDirectSpot) < 1e-7);

    CHECK(ber_direct(1e30, kDirect, modulation_bpsk()) < 1e-12);
    CHECK_THROWS_AS(ber_direct(0.0, kDirect, modulation_bpsk()), DomainError);
}

TEST_CASE("modulation robustness ordering on an SNR grid") {
    const ModulationSpec bpsk = modulation_bpsk();
    const ModulationSpec qpsk = modulation_mpsk(4);
    const ModulationSpec qam16 = modulation_mqam(16);
    double prev = 1.0;
    for (int i = 0; i < 20; ++i) {
        const double gbar = std::pow(10.0, 1.0 + 4.0 * i / 19.0);
        const double b1 = ber_direct(gbar, kDirect, bpsk);
        const double b2 = ber_direct(gbar, kDirect, qpsk);
        const double b3 = ber_direct(gbar, kDirect, qam16);
        CHECK(b1 <= b2);
        CHECK(b2 <= b3);
        CHECK(b1 < prev);  // BER falls with SNR
        prev = b1;
    }
}

TEST_CASE("ergodic capacity matches frozen spot values") {
    CHECK(rel_err(capacity_direct(kGbar, kDirect, Detection::kHeterodyne),
                  kCapDirectSpot) < 1e-7);
    CHECK(rel_err(capacity_oris(kGbar, kOris, Detection::kHeterodyne),
                  kCapOrisSpot) < 1e-7);
    CHECK_THROWS_AS(capacity_direct(0.0, kDirect, Detection::kHeterodyne),
                    DomainError);
}

TEST_CASE("capacity grows with SNR and respects detection ordering") {
    // True mean of the SNR densities (via the Mellin transform of the
    // kernels): the concavity of log2(1 + g) bounds the ergodic capacity
    // by log2(1 + E[g]).
    const double mean_d_factor = (1.0 + 1.0 / kDirect.alpha) *
                                 kDirect.xi_sq / (kDirect.xi_sq + 2.0) *
                                 kDirect.a0 * kDirect.a0;
    const double mean_r_factor =
        kOris.xi_sq / (kOris.xi_sq + 2.0) * double(kOris.n) * kOris.n *
        kOris.a0 * kOris.a0 * (kOris.a + 1.0) * (kOris.b + 1.0) /
        (kOris.a * kOris.b);
    double prev = 0.0;
    for (double gbar : {1.0, 10.0, 100.0, 1e4, 1e6}) {
        const double hd = capacity_direct(gbar, kDirect,
                                          Detection::kHeterodyne);
        const double imdd = capacity_direct(gbar, kDirect,
                                            Detection::kIntensity);
        CHECK(hd > prev);
        CHECK(hd >= imdd);
        CHECK(imdd > 0.0);
        CHECK(hd <= std::log2(1.0 + mean_d_factor * gbar));
        prev = hd;
    }
    for (double gbar : {10.0, 1e3, 1e5}) {
        CHECK(capacity_oris(gbar, kOris, Detection::kHeterodyne) >=
              capacity_oris(gbar, kOris, Detection::kIntensity));
        CHECK(capacity_oris(gbar, kOris, Detection::kHeterodyne) <=
              std::log2(1.0 + mean_r_factor * gbar));
    }
}

TEST_CASE("diversity order and convergence speed") {
    CHECK(rel_err(diversity_order(kGbar, kGth, kOris), kDoSpot) < 1e-7);
    CHECK(rel_err(soc(kGbar, kGth, kOris), kSocSpot) < 1e-6);

    CHECK(ado(2.0, 3.0, 1.5) == 0.75);
    CHECK(ado(8.4, 7.2, 5.7) == doctest::Approx(2.85).epsilon(1e-15));
    CHECK_THROWS_AS(ado(0.0, 1.0, 1.0), DomainError);

    // Closed form against the centered finite difference of ln OP.
    const double h = 1e-3;
    const double lg = std::log(kGbar);
    const double fd = -(std::log(op_oris(std::exp(lg + h), kGth, kOris)) -
                        std::log(op_oris(std::exp(lg - h), kGth, kOris))) /
                      (2.0 * h);
    CHECK(std::fabs(diversity_order(kGbar, kGth, kOris) - fd) < 1e-4);

    // SOC against the finite difference of DO, normalized by the asymptote.
    const double ado_val = ado(kOris.a, kOris.b, kOris.xi_sq);
    const double soc_fd =
        (diversity_order(std::exp(lg + h), kGth, kOris) -
         diversity_order(std::exp(lg - h), kGth, kOris)) /
        (2.0 * h) / ado_val;
    CHECK(std::fabs(soc(kGbar, kGth, kOris) - soc_fd) < 1e-5);

    // The order settles at the asymptote and the speed dies off.
    CHECK(std::fabs(diversity_order(1e12, kGth, kOris) - ado_val) < 1e-2);
    CHECK(std::fabs(soc(1e10, kGth, kOris)) <
          std::fabs(soc(1e6, kGth, kOris)));

    CHECK_THROWS_AS(diversity_order(kGbar, 0.0, kOris), DomainError);
    CHECK_THROWS_AS(soc(kGbar, -1.0, kOris), DomainError);
}

TEST_CASE("mEGG outage delegates to the aggregate distribution") {
    const MEGG model{0.2130, 0.3291, 1.4299, 1.1817, 17.1984, 4};
    CHECK(op_megg(0.0, model, 1, 2.0) == 0.0);
    CHECK(op_megg(0.5, model, 1, 2.0) ==
          megg_cdf(0.5, model, 1, 2.0));
    // Stochastic ordering: more mean SNR, less outage.
    CHECK(op_megg(1.0, model, 2, 8.0) <= op_megg(1.0, model, 2, 4.0));
}

TEST_CASE("access aggregation and the link-count constraint") {
    CHECK(capacity_uoap({}, {}) == 0.0);
    CHECK(capacity_uoap({0.0, 0.0, 0.0}, {0.0, 0.0}) == 0.0);
    CHECK(rel_err(capacity_uoap({1.5, 2.5, 3.0}, {4.0, 5.0}), 16.0) < 1e-15);
    CHECK_NOTHROW(capacity_uoap({1.0, 1.0, 1.0}, {1.0, 1.0}));
    CHECK_THROWS_AS(capacity_uoap({1.0, 1.0, 1.0, 1.0}, {1.0, 1.0}),
                    DomainError);
    CHECK_THROWS_AS(capacity_uoap({-1.0}, {}), DomainError);
}

TEST_CASE("system capacity takes the binding constraint") {
    const PONConfig pon;  // eta 0.85, 240 Gbps upstream
    // Backhaul-limited: huge access capacity pins the result at eta*R/T.
    CHECK(rel_err(capacity_total(4, 1e9, pon), 0.85 * 240.0 / 4.0) < 1e-15);
    // Access-limited: the backhaul share is not binding.
    CHECK(rel_err(capacity_total(2, 3.0, pon), 6.0) < 1e-15);
    CHECK(capacity_total(3, 0.0, pon) == 0.0);
    CHECK_THROWS_AS(capacity_total(0, 1.0, pon), DomainError);
    PONConfig bad = pon;
    bad.eta = 1.5;
    CHECK_THROWS_AS(capacity_total(2, 1.0, bad), DomainError);
}

TEST_CASE("hard switching between the two paths") {
    CHECK(hard_switch(5.0, 3.0, 4.0, SwitchMode::kThreshold) == 5.0);
    CHECK(hard_switch(3.0, 5.0, 4.0, SwitchMode::kThreshold) == 5.0);
    CHECK(hard_switch(3.0, 1.0, 4.0, SwitchMode::kThreshold) == 1.0);
    CHECK(hard_switch(4.0, 1.0, 4.0, SwitchMode::kThreshold) == 4.0);

    const double triples[][3] = {{5.0, 3.0, 4.0}, {3.0, 5.0, 4.0},
                                 {2.0, 1.0, 3.0}, {1.0, 2.0, 0.5},
                                 {7.0, 7.0, 7.0}};
    for (const auto& t : triples) {
        CHECK(hard_switch(t[0], t[1], t[2], SwitchMode::kOptimal) >=
              hard_switch(t[0], t[1], t[2], SwitchMode::kThreshold));
    }
}

TEST_CASE("metric evaluations are bitwise deterministic") {
    CHECK(op_oris(kGbar, kGth, kOris) == op_oris(kGbar, kGth, kOris));
    CHECK(ber_direct(kGbar, kDirect, modulation_mqam(16)) ==
          ber_direct(kGbar, kDirect, modulation_mqam(16)));
    CHECK(capacity_oris(kGbar, kOris, Detection::kIntensity) ==
          capacity_oris(kGbar, kOris, Detection::kIntensity));
}
