#pragma once
#include <string>
#include <vector>

#include "uwoc/backhaul.hpp"
#include "uwoc/channel.hpp"

namespace uwoc {

// ---------------------------------------------------------------------------
// Modulation and detection

// Parameters of the unified average-BER expression
//   BER = delta / (2 Gamma(p)) * sum_k q_k^p Int_0^inf e^{-q_k g} g^{p-1} F(g) dg.
struct ModulationSpec {
    std::string name;
    double p = 0.0;
    double delta = 0.0;
    std::vector<double> q_k;
    int order() const { return int(q_k.size()); }
};

ModulationSpec modulation_bfsk();       // p=1,   delta=1, q={0.5}
ModulationSpec modulation_bpsk();       // p=0.5, delta=1, q={1}
ModulationSpec modulation_mqam(int m);  // square/rect QAM, m a power of two >= 4
ModulationSpec modulation_mpsk(int m);  // phase-shift keying, m a power of two >= 2

// Throws DomainError when a spec breaches its invariants (p, delta, q_k > 0,
// non-empty q_k).
void validate_modulation(const ModulationSpec& mod);

enum class Detection { kHeterodyne, kIntensity };

// Capacity SNR scale factor: 1 for heterodyne, e/(2*pi) for intensity
// modulation with direct detection.
double detection_tau(Detection det);

// dB <-> linear conversions applied once at the public (CLI) boundary; the
// library-level gamma arguments below are linear.
double db_to_linear(double db);
double linear_to_db(double linear);

// ---------------------------------------------------------------------------
// Link parameter packs

// Direct path: Gamma turbulence shape alpha with misalignment (xi_sq, a0).
struct DirectLink {
    double alpha;
    double xi_sq;
    double a0;
};

// Reflected path: aggregated Gamma-Gamma pair (a, b) over n elements with
// misalignment (xi_sq, a0). (a, b) come from aggregate_gg.
struct OrisLink {
    double a;
    double b;
    double xi_sq;
    double a0;
    int n;
};

// ---------------------------------------------------------------------------
// Outage probability Pr(gamma <= gamma_th), linear arguments

double op_direct(double gamma_bar, double gamma_th, const DirectLink& link);
double op_oris(double gamma_bar, double gamma_th, const OrisLink& link);

// Selection combining keeps the stronger branch: both must be in outage.
double op_sc(double op_direct_val, double op_oris_val);

// Maximal-ratio combining: Pr(gamma_D + gamma_R <= gamma_th), evaluated by
// adaptive quadrature of F_R(gamma_th - g) f_D(g) over [0, gamma_th] with a
// g = gamma_th t^2 substitution that absorbs the integrable endpoint power.
double op_mrc(double gamma_bar, double gamma_th, const DirectLink& d,
              const OrisLink& r);

// Outage of the mEGG aggregate channel at detection order r (1 or 2).
double op_megg(double gamma_th, const MEGG& model, int r, double mu_r);

// ---------------------------------------------------------------------------
// Average bit error rate

double ber_direct(double gamma_bar, const DirectLink& link,
                  const ModulationSpec& mod);
double ber_oris(double gamma_bar, const OrisLink& link,
                const ModulationSpec& mod);

// ---------------------------------------------------------------------------
// Ergodic capacity (bits/s/Hz)

double capacity_direct(double gamma_bar, const DirectLink& link,
                       Detection det);
double capacity_oris(double gamma_bar, const OrisLink& link, Detection det);

// ---------------------------------------------------------------------------
// Diversity diagnostics for the reflected path

// Instantaneous diversity order -d ln OP / d ln gamma_bar in closed form.
double diversity_order(double gamma_bar, double gamma_th,
                       const OrisLink& link);

// Asymptotic diversity order: half the smallest fading/misalignment exponent.
double ado(double a, double b, double xi_sq);

// Speed of convergence of the diversity order toward its asymptote
// (derivative of DO in ln gamma_bar, normalized by the ADO).
double soc(double gamma_bar, double gamma_th, const OrisLink& link);

// ---------------------------------------------------------------------------
// Access aggregation and link switching

// Sum of per-link capacities of one access point; the deployment constraint
// caps the total link count at u + v <= 5 (DomainError beyond).
double capacity_uoap(const std::vector<double>& direct_caps,
                     const std::vector<double>& oris_caps);

// System capacity for t access points: the access side t * c_uoap against
// the backhaul share eta * r_up_total / t, in the same rate unit as c_uoap.
double capacity_total(int t, double c_uoap, const PONConfig& pon);

enum class SwitchMode { kThreshold, kOptimal };

// Threshold mode keeps the direct path while its capacity clears
// c_threshold; optimal mode always takes the larger capacity.
double hard_switch(double c_direct, double c_oris, double c_threshold,
                   SwitchMode mode);

}  // namespace uwoc
