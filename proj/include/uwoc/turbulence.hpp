#pragma once

namespace uwoc {

// Ocean turbulence spectrum inputs for the plane-wave (moderate-to-strong)
// pipeline: dissipation rates, temperature-salinity balance, viscosity, and
// the three spectrum constants.
struct OceanSpectrumParams {
    double epsilon = 0.03;   // kinetic-energy dissipation rate (m^2 s^-3)
    double chi_t = 1e-5;     // mean-square temperature dissipation (K^2 s^-1)
    double omega = -2.5;     // temperature-salinity ratio parameter, [-5, 0)
    double nu = 7.5e-5;      // kinematic viscosity (m^2 s^-1)
    double a_t = 0.01863;    // spectrum constants
    double a_s = 1.9e-4;
    double a_ts = 9.41e-3;

    void validate() const;  // throws DomainError on invariant breach
};

// Environment for the oceanic-turbulence optical power spectrum (OTOPS)
// pipeline. The thermodynamic coefficients alpha_t / beta_s are plain inputs
// with typical-seawater defaults; they enter only through the density ratio.
struct OTOPSEnv {
    double t_mean = 20.0;     // mean temperature (deg C)
    double s_a = 30.0;        // absolute salinity (g/kg)
    double pressure = 0.0;    // sea pressure (dbar); carried, not consumed
    double h = -0.2;          // temperature-salinity gradient ratio
    double alpha_t = 2.42e-4; // thermal expansion coefficient (1/K)
    double beta_s = 7.44e-4;  // haline contraction coefficient (kg/g)
    double pr = 7.0;          // Prandtl number
    double sc = 700.0;        // Schmidt number
    double beta0 = 0.72;      // empirical spectrum constant
    double epsilon = 0.03;    // dissipation rate (m^2 s^-3)
    double chi_t = 1e-5;      // temperature dissipation (K^2 s^-1)
    double nu = 7.5e-5;       // kinematic viscosity (m^2 s^-1)
};

// Gaussian-beam geometry; all derived quantities are recomputed on demand so
// they can never go stale against the stored fields. f0 = +infinity means a
// collimated launch.
struct BeamGeometry {
    double wavelength = 532e-9;  // (m)
    double w0 = 0.01;            // launch beam waist (m)
    double f0 = 0.0;             // phase-front radius (m); <=0 or inf => collimated
    double length = 0.0;         // path length (m)

    double k() const;        // optical wavenumber 2*pi/wavelength
    double theta0() const;   // 1 - L/F0
    double lam0() const;     // 2L / (k W0^2)
    double theta1() const;   // Theta0 / (Theta0^2 + Lam0^2)
    double lam1() const;     // Lam0 / (Theta0^2 + Lam0^2)
    double beam_radius() const;  // w(L) = W0 sqrt(Theta0^2 + Lam0^2)
};

// Gamma-Gamma fading shape pair (large-scale alpha, small-scale beta).
struct GGShape {
    double alpha;
    double beta;
};

// Derived OTOPS quantities shared by the spectrum and its tests.
struct OTOPSDerived {
    double a;       // thermal refractive coefficient dn/dT
    double b;       // haline refractive coefficient dn/dS
    double r_p;     // density ratio |H| alpha_t / beta_s
    double d_r;     // eddy diffusivity ratio
    double chi_s;   // salinity dissipation rate
    double chi_ts;  // coupled dissipation rate
    double eta;     // Kolmogorov microscale (nu^3/epsilon)^{1/4}
};

// Plane-wave oceanic spectrum with inner-scale damping. kappa must be > 0.
double spectrum_phi_n_strong(double kappa, const OceanSpectrumParams& p);

// Refractive-index structure parameter via the path/wavenumber double
// integral of the spectrum against the spherical-spreading kernel.
double cn2_strong(const OceanSpectrumParams& p, double wavelength,
                  double length, double rel_tol = 1e-6);

// Plane-wave (log-amplitude) scintillation variance from Cn2.
double rytov_plane(double cn2, double k, double length);

// Shape parameters from per-path plane-wave variances. A zero variance is a
// degenerate no-turbulence input and is rejected.
GGShape gg_from_rytov(double sigma_l1_sq, double sigma_l2_sq);

// Seawater refractive index polynomial fit (temperature deg C, salinity
// g/kg, wavelength nm). Inputs outside the fit region warn on stderr.
double quan_fry_index(double t_c, double s, double lambda_nm);

// Partial derivatives of the index fit: a = dn/dT, b = dn/dS.
struct ThermalSalinity {
    double a;
    double b;
};
ThermalSalinity thermal_salinity_coeffs(const OTOPSEnv& env, double lambda_nm);

// Piecewise eddy diffusivity ratio in the density ratio r_p > 0.
double eddy_diffusivity_ratio(double r_p);

// Internal OTOPS quantities for env at the given wavelength (nm). Requires
// h != 0 (the salinity dissipation scales with 1/h^2).
OTOPSDerived otops_derived(const OTOPSEnv& env, double lambda_nm);

// Composite OTOPS refractive-index spectrum at spatial wavenumber kappa.
double otops_spectrum(double kappa, const OTOPSEnv& env, double lambda_nm);

// Gaussian-beam scintillation variance: double integral of the OTOPS
// spectrum against the beam kernel. Returns sigma_B^2.
double rytov_gaussian(const OTOPSEnv& env, const BeamGeometry& beam,
                      double rel_tol = 1e-6);

// Large/small-scale log-variance map to Gamma-Gamma shapes.
GGShape gg_from_log_variances(double sigma_lnx_sq, double sigma_lny_sq);

// Shapes from the Gaussian-beam scintillation variance and the beam
// curvature parameter theta1. sigma_b2 = 0 is degenerate and rejected.
GGShape gg_from_otops(double sigma_b2, double theta1);

}  // namespace uwoc
