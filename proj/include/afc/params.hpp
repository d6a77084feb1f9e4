// SPDX-License-Identifier: MIT
//
// Translation between bench quantities (mirror reflectivity, cavity length,
// optical depth, laser intensity) and the model parameters kappa, g sqrt N,
// and Omega. Frequencies are angular (rad/s) throughout; intensities keep
// the customary W/cm^2. The crystal's refractive index is ignored: lengths
// enter with the vacuum speed of light.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "afc/comb.hpp"

namespace afc {

struct CavityGeometry {
    double r1 = 0.0;      // input mirror power reflectivity, in (0,1)
    double r2 = 1.0;      // back mirror power reflectivity, in (0,1]
    double length = 0.0;  // m

    void validate() const;
};

struct CrystalAbsorption {
    double d_tilde = 0.0;          // mean optical depth of the comb structure
    double length = 0.0;           // m, crystal
    std::optional<double> d_max;   // peak optical depth, if known

    void validate() const;
};

// Field amplitude decay rate of the one-sided cavity, rad/s. Uses the exact
// round-trip logarithm; kappa_linear_approx is the small-loss (1 - R1) form,
// kept for comparison since the two differ by a third at R1 = 0.4.
double kappa_from_cavity(const CavityGeometry& c);
double kappa_linear_approx(const CavityGeometry& c);

// Free spectral range over transmission FWHM. `exact` is the arcsin form in
// sqrt(r1 r2); `from_kappa` is pi c / (2 L kappa), the small-loss equivalent
// sometimes taken as the definition.
struct CavityFinesse {
    double exact = 0.0;
    double from_kappa = 0.0;
};
CavityFinesse finesse(const CavityGeometry& c);

// Inverse of the from_kappa form: the decay rate a quoted finesse implies.
double kappa_from_finesse(double finesse_from_kappa, double length);

// Collective coupling for a crystal inside a cavity of length l_cav:
// sqrt(d_tilde c / (D_comb l_cav)) with D_comb taken from the comb envelope.
double g_sqrt_n_from_depth(const CrystalAbsorption& a, const Shape& envelope,
                           double l_cav);

// F_cav * d_tilde - pi; zero exactly at impedance matching, negative when
// the crystal under-absorbs.
double impedance_match_check(const CavityGeometry& c, const CrystalAbsorption& a);

// Intensity reference point for the control Rabi frequency, which scales as
// the square root of intensity.
struct RabiReference {
    double intensity = 250.0;     // W/cm^2
    double omega = 1.00530964914873383e7;  // rad/s (2 pi x 1.6 MHz)

    void validate() const;
};

double rabi_from_intensity(double intensity, const RabiReference& ref);

// Intensity and beam power needed for a pi pulse of duration tau.
double pi_pulse_intensity(double tau, const RabiReference& ref);  // W/cm^2
double pi_pulse_power(double tau, double beam_diameter,
                      const RabiReference& ref);  // W, diameter in m

// Optical depth across the comb: OD(omega) = (2 pi g^2 N / c) n(omega) L.
// n(omega) is the continuous comb density (envelope times tooth sum, with
// the infinite-lattice normalization), so dirac teeth are rejected. Samples
// span the tooth lattice plus half a spacing on each side and always include
// omega = 0.
struct DepthProfile {
    std::vector<double> omega;  // rad/s
    std::vector<double> od;
};
DepthProfile optical_depth_profile(const CombSpec& spec, double g_sqrt_n_free,
                                   double l_crys, std::size_t n_samples = 2001);

// Mean optical depth d_tilde = g^2 N D_comb L / c for the free-space coupling.
double mean_depth(const Shape& envelope, double g_sqrt_n_free, double l_crys);

// Peak depth OD(0), reached at the center of the central tooth.
double peak_depth(const CombSpec& spec, double g_sqrt_n_free, double l_crys);

// Aligned text table walking from the bench values to the model parameters.
std::string derivation_table(const CavityGeometry& c, const CrystalAbsorption& a,
                             const Shape& envelope);

}  // namespace afc
