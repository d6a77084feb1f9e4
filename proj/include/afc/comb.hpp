// SPDX-License-Identifier: MIT
//
// Atomic frequency comb construction: discretization of the spectral atom
// distribution n(omega) into frequency classes, plus the comb-derived
// analytic constants (D_comb, C_opt, finesse, tooth-dephasing factor).
#pragma once

#include <string>
#include <vector>

namespace afc {

enum class ShapeKind { dirac, rectangular, gaussian, lorentzian };

// Spectral line shape with its width parameter in rad/s. Width conventions:
// rectangular = full width, gaussian = standard deviation, lorentzian = half
// width at half maximum. Ignored for dirac.
struct Shape {
    ShapeKind kind = ShapeKind::dirac;
    double width = 0.0;
};

struct CombSpec {
    Shape envelope;              // overall comb envelope, width Gamma
    Shape tooth;                 // individual tooth shape, width gamma_tooth
    double delta = 0.0;          // tooth spacing, rad/s
    int n_teeth = 0;
    int classes_per_tooth = 1;   // odd; forced to 1 for dirac teeth
};

// Discrete frequency classes: detuning omega_k with weight n_k, sum n_k = 1.
struct CombGrid {
    std::vector<double> omegas;   // rad/s
    std::vector<double> weights;  // dimensionless, non-negative

    std::size_t size() const { return omegas.size(); }
    double max_abs_omega() const;
};

// Places teeth at integer multiples of delta, samples each tooth with
// classes_per_tooth uniform points across its truncated support (gaussian:
// +-4 sigma; lorentzian: +-4 gamma; rectangular: full width), weights each
// class by tooth shape times envelope value at the tooth center, and
// renormalizes globally. A rectangular envelope admits teeth whose centers
// lie in [-Gamma/2, +Gamma/2] inclusive, at full weight.
// Optionally reports regime warnings (Gamma/delta < 4, delta/gamma_tooth < 2).
CombGrid build_comb(const CombSpec& spec, std::vector<std::string>* warnings = nullptr);

// Shape value at detuning omega, normalized to 1 at the center.
double shape_value(const Shape& s, double omega);

// Integral of the unit-peak shape over frequency, rad/s. Undefined for dirac.
double shape_area(const Shape& s);

// Area of the central peak of the comb distribution's Fourier transform
// divided by the distribution's total area; a time, independent of tooth
// shape. Defined for non-dirac envelopes.
double d_comb(const Shape& envelope);

// Optimal cooperativity 2 / (Gamma * D_comb) for the given envelope.
double c_opt(const Shape& envelope);

// Memory cooperativity C = (g sqrt N)^2 / (kappa * Gamma).
double cooperativity(double g_sqrt_n, double kappa, double gamma_envelope);

// First-echo attenuation from finite tooth width: squared ratio of the tooth
// shape's Fourier transform at the rephasing time 2 pi / delta to its value
// at zero. 1 for dirac teeth.
double eta_F(const Shape& tooth, double delta);

// Tooth spacing over tooth FWHM.
double comb_finesse(const CombSpec& spec);

// Full width at half maximum of a (non-dirac) shape.
double shape_fwhm(const Shape& s);

}  // namespace afc
