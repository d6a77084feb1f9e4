// SPDX-License-Identifier: MIT
#include "afc/params.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/units.hpp"

namespace afc {

void CavityGeometry::validate() const {
    if (!(r1 > 0.0 && r1 < 1.0))
        throw ConfigError("cavity: r1 must lie strictly inside (0, 1)");
    if (!(r2 > 0.0 && r2 <= 1.0))
        throw ConfigError("cavity: r2 must lie in (0, 1]");
    if (!(length > 0.0)) throw ConfigError("cavity: length must be positive");
}

void CrystalAbsorption::validate() const {
    if (!(d_tilde >= 0.0)) throw ConfigError("crystal: d_tilde must be >= 0");
    if (!(length > 0.0)) throw ConfigError("crystal: length must be positive");
    if (d_max && !(*d_max >= d_tilde))
        throw ConfigError("crystal: peak depth cannot be below the mean depth");
}

double kappa_from_cavity(const CavityGeometry& c) {
    c.validate();
    return -c_light * std::log(c.r1) / (4.0 * c.length);
}

double kappa_linear_approx(const CavityGeometry& c) {
    c.validate();
    return c_light * (1.0 - c.r1) / (4.0 * c.length);
}

CavityFinesse finesse(const CavityGeometry& c) {
    c.validate();
    const double r = std::sqrt(c.r1 * c.r2);
    CavityFinesse f;
    f.exact = 0.5 * pi / std::asin((1.0 - r) / (2.0 * std::sqrt(r)));
    f.from_kappa = pi * c_light / (2.0 * c.length * kappa_from_cavity(c));
    return f;
}

double kappa_from_finesse(double finesse_from_kappa, double length) {
    if (!(finesse_from_kappa > 0.0) || !(length > 0.0))
        throw ConfigError("kappa_from_finesse: inputs must be positive");
    return pi * c_light / (2.0 * length * finesse_from_kappa);
}

double g_sqrt_n_from_depth(const CrystalAbsorption& a, const Shape& envelope,
                           double l_cav) {
    a.validate();
    if (!(l_cav > 0.0))
        throw ConfigError("g_sqrt_n_from_depth: cavity length must be positive");
    return std::sqrt(a.d_tilde * c_light / (d_comb(envelope) * l_cav));
}

double impedance_match_check(const CavityGeometry& c, const CrystalAbsorption& a) {
    a.validate();
    return finesse(c).exact * a.d_tilde - pi;
}

void RabiReference::validate() const {
    if (!(intensity > 0.0) || !(omega > 0.0))
        throw ConfigError("rabi reference: intensity and omega must be positive");
}

double rabi_from_intensity(double intensity, const RabiReference& ref) {
    ref.validate();
    if (!(intensity >= 0.0))
        throw ConfigError("rabi_from_intensity: intensity must be >= 0");
    return ref.omega * std::sqrt(intensity / ref.intensity);
}

double pi_pulse_intensity(double tau, const RabiReference& ref) {
    ref.validate();
    if (!(tau > 0.0)) throw ConfigError("pi_pulse_intensity: tau must be positive");
    const double omega = pi / tau;
    const double ratio = omega / ref.omega;
    return ref.intensity * ratio * ratio;
}

double pi_pulse_power(double tau, double beam_diameter, const RabiReference& ref) {
    if (!(beam_diameter > 0.0))
        throw ConfigError("pi_pulse_power: beam diameter must be positive");
    const double radius_cm = 0.5 * beam_diameter * 100.0;
    return pi_pulse_intensity(tau, ref) * pi * radius_cm * radius_cm;
}

namespace {

// Continuous comb density with the infinite-lattice normalization; integrates
// to 1 when the teeth cover the envelope.
double comb_density(const CombSpec& spec, double omega) {
    const double norm =
        spec.delta / (shape_area(spec.tooth) * shape_area(spec.envelope));
    const int m_lo = -(spec.n_teeth - 1) / 2;
    const int m_hi = m_lo + spec.n_teeth - 1;
    double teeth = 0.0;
    for (int m = m_lo; m <= m_hi; ++m)
        teeth += shape_value(spec.tooth, omega - m * spec.delta);
    return norm * shape_value(spec.envelope, omega) * teeth;
}

void require_profile_inputs(const CombSpec& spec, double g_sqrt_n_free,
                            double l_crys) {
    if (spec.tooth.kind == ShapeKind::dirac)
        throw ConfigError("optical depth: dirac teeth have no finite profile");
    if (spec.envelope.kind == ShapeKind::dirac)
        throw ConfigError("optical depth: envelope cannot be dirac");
    if (!(spec.delta > 0.0) || spec.n_teeth < 1)
        throw ConfigError("optical depth: need a positive tooth spacing and count");
    if (!(g_sqrt_n_free >= 0.0) || !(l_crys > 0.0))
        throw ConfigError("optical depth: coupling must be >= 0, length > 0");
}

}  // namespace

DepthProfile optical_depth_profile(const CombSpec& spec, double g_sqrt_n_free,
                                   double l_crys, std::size_t n_samples) {
    require_profile_inputs(spec, g_sqrt_n_free, l_crys);
    if (n_samples < 3) throw ConfigError("optical depth: need at least 3 samples");
    if (n_samples % 2 == 0) ++n_samples;  // keep omega = 0 on the grid

    const int m_lo = -(spec.n_teeth - 1) / 2;
    const int m_hi = m_lo + spec.n_teeth - 1;
    const double lo = (m_lo - 0.5) * spec.delta;
    const double hi = (m_hi + 0.5) * spec.delta;
    const double scale =
        two_pi * g_sqrt_n_free * g_sqrt_n_free * l_crys / c_light;

    DepthProfile p;
    p.omega.resize(n_samples);
    p.od.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        // Symmetric sampling keeps 0 exactly representable for odd counts.
        const double f = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double w = lo + f * (hi - lo);
        p.omega[i] = w;
        p.od[i] = scale * comb_density(spec, w);
    }
    const std::size_t mid = n_samples / 2;
    p.omega[mid] = 0.0;
    p.od[mid] = scale * comb_density(spec, 0.0);
    return p;
}

double mean_depth(const Shape& envelope, double g_sqrt_n_free, double l_crys) {
    if (!(g_sqrt_n_free >= 0.0) || !(l_crys > 0.0))
        throw ConfigError("mean_depth: coupling must be >= 0, length > 0");
    return g_sqrt_n_free * g_sqrt_n_free * d_comb(envelope) * l_crys / c_light;
}

double peak_depth(const CombSpec& spec, double g_sqrt_n_free, double l_crys) {
    require_profile_inputs(spec, g_sqrt_n_free, l_crys);
    return two_pi * g_sqrt_n_free * g_sqrt_n_free * l_crys / c_light *
           comb_density(spec, 0.0);
}

std::string derivation_table(const CavityGeometry& c, const CrystalAbsorption& a,
                             const Shape& envelope) {
    const double kappa = kappa_from_cavity(c);
    const CavityFinesse f = finesse(c);
    const double gsn = g_sqrt_n_from_depth(a, envelope, c.length);
    const double coop = cooperativity(gsn, kappa, envelope.width);
    const double match = coop / c_opt(envelope);
    const double residual = impedance_match_check(c, a);

    std::ostringstream out;
    char line[160];
    auto row = [&](const char* name, double value, const char* unit) {
        std::snprintf(line, sizeof line, "  %-28s %14.6g  %s\n", name, value, unit);
        out << line;
    };
    out << "inputs\n";
    row("mirror reflectivity r1", c.r1, "");
    row("mirror reflectivity r2", c.r2, "");
    row("cavity length", c.length, "m");
    row("crystal length", a.length, "m");
    row("mean optical depth", a.d_tilde, "");
    row("envelope width", envelope.width / two_pi, "Hz (x 2 pi)");
    out << "derived\n";
    row("kappa", kappa, "rad/s");
    row("kappa / 2 pi", kappa / two_pi, "Hz");
    row("finesse (exact)", f.exact, "");
    row("finesse (from kappa)", f.from_kappa, "");
    row("g sqrt N", gsn, "rad/s");
    row("g sqrt N / 2 pi", gsn / two_pi, "Hz");
    row("cooperativity C", coop, "");
    row("C / C_opt", match, "");
    row("finesse x d_tilde - pi", residual, "");
    return out.str();
}

}  // namespace afc
