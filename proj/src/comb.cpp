// SPDX-License-Identifier: MIT
#include "afc/comb.hpp"

#include <algorithm>
#include <cmath>

#include "afc/errors.hpp"
#include "afc/units.hpp"

namespace afc {

namespace {

const char* shape_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::dirac: return "dirac";
        case ShapeKind::rectangular: return "rectangular";
        case ShapeKind::gaussian: return "gaussian";
        case ShapeKind::lorentzian: return "lorentzian";
    }
    return "?";
}

void require_width(const Shape& s, const char* what) {
    if (s.kind != ShapeKind::dirac && !(s.width > 0.0))
        throw ConfigError(std::string(what) + ": " + shape_name(s.kind) +
                          " shape needs a positive width");
}

// Half-extent of the sampled tooth support. Gaussian tails beyond 4 sigma
// carry < 1e-4 of the mass; the lorentzian cut is cruder but absorbed by the
// global renormalization.
double tooth_half_support(const Shape& tooth) {
    switch (tooth.kind) {
        case ShapeKind::dirac: return 0.0;
        case ShapeKind::rectangular: return 0.5 * tooth.width;
        case ShapeKind::gaussian: return 4.0 * tooth.width;
        case ShapeKind::lorentzian: return 4.0 * tooth.width;
    }
    return 0.0;
}

}  // namespace

double shape_value(const Shape& s, double omega) {
    switch (s.kind) {
        case ShapeKind::dirac:
            return omega == 0.0 ? 1.0 : 0.0;
        case ShapeKind::rectangular:
            return std::abs(omega) <= 0.5 * s.width * (1.0 + 1e-12) ? 1.0 : 0.0;
        case ShapeKind::gaussian:
            return std::exp(-omega * omega / (2.0 * s.width * s.width));
        case ShapeKind::lorentzian: {
            const double u = omega / s.width;
            return 1.0 / (1.0 + u * u);
        }
    }
    return 0.0;
}

double shape_area(const Shape& s) {
    require_width(s, "shape_area");
    switch (s.kind) {
        case ShapeKind::dirac:
            throw ConfigError("shape_area: undefined for dirac");
        case ShapeKind::rectangular: return s.width;
        case ShapeKind::gaussian: return std::sqrt(two_pi) * s.width;
        case ShapeKind::lorentzian: return pi * s.width;
    }
    throw ConfigError("shape_area: unknown shape");
}

double CombGrid::max_abs_omega() const {
    double m = 0.0;
    for (double w : omegas) m = std::max(m, std::abs(w));
    return m;
}

CombGrid build_comb(const CombSpec& spec, std::vector<std::string>* warnings) {
    if (spec.envelope.kind == ShapeKind::dirac)
        throw ConfigError("build_comb: envelope shape cannot be dirac");
    require_width(spec.envelope, "build_comb envelope");
    require_width(spec.tooth, "build_comb tooth");
    if (!(spec.delta > 0.0)) throw ConfigError("build_comb: delta must be positive");
    if (spec.n_teeth < 3) throw ConfigError("build_comb: need at least 3 teeth");

    int cpt = spec.classes_per_tooth;
    if (spec.tooth.kind == ShapeKind::dirac) {
        cpt = 1;
    } else {
        if (cpt < 3)
            throw ConfigError("build_comb: at least 3 classes per tooth are needed "
                              "to resolve a non-dirac tooth shape");
        if (cpt % 2 == 0)
            throw ConfigError("build_comb: classes_per_tooth must be odd");
    }

    if (warnings) {
        if (spec.envelope.width / spec.delta < 4.0)
            warnings->push_back("comb: envelope width / delta < 4; below the intended "
                                "well-separated-teeth regime");
        if (spec.tooth.kind != ShapeKind::dirac && spec.delta / spec.tooth.width < 2.0)
            warnings->push_back("comb: delta / tooth width < 2; teeth overlap strongly");
    }

    // Teeth at m*delta, symmetric for odd counts. For even counts the range is
    // shifted one tooth toward positive detuning; centers stay on the lattice.
    const int m_lo = -(spec.n_teeth - 1) / 2;
    const int m_hi = m_lo + spec.n_teeth - 1;

    const double half = tooth_half_support(spec.tooth);
    CombGrid grid;
    grid.omegas.reserve(static_cast<std::size_t>(spec.n_teeth) * cpt);
    grid.weights.reserve(grid.omegas.capacity());

    for (int m = m_lo; m <= m_hi; ++m) {
        const double center = static_cast<double>(m) * spec.delta;
        const double env = shape_value(spec.envelope, center);
        if (env <= 0.0) continue;
        if (cpt == 1) {
            grid.omegas.push_back(center);
            grid.weights.push_back(env);
            continue;
        }
        for (int i = 0; i < cpt; ++i) {
            const double off = -half + 2.0 * half * static_cast<double>(i) /
                                            static_cast<double>(cpt - 1);
            const double w = shape_value(spec.tooth, off) * env;
            grid.omegas.push_back(center + off);
            grid.weights.push_back(w);
        }
    }

    double total = 0.0;
    for (double w : grid.weights) total += w;
    if (!(total > 0.0))
        throw ConfigError("build_comb: no tooth falls inside the envelope");
    for (double& w : grid.weights) w /= total;
    return grid;
}

double d_comb(const Shape& envelope) {
    require_width(envelope, "d_comb");
    switch (envelope.kind) {
        case ShapeKind::dirac:
            throw ConfigError("d_comb: undefined for a dirac envelope");
        case ShapeKind::rectangular: return two_pi / envelope.width;
        case ShapeKind::gaussian: return std::sqrt(two_pi) / envelope.width;
        case ShapeKind::lorentzian: return 2.0 / envelope.width;
    }
    throw ConfigError("d_comb: unknown shape");
}

double c_opt(const Shape& envelope) {
    return 2.0 / (envelope.width * d_comb(envelope));
}

double cooperativity(double g_sqrt_n, double kappa, double gamma_envelope) {
    if (!(kappa > 0.0) || !(gamma_envelope > 0.0) || g_sqrt_n < 0.0)
        throw ConfigError("cooperativity: kappa and Gamma must be positive, g sqrt N >= 0");
    return g_sqrt_n * g_sqrt_n / (kappa * gamma_envelope);
}

double eta_F(const Shape& tooth, double delta) {
    if (!(delta > 0.0)) throw ConfigError("eta_F: delta must be positive");
    if (tooth.kind == ShapeKind::dirac) return 1.0;
    require_width(tooth, "eta_F");
    if (!(tooth.width < delta))
        throw ConfigError("eta_F: tooth width must be below the comb period");
    const double t_r = two_pi / delta;  // rephasing time
    switch (tooth.kind) {
        case ShapeKind::gaussian: {
            const double gt = tooth.width * t_r;
            return std::exp(-gt * gt);
        }
        case ShapeKind::rectangular: {
            // Fourier transform of the box falls as sinc(gamma t / 2).
            const double x = 0.5 * tooth.width * t_r;
            const double s = std::sin(x) / x;
            return s * s;
        }
        case ShapeKind::lorentzian:
            return std::exp(-2.0 * tooth.width * t_r);
        case ShapeKind::dirac: break;
    }
    return 1.0;
}

double shape_fwhm(const Shape& s) {
    require_width(s, "shape_fwhm");
    switch (s.kind) {
        case ShapeKind::dirac:
            throw ConfigError("shape_fwhm: undefined for dirac");
        case ShapeKind::rectangular: return s.width;
        case ShapeKind::gaussian: return 2.0 * std::sqrt(2.0 * std::log(2.0)) * s.width;
        case ShapeKind::lorentzian: return 2.0 * s.width;
    }
    throw ConfigError("shape_fwhm: unknown shape");
}

double comb_finesse(const CombSpec& spec) {
    if (spec.tooth.kind == ShapeKind::dirac)
        throw ConfigError("comb_finesse: undefined for dirac teeth");
    if (!(spec.delta > 0.0)) throw ConfigError("comb_finesse: delta must be positive");
    return spec.delta / shape_fwhm(spec.tooth);
}

}  // namespace afc
