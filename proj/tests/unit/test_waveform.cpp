// SPDX-License-Identifier: MIT
//
// Envelope construction, inner products, filtering, resampling and CSV I/O.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>

#include "afc/errors.hpp"
#include "afc/units.hpp"
#include "afc/waveform.hpp"

using namespace afc;

namespace {

// Intensity FWHM measured by linear interpolation of |a|^2 across the
// half-maximum crossings.
double measured_fwhm(const Envelope& e) {
    std::vector<double> I(e.grid.n);
    double peak = 0.0;
    for (std::size_t i = 0; i < e.grid.n; ++i) {
        I[i] = std::norm(e.a[i]);
        peak = std::max(peak, I[i]);
    }
    const double half = 0.5 * peak;
    double t_lo = 0.0, t_hi = 0.0;
    for (std::size_t i = 1; i < I.size(); ++i) {
        if (I[i - 1] < half && I[i] >= half) {
            const double f = (half - I[i - 1]) / (I[i] - I[i - 1]);
            t_lo = e.grid.time(i - 1) + f * e.grid.dt;
            break;
        }
    }
    for (std::size_t i = I.size() - 1; i > 0; --i) {
        if (I[i] < half && I[i - 1] >= half) {
            const double f = (half - I[i]) / (I[i - 1] - I[i]);
            t_hi = e.grid.time(i) - f * e.grid.dt;
            break;
        }
    }
    return t_hi - t_lo;
}

}  // namespace

// ============================================================================
// TimeGrid and Envelope basics
// ============================================================================

TEST_CASE("TimeGrid validation", "[waveform]") {
    CHECK_THROWS_AS((TimeGrid{0.0, -1e-9, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((TimeGrid{0.0, 0.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((TimeGrid{0.0, 1e-9, 1}.validate()), ConfigError);
    CHECK_NOTHROW((TimeGrid{0.0, 1e-9, 2}.validate()));

    TimeGrid g{1e-6, 1e-9, 101};
    CHECK(g.time(100) == Catch::Approx(1.1e-6).epsilon(1e-12));
    CHECK(g.span() == Catch::Approx(1e-7).epsilon(1e-12));
}

TEST_CASE("Gaussian generator hits the requested intensity FWHM", "[waveform]") {
    TimeGrid g{0.0, 1e-9, 3001};
    Envelope e = make_gaussian(g, 1.5e-6, 330e-9);

    CHECK(e.norm2() == Catch::Approx(1.0).margin(1e-9));
    CHECK(measured_fwhm(e) == Catch::Approx(330e-9).margin(1e-9));

    // Intensity standard deviation of the 330 ns profile is close to 140 ns.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) mean += g.time(i) * std::norm(e.a[i]) * g.dt;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double u = g.time(i) - mean;
        m2 += u * u * std::norm(e.a[i]) * g.dt;
    }
    CHECK(std::sqrt(m2) == Catch::Approx(140.14e-9).epsilon(5e-3));

    CHECK_THROWS_AS(make_gaussian(g, 1.5e-6, 3e-9), ConfigError);
}

TEST_CASE("Exponential generator is causal and normalized", "[waveform]") {
    TimeGrid g{0.0, 1e-9, 10001};
    const double tau = 1e-6;
    Envelope e = make_exponential(g, 2e-6, tau);

    CHECK(e.norm2() == Catch::Approx(1.0).margin(1e-9));
    for (std::size_t i = 0; i < g.n && g.time(i) < 2e-6 - 1e-12; ++i)
        CHECK(std::abs(e.a[i]) == 0.0);

    // Scaled mean over [0, M tau]: (1/sqrt(M tau)) int_0^{M tau} a dt equals
    // sqrt(2/M)(1 - e^-M) for the ideal profile; grid artifacts stay < 2e-3.
    const double M = 1.26;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double t = g.time(i) - 2e-6;
        if (t >= 0.0 && t <= M * tau) acc += e.a[i].real() * g.dt;
    }
    const double r = acc / std::sqrt(M * tau);
    CHECK(r == Catch::Approx(0.90251).epsilon(2e-3));

    CHECK_THROWS_AS(make_exponential(g, 0.0, 0.5e-9), ConfigError);
}

TEST_CASE("Asymmetric generator: symmetry and width", "[waveform]") {
    TimeGrid g{0.0, 2e-9, 20001};

    SECTION("equal rise and fall gives a symmetric peak at the grid middle") {
        Envelope e = make_asymmetric_ion_like(g, 1.0, 1.0, 4e-6);
        const std::size_t mid = (g.n - 1) / 2;
        for (std::size_t d : {10u, 100u, 1000u})
            CHECK(std::abs(e.a[mid - d]) ==
                  Catch::Approx(std::abs(e.a[mid + d])).epsilon(1e-12));
    }

    SECTION("intensity FWHM matches the request") {
        Envelope e = make_asymmetric_ion_like(g, 1.0, 6.0, 6e-6);
        CHECK(e.norm2() == Catch::Approx(1.0).margin(1e-9));
        CHECK(measured_fwhm(e) == Catch::Approx(6e-6).margin(2.0 * g.dt));
    }

    SECTION("rise above fall is rejected") {
        CHECK_THROWS_AS(make_asymmetric_ion_like(g, 2.0, 1.0, 4e-6), ConfigError);
    }
}

// ============================================================================
// Inner products
// ============================================================================

TEST_CASE("Overlap basics", "[waveform]") {
    TimeGrid g{0.0, 1e-9, 4001};
    Envelope a = make_gaussian(g, 1.0e-6, 200e-9);

    SECTION("self-overlap is the squared norm") {
        cplx s = overlap(a, a);
        CHECK(s.real() == Catch::Approx(a.norm2()).epsilon(1e-12));
        CHECK(s.imag() == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("disjoint supports give zero") {
        Envelope b = make_gaussian(g, 3.3e-6, 100e-9);
        CHECK(std::abs(overlap(a, b)) < 1e-12);
    }

    SECTION("grid mismatch is rejected") {
        TimeGrid g2{0.0, 2e-9, 2001};
        Envelope b = make_gaussian(g2, 1.0e-6, 200e-9);
        CHECK_THROWS_AS(overlap(a, b), ConfigError);
    }
}

TEST_CASE("Gaussians offset by the amplitude std overlap at e^(-1/4)", "[waveform]") {
    const double fwhm = 330e-9;
    const double sigma_i = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double offset = std::sqrt(2.0) * sigma_i;

    TimeGrid g{0.0, 1e-9, 4001};
    Envelope a = make_gaussian(g, 1.8e-6, fwhm);
    Envelope b = make_gaussian(g, 1.8e-6 + offset, fwhm);
    const double ov = std::abs(overlap(a, b));
    CHECK(ov == Catch::Approx(std::exp(-0.25)).epsilon(1e-4));

    // Same quantity on a 10x finer grid as an independent quadrature check.
    TimeGrid gf{0.0, 0.1e-9, 40001};
    Envelope af = make_gaussian(gf, 1.8e-6, fwhm);
    Envelope bf = make_gaussian(gf, 1.8e-6 + offset, fwhm);
    CHECK(ov == Catch::Approx(std::abs(overlap(af, bf))).epsilon(1e-5));
}

TEST_CASE("Cauchy-Schwarz on random envelopes", "[waveform]") {
    std::mt19937 rng(777);
    std::normal_distribution<double> dist(0.0, 1.0);
    TimeGrid g{0.0, 1e-8, 257};
    for (int rep = 0; rep < 100; ++rep) {
        Envelope a{g, std::vector<cplx>(g.n)}, b{g, std::vector<cplx>(g.n)};
        for (std::size_t i = 0; i < g.n; ++i) {
            a.a[i] = cplx(dist(rng), dist(rng));
            b.a[i] = cplx(dist(rng), dist(rng));
        }
        const double lhs = std::norm(overlap(a, b));
        const double rhs = a.norm2() * b.norm2();
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

// ============================================================================
// Spectral box filter
// ============================================================================

TEST_CASE("Box filter limits and identities", "[waveform]") {
    // 131 us span: spectral resolution 4.8e4 rad/s resolves even the
    // narrowest band used below (half width 9.4e5 rad/s) with margin.
    TimeGrid g{0.0, 2e-9, 65536};
    Envelope e = make_gaussian(g, 65e-6, 330e-9);

    SECTION("all-pass band is the identity") {
        FilterResult r = box_filter(e, SpectralBoxFilter{1e12, 0.0});
        CHECK(r.retained_energy == Catch::Approx(1.0).margin(1e-9));
        for (std::size_t i = 0; i < g.n; i += 97)
            CHECK(std::abs(r.out.a[i] - e.a[i]) < 1e-12);
        CHECK(r.out.norm2() == Catch::Approx(e.norm2()).margin(1e-9));
    }

    SECTION("narrow bands retain monotonically less") {
        const double r1 = box_filter(e, SpectralBoxFilter{rad_from_mhz(2.0), 0.0})
                              .retained_energy;
        const double r2 = box_filter(e, SpectralBoxFilter{rad_from_mhz(0.5), 0.0})
                              .retained_energy;
        const double r3 = box_filter(e, SpectralBoxFilter{rad_from_mhz(0.15), 0.0})
                              .retained_energy;
        CHECK(r1 > r2);
        CHECK(r2 > r3);
        CHECK(r3 > 0.0);
    }

    SECTION("filtering twice equals filtering once") {
        SpectralBoxFilter f{rad_from_mhz(0.4), 0.0};
        FilterResult once = box_filter(e, f);
        FilterResult twice = box_filter(once.out, f);
        CHECK(twice.retained_energy == Catch::Approx(1.0).margin(1e-9));
        for (std::size_t i = 0; i < g.n; i += 97)
            CHECK(std::abs(twice.out.a[i] - once.out.a[i]) < 1e-9);
    }

    SECTION("insufficient spectral resolution is rejected") {
        TimeGrid shortg{0.0, 1e-9, 512};
        Envelope s = make_gaussian(shortg, 0.25e-6, 50e-9);
        CHECK_THROWS_AS((box_filter(s, SpectralBoxFilter{rad_from_mhz(0.15), 0.0})),
                        ConfigError);
    }
}

TEST_CASE("Box filter against the Gaussian band integral", "[waveform]") {
    // 330 ns intensity FWHM Gaussian has a 1.3 MHz intensity-FWHM spectrum;
    // the +-2pi x 0.15 MHz box keeps erf(sqrt(2) sigma W) = 0.2083388 of it.
    TimeGrid g{0.0, 2e-9, 65536};
    Envelope e = make_gaussian(g, 65e-6, 330e-9);
    FilterResult r = box_filter(e, SpectralBoxFilter{rad_from_mhz(0.15), 0.0});
    // Sharp band edges quantize to whole DFT bins, which bounds the
    // achievable agreement with the continuum integral at this resolution.
    CHECK(r.retained_energy == Catch::Approx(0.2083388).epsilon(1e-2));

    // Halving the bin size must tighten the match.
    TimeGrid g2{0.0, 2e-9, 131072};
    Envelope e2 = make_gaussian(g2, 131e-6, 330e-9);
    FilterResult r2 = box_filter(e2, SpectralBoxFilter{rad_from_mhz(0.15), 0.0});
    CHECK(std::abs(r2.retained_energy - 0.2083388) <
          std::abs(r.retained_energy - 0.2083388));
}

// ============================================================================
// Resampling
// ============================================================================

TEST_CASE("Resampling identities and guards", "[waveform]") {
    TimeGrid g{0.0, 1e-9, 4001};
    Envelope e = make_gaussian(g, 2e-6, 330e-9);

    SECTION("same grid returns the same samples") {
        ResampleResult r = resample(e, g);
        REQUIRE_FALSE(r.clipped);
        for (std::size_t i = 0; i < g.n; i += 37)
            CHECK(std::abs(r.out.a[i] - e.a[i]) < 1e-15);
    }

    SECTION("2x upsampling preserves the norm of a smooth envelope") {
        TimeGrid fine{0.0, 0.5e-9, 8001};
        ResampleResult r = resample(e, fine);
        CHECK(r.out.norm2() == Catch::Approx(1.0).margin(1e-6));
    }

    SECTION("band-limited interpolation reproduces smooth content") {
        TimeGrid coarse{0.0, 4e-9, 1001};
        Envelope c = make_gaussian(coarse, 2e-6, 330e-9);
        TimeGrid fine{0.0, 2e-9, 1601};
        ResampleResult r = resample(c, fine, ResampleMethod::band_limited);
        Envelope ref = make_gaussian(fine, 2e-6, 330e-9);
        for (std::size_t i = 100; i + 100 < fine.n; i += 53)
            CHECK(std::abs(r.out.a[i] - ref.a[i]) < 2e-4 * std::abs(ref.a[i]) + 1e-6);
    }

    SECTION("downsampling below the content bandwidth is rejected") {
        Envelope sharp = make_exponential(g, 1e-6, 20e-9);
        TimeGrid coarse{0.0, 100e-9, 41};
        CHECK_THROWS_AS(resample(sharp, coarse), ConfigError);
    }

    SECTION("extrapolation zero-fills and flags") {
        TimeGrid wide{-1e-6, 1e-9, 6001};
        ResampleResult r = resample(e, wide);
        CHECK(r.clipped);
        CHECK(std::abs(r.out.a[0]) == 0.0);
        CHECK(r.out.norm2() == Catch::Approx(1.0).margin(1e-6));
    }
}

// ============================================================================
// CSV round trip
// ============================================================================

TEST_CASE("CSV save/load round trip", "[waveform]") {
    TimeGrid g{1e-6, 1e-9, 513};
    Envelope e = make_gaussian(g, 1.25e-6, 50e-9);
    for (std::size_t i = 0; i < g.n; ++i) e.a[i] *= std::polar(1.0, 0.01 * i);

    const std::string path = "test_waveform_roundtrip.csv";
    save_csv(e, path);
    Envelope r = load_csv(path);
    std::remove(path.c_str());

    REQUIRE(r.grid.n == g.n);
    CHECK(r.grid.t0 == Catch::Approx(g.t0).epsilon(1e-12));
    CHECK(r.grid.dt == Catch::Approx(g.dt).epsilon(1e-12));
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(r.a[i].real() == e.a[i].real());
        CHECK(r.a[i].imag() == e.a[i].imag());
    }
}

TEST_CASE("CSV error reporting", "[waveform]") {
    SECTION("missing column is named") {
        const std::string path = "test_waveform_badheader.csv";
        std::ofstream(path) << "t,re\n0,1\n1e-9,1\n";
        try {
            load_csv(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("im") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SECTION("non-uniform spacing reports the row") {
        const std::string path = "test_waveform_nonuniform.csv";
        std::ofstream(path) << "t,re,im\n0,1,0\n1e-9,1,0\n2.5e-9,1,0\n3e-9,1,0\n";
        try {
            load_csv(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("row") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SECTION("scientific notation is accepted") {
        const std::string path = "test_waveform_scinot.csv";
        std::ofstream(path) << "t,re,im\n0.0,1.5E-3,0\n1.0e-9,-2e-3,1e-4\n2e-9,0,0\n";
        Envelope e = load_csv(path);
        std::remove(path.c_str());
        CHECK(e.a[0].real() == Catch::Approx(1.5e-3));
        CHECK(e.a[1].imag() == Catch::Approx(1e-4));
    }
}
