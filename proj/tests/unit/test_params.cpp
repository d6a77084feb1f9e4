// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "afc/comb.hpp"
#include "afc/errors.hpp"
#include "afc/params.hpp"
#include "afc/units.hpp"

using namespace afc;

namespace {

CavityGeometry bench_cavity() { return {0.4, 0.97, 0.208}; }
CrystalAbsorption bench_crystal() { return {0.48, 3e-3, {}}; }

}  // namespace

TEST_CASE("Cavity decay rate", "[params]") {
    SECTION("exact-log form at the bench point") {
        const double k = kappa_from_cavity(bench_cavity());
        CHECK(k == Catch::Approx(330164724.46054316).epsilon(1e-12));
        // close to the quoted 2 pi x 55 MHz, short by under 5%
        CHECK(std::abs(k - rad_from_mhz(55.0)) / rad_from_mhz(55.0) < 0.05);
    }
    SECTION("lossless mirror keeps the photon forever") {
        CavityGeometry c{1.0 - 1e-12, 1.0, 0.208};
        CHECK(kappa_from_cavity(c) < 1.0);
    }
    SECTION("linear form converges to the log form for good mirrors") {
        auto ratio = [](double r1) {
            CavityGeometry c{r1, 1.0, 0.208};
            return kappa_linear_approx(c) / kappa_from_cavity(c);
        };
        CHECK(ratio(0.98) == Catch::Approx(0.9899663290501831).epsilon(1e-12));
        CHECK(std::abs(1.0 - ratio(0.98)) < 0.011);
        CHECK(std::abs(1.0 - ratio(0.99)) < 0.01);
        CHECK(std::abs(1.0 - ratio(0.999)) < 0.001);
        CHECK(std::abs(1.0 - ratio(0.9999)) < 1e-4);
        // but they disagree badly at the actual mirror
        CHECK(kappa_linear_approx(bench_cavity()) / kappa_from_cavity(bench_cavity()) < 0.7);
    }
    SECTION("rejects degenerate geometry") {
        CHECK_THROWS_AS(kappa_from_cavity({0.0, 1.0, 0.2}), ConfigError);
        CHECK_THROWS_AS(kappa_from_cavity({1.0, 1.0, 0.2}), ConfigError);
        CHECK_THROWS_AS(kappa_from_cavity({0.4, 1.0, 0.0}), ConfigError);
        CHECK_THROWS_AS(kappa_from_cavity({0.4, 1.2, 0.2}), ConfigError);
    }
}

TEST_CASE("Cavity finesse", "[params]") {
    SECTION("both forms at the bench point") {
        const CavityFinesse f = finesse(bench_cavity());
        CHECK(f.exact == Catch::Approx(6.511434737367135).epsilon(1e-12));
        CHECK(f.from_kappa == Catch::Approx(6.85719618087606).epsilon(1e-12));
    }
    SECTION("perfect back mirror raises the exact value") {
        CavityGeometry c = bench_cavity();
        c.r2 = 1.0;
        CHECK(finesse(c).exact == Catch::Approx(6.736151960222744).epsilon(1e-12));
    }
    SECTION("forms agree for good mirrors") {
        CavityGeometry c{0.995, 1.0, 0.208};
        const CavityFinesse f = finesse(c);
        CHECK(std::abs(f.exact / f.from_kappa - 1.0) < 0.01);
    }
    SECTION("kappa round-trips through the finesse") {
        const CavityGeometry c = bench_cavity();
        const double k = kappa_from_cavity(c);
        CHECK(kappa_from_finesse(finesse(c).from_kappa, c.length) ==
              Catch::Approx(k).epsilon(1e-9));
    }
}

TEST_CASE("Collective coupling from the mean depth", "[params]") {
    const Shape rect{ShapeKind::rectangular, rad_from_mhz(4.0)};

    SECTION("bench point lands on the quoted coupling") {
        const double gsn = g_sqrt_n_from_depth(bench_crystal(), rect, 0.208);
        CHECK(gsn == Catch::Approx(52605275.37161151).epsilon(1e-12));
        CHECK(std::abs(gsn - rad_from_mhz(8.4)) / rad_from_mhz(8.4) < 0.02);
    }
    SECTION("zero depth, zero coupling") {
        CrystalAbsorption a = bench_crystal();
        a.d_tilde = 0.0;
        CHECK(g_sqrt_n_from_depth(a, rect, 0.208) == 0.0);
    }
    SECTION("quadrupling the depth doubles the coupling") {
        CrystalAbsorption a = bench_crystal();
        const double base = g_sqrt_n_from_depth(a, rect, 0.208);
        a.d_tilde *= 4.0;
        CHECK(g_sqrt_n_from_depth(a, rect, 0.208) ==
              Catch::Approx(2.0 * base).epsilon(1e-12));
    }
    SECTION("composes with the free-space rescaling") {
        const CrystalAbsorption a = bench_crystal();
        const double l_cav = 0.208;
        // free-space coupling that reproduces d_tilde over the crystal length
        const double gsn_free =
            std::sqrt(a.d_tilde * c_light / (d_comb(rect) * a.length));
        CHECK(mean_depth(rect, gsn_free, a.length) ==
              Catch::Approx(a.d_tilde).epsilon(1e-12));
        CHECK(g_sqrt_n_from_depth(a, rect, l_cav) ==
              Catch::Approx(gsn_free * std::sqrt(a.length / l_cav)).epsilon(1e-12));
    }
}

TEST_CASE("Impedance matching residual", "[params]") {
    SECTION("bench point is near-matched") {
        const double r = impedance_match_check(bench_cavity(), bench_crystal());
        CHECK(r == Catch::Approx(-0.01610397965356869).epsilon(1e-9));
        CHECK(std::abs(r) < 0.05);
    }
    SECTION("exact matching zeroes the residual") {
        CrystalAbsorption a = bench_crystal();
        a.d_tilde = pi / finesse(bench_cavity()).exact;
        CHECK(impedance_match_check(bench_cavity(), a) ==
              Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("under-absorbing crystal gives a negative residual") {
        CrystalAbsorption a = bench_crystal();
        a.d_tilde = 0.1;
        CHECK(impedance_match_check(bench_cavity(), a) < 0.0);
    }
}

TEST_CASE("Control pulse intensity and power", "[params]") {
    const RabiReference ref;

    SECTION("reference point returns the reference Rabi frequency") {
        CHECK(rabi_from_intensity(250.0, ref) ==
              Catch::Approx(rad_from_mhz(1.6)).epsilon(1e-12));
    }
    SECTION("square-root scaling") {
        CHECK(rabi_from_intensity(1000.0, ref) ==
              Catch::Approx(2.0 * ref.omega).epsilon(1e-12));
        CHECK(rabi_from_intensity(0.0, ref) == 0.0);
    }
    SECTION("70 ns pi pulse needs about 5 kW/cm2") {
        const double tau = 0.07e-6;
        CHECK(pi / tau == Catch::Approx(rad_from_mhz(50.0 / 7.0)).epsilon(1e-12));
        CHECK(pi_pulse_intensity(tau, ref) ==
              Catch::Approx(4982.461734693878).epsilon(1e-12));
    }
    SECTION("50 um beam at that pulse takes about 100 mW") {
        const double p = pi_pulse_power(0.07e-6, 50e-6, ref);
        CHECK(p == Catch::Approx(0.0978304073906659).epsilon(1e-12));
        CHECK(std::abs(p - 0.1) / 0.1 < 0.20);
    }
    SECTION("longer pulses need quartically less power") {
        const double p1 = pi_pulse_power(0.07e-6, 50e-6, ref);
        const double p2 = pi_pulse_power(0.14e-6, 50e-6, ref);
        CHECK(p1 / p2 == Catch::Approx(4.0).epsilon(1e-12));
    }
    SECTION("rejections") {
        CHECK_THROWS_AS(pi_pulse_intensity(0.0, ref), ConfigError);
        CHECK_THROWS_AS(pi_pulse_power(0.07e-6, 0.0, ref), ConfigError);
        CHECK_THROWS_AS(rabi_from_intensity(-1.0, ref), ConfigError);
        CHECK_THROWS_AS(rabi_from_intensity(250.0, RabiReference{0.0, 1.0}),
                        ConfigError);
    }
}

TEST_CASE("Optical depth profile", "[params]") {
    CombSpec spec;
    spec.envelope = {ShapeKind::rectangular, rad_from_mhz(4.0)};
    spec.tooth = {ShapeKind::rectangular, rad_from_khz(10.0)};
    spec.delta = rad_from_khz(61.0);
    spec.n_teeth = 65;
    const double gsn_free = 4.0e7;
    const double l_crys = 3e-3;

    SECTION("profile scales linearly with the crystal length") {
        DepthProfile p1 = optical_depth_profile(spec, gsn_free, l_crys, 801);
        DepthProfile p2 = optical_depth_profile(spec, gsn_free, 2.0 * l_crys, 801);
        REQUIRE(p1.od.size() == p2.od.size());
        for (std::size_t i = 0; i < p1.od.size(); i += 97)
            CHECK(p2.od[i] == Catch::Approx(2.0 * p1.od[i]).margin(1e-15));
    }
    SECTION("rectangular teeth: peak over mean is the comb finesse") {
        const double ratio = peak_depth(spec, gsn_free, l_crys) /
                             mean_depth(spec.envelope, gsn_free, l_crys);
        CHECK(ratio == Catch::Approx(comb_finesse(spec)).epsilon(1e-12));
    }
    SECTION("gaussian teeth carry the 0.94 shape factor") {
        CombSpec g = spec;
        g.tooth = {ShapeKind::gaussian, rad_from_khz(4.0)};
        const double ratio = peak_depth(g, gsn_free, l_crys) /
                             mean_depth(g.envelope, gsn_free, l_crys);
        CHECK(ratio == Catch::Approx(comb_finesse(g) * 0.9394372786996513)
                           .epsilon(1e-6));
    }
    SECTION("profile integrates back to the mean depth") {
        DepthProfile p = optical_depth_profile(spec, gsn_free, l_crys, 40001);
        double integral = 0.0;
        for (std::size_t i = 1; i < p.od.size(); ++i)
            integral += 0.5 * (p.od[i] + p.od[i - 1]) * (p.omega[i] - p.omega[i - 1]);
        const double d_tilde = integral * d_comb(spec.envelope) / two_pi;
        CHECK(d_tilde == Catch::Approx(mean_depth(spec.envelope, gsn_free, l_crys))
                             .epsilon(0.01));
    }
    SECTION("peak sits at zero detuning on the sample grid") {
        DepthProfile p = optical_depth_profile(spec, gsn_free, l_crys, 2001);
        const std::size_t mid = p.od.size() / 2;
        CHECK(p.omega[mid] == 0.0);
        double best = 0.0;
        for (double v : p.od) best = std::max(best, v);
        CHECK(p.od[mid] == best);
    }
    SECTION("dirac teeth rejected") {
        CombSpec d = spec;
        d.tooth = {ShapeKind::dirac, 0.0};
        CHECK_THROWS_AS(optical_depth_profile(d, gsn_free, l_crys), ConfigError);
    }
}

TEST_CASE("Derivation table", "[params]") {
    const Shape rect{ShapeKind::rectangular, rad_from_mhz(4.0)};
    const std::string t = derivation_table(bench_cavity(), bench_crystal(), rect);
    CHECK(t.find("kappa / 2 pi") != std::string::npos);
    CHECK(t.find("g sqrt N") != std::string::npos);
    CHECK(t.find("C / C_opt") != std::string::npos);
    // the bench point is close to matched, so the residual row prints near 0
    const auto pos = t.find("finesse x d_tilde - pi");
    REQUIRE(pos != std::string::npos);
    CHECK(t.substr(pos, 60).find("-0.016") != std::string::npos);
}
