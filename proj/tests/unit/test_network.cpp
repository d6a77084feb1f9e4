// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "afc/errors.hpp"
#include "afc/hom.hpp"
#include "afc/network.hpp"
#include "afc/waveform.hpp"

using namespace afc;

TEST_CASE("Four-click probability", "[network]") {
    SECTION("perfect chain gives 1/8") {
        CHECK(four_click_probability({}) == 0.125);
    }
    SECTION("lossy benchmark point") {
        Efficiencies eff;
        eff.eta_det = 0.9;
        eff.eta_ion = 0.1;
        eff.eta_mem = 0.5;
        CHECK(four_click_probability(eff) ==
              Catch::Approx(2.0503125e-4).epsilon(1e-12));
    }
    SECTION("any dead stage kills the event") {
        for (int which = 0; which < 3; ++which) {
            Efficiencies eff;
            (which == 0 ? eff.eta_det : which == 1 ? eff.eta_ion : eff.eta_mem) = 0.0;
            CHECK(four_click_probability(eff) == 0.0);
        }
    }
    SECTION("quartic in the detector efficiency") {
        Efficiencies eff;
        eff.eta_det = 0.9;
        eff.eta_ion = 0.1;
        eff.eta_mem = 0.5;
        const double base = four_click_probability(eff);
        eff.eta_det *= 0.7;
        CHECK(four_click_probability(eff) ==
              Catch::Approx(base * std::pow(0.7, 4)).epsilon(1e-12));
    }
    SECTION("efficiency split must be consistent") {
        Efficiencies eff;
        eff.eta_mem = 0.5;
        eff.eta_afc_shaping = 0.8;
        eff.eta_qfc = 0.625;
        CHECK_NOTHROW(four_click_probability(eff));
        eff.eta_qfc = 0.5;
        CHECK_THROWS_AS(four_click_probability(eff), ConfigError);
    }
    SECTION("out-of-range efficiencies rejected") {
        Efficiencies eff;
        eff.eta_det = 1.2;
        CHECK_THROWS_AS(four_click_probability(eff), ConfigError);
        eff.eta_det = -0.1;
        CHECK_THROWS_AS(four_click_probability(eff), ConfigError);
    }
}

TEST_CASE("Heralded two-ion state", "[network]") {
    SECTION("perfect overlap heralds the Bell state") {
        TwoQubitState s = heralded_state({1.0, 1.0});
        CHECK_NOTHROW(s.validate());
        CHECK(s.fidelity_psi_plus() == Catch::Approx(1.0).margin(1e-15));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(s.rho);
        CHECK(es.eigenvalues().maxCoeff() == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("vanishing overlap heralds an equal mixture") {
        TwoQubitState s = heralded_state({0.0, 0.7});
        CHECK_NOTHROW(s.validate());
        CHECK(s.fidelity_psi_plus() == Catch::Approx(0.5).margin(1e-15));
        CHECK(s.rho(1, 2) == std::complex<double>(0.0));
    }
    SECTION("eigenvalues are (1 +- x_a x_b)/2 and two zeros") {
        TwoQubitState s = heralded_state({0.83, 0.64});
        CHECK_NOTHROW(s.validate());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(s.rho);
        auto w = es.eigenvalues();  // ascending
        CHECK(w(0) == Catch::Approx(0.0).margin(1e-15));
        CHECK(w(1) == Catch::Approx(0.0).margin(1e-15));
        CHECK(w(2) == Catch::Approx(0.2344).margin(1e-12));
        CHECK(w(3) == Catch::Approx(0.7656).margin(1e-12));
    }
    SECTION("matrix element matches the closed-form fidelity exactly") {
        for (double xa : {0.0, 0.3, 0.77, 1.0})
            for (double xb : {0.1, 0.5, 1.0}) {
                TwoQubitState s = heralded_state({xa, xb});
                CHECK(s.fidelity_psi_plus() ==
                      Catch::Approx(fidelity_pure({xa, xb})).margin(1e-15));
            }
    }
    SECTION("overlaps outside [0,1] rejected") {
        CHECK_THROWS_AS(heralded_state({1.3, 0.5}), ConfigError);
        CHECK_THROWS_AS(heralded_state({0.5, -0.2}), ConfigError);
    }
}

TEST_CASE("Fidelities", "[network]") {
    SECTION("pure closed form") {
        CHECK(fidelity_pure({1.0, 1.0}) == 1.0);
        CHECK(fidelity_pure({0.6, 0.6}) == Catch::Approx(0.68).epsilon(1e-12));
        CHECK(fidelity_pure({0.0, 0.9}) == 0.5);
    }
    SECTION("mixed closed form") {
        CHECK(fidelity_mixed(1.0, 1.0) == 1.0);
        CHECK(fidelity_mixed(0.6, 0.6) == Catch::Approx(0.68).epsilon(1e-12));
        CHECK(fidelity_mixed(0.0, 0.0) == 0.5);
    }
    SECTION("range and monotonicity") {
        double prev = 0.0;
        for (int k = 0; k <= 20; ++k) {
            const double f = fidelity_pure({k / 20.0, 0.8});
            CHECK(f >= 0.5);
            CHECK(f <= 1.0);
            CHECK(f >= prev);
            prev = f;
        }
    }
    SECTION("consistency with the two-photon visibility") {
        TimeGrid g{-1.2e-6, 1e-9, 2401};
        Envelope a = make_gaussian(g, 0.0, 0.25e-6);
        Envelope b = make_gaussian(g, 0.1e-6, 0.25e-6);
        const double v = visibility_pure_pure(a, b);
        CHECK(fidelity_pure({v, v}) == Catch::Approx(0.5 * (1.0 + v * v)).epsilon(1e-14));
        CHECK(fidelity_mixed(v, v) == fidelity_pure({v, v}));
    }
}

TEST_CASE("Scenario report", "[network]") {
    Efficiencies eff;
    eff.eta_det = 0.9;
    eff.eta_ion = 0.1;
    eff.eta_mem = 0.5;

    std::vector<NetworkCase> cases = {
        {"baseline", 0.02, 1.0},
        {"filtered", 0.20, 0.25},
        {"shaped+filtered", 0.60, 0.88},
    };
    auto rows = scenario_report(eff, cases);
    REQUIRE(rows.size() == 3);

    SECTION("filtering trades probability for fidelity") {
        CHECK(rows[1].fidelity > rows[0].fidelity);
        CHECK(rows[1].p_four_click < rows[0].p_four_click);
    }
    SECTION("shaping recovers most of the probability") {
        CHECK(rows[2].p_four_click > 0.75 * rows[0].p_four_click);
        CHECK(rows[2].fidelity == Catch::Approx(0.68).epsilon(1e-12));
    }
    SECTION("retained energy folds into the memory efficiency") {
        Efficiencies folded = eff;
        folded.eta_mem *= 0.25;
        CHECK(rows[1].p_four_click ==
              Catch::Approx(four_click_probability(folded)).epsilon(1e-12));
    }
    SECTION("perfect inputs") {
        auto ideal = scenario_report({}, {{"ideal", 1.0, 1.0}});
        CHECK(ideal[0].p_four_click == 0.125);
        CHECK(ideal[0].fidelity == 1.0);
    }
    SECTION("repeater infidelity only lowers F") {
        auto degraded = scenario_report(eff, cases, 0.95);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(degraded[i].fidelity ==
                  Catch::Approx(0.95 * rows[i].fidelity).epsilon(1e-12));
            CHECK(degraded[i].p_four_click == rows[i].p_four_click);
        }
    }
    SECTION("text table lines up and JSON carries all rows") {
        const std::string table = format_report(rows);
        CHECK(table.find("shaped+filtered") != std::string::npos);
        CHECK(table.find("P_4cl") != std::string::npos);
        const std::string j = report_json(rows);
        CHECK(j.find("\"fidelity\"") != std::string::npos);
        CHECK(j.find("baseline") != std::string::npos);
    }
}
