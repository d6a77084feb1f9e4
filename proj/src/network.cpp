// SPDX-License-Identifier: MIT
#include "afc/network.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "afc/errors.hpp"
#include "json.hpp"

namespace afc {

namespace {

void require_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void Efficiencies::validate() const {
    require_fraction(eta_det, "eta_det");
    require_fraction(eta_ion, "eta_ion");
    require_fraction(eta_mem, "eta_mem");
    if (eta_afc_shaping) require_fraction(*eta_afc_shaping, "eta_afc_shaping");
    if (eta_qfc) require_fraction(*eta_qfc, "eta_qfc");
    if (eta_afc_shaping && eta_qfc) {
        const double prod = *eta_afc_shaping * *eta_qfc;
        if (std::abs(prod - eta_mem) > 1e-9)
            throw ConfigError("eta_afc_shaping * eta_qfc does not reproduce eta_mem");
    }
}

void OverlapPair::validate() const {
    require_fraction(x_a, "x_a");
    require_fraction(x_b, "x_b");
}

void TwoQubitState::validate() const {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw NumericError("two-qubit state is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-12 ||
        std::abs(rho.trace().imag()) > 1e-12)
        throw NumericError("two-qubit state trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw NumericError("two-qubit state has a negative eigenvalue");
}

double TwoQubitState::fidelity_psi_plus() const {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(1) = psi(2) = 1.0 / std::sqrt(2.0);
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

double four_click_probability(const Efficiencies& eff) {
    eff.validate();
    const double d2 = eff.eta_det * eff.eta_det;
    return d2 * d2 * eff.eta_ion * eff.eta_ion * eff.eta_mem * eff.eta_mem / 8.0;
}

TwoQubitState heralded_state(const OverlapPair& x) {
    x.validate();
    // Equal populations on HV and VH; the overlaps only survive in the
    // coherence between them.
    TwoQubitState s;
    s.rho(1, 1) = s.rho(2, 2) = 0.5;
    s.rho(1, 2) = s.rho(2, 1) = 0.5 * x.x_a * x.x_b;
    return s;
}

double fidelity_pure(const OverlapPair& x) {
    x.validate();
    return 0.5 * (1.0 + x.x_a * x.x_b);
}

double fidelity_mixed(double mean_overlap_a, double mean_overlap_b) {
    require_fraction(mean_overlap_a, "mean overlap (side A)");
    require_fraction(mean_overlap_b, "mean overlap (side B)");
    return 0.5 * (1.0 + mean_overlap_a * mean_overlap_b);
}

std::vector<ReportRow> scenario_report(const Efficiencies& eff,
                                       const std::vector<NetworkCase>& cases,
                                       double repeater_fidelity) {
    eff.validate();
    require_fraction(repeater_fidelity, "repeater_fidelity");
    std::vector<ReportRow> rows;
    rows.reserve(cases.size());
    for (const auto& c : cases) {
        require_fraction(c.v_infinity, "v_infinity");
        require_fraction(c.retained_energy, "retained_energy");
        Efficiencies folded = eff;
        folded.eta_mem *= c.retained_energy;
        folded.eta_afc_shaping.reset();
        folded.eta_qfc.reset();
        rows.push_back({c.label, four_click_probability(folded),
                        fidelity_mixed(c.v_infinity, c.v_infinity) *
                            repeater_fidelity});
    }
    return rows;
}

std::string format_report(const std::vector<ReportRow>& rows) {
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-*s  %12s  %8s\n",
                  static_cast<int>(width), "case", "P_4cl", "F");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-*s  %12.4e  %8.4f\n",
                      static_cast<int>(width), r.label.c_str(), r.p_four_click,
                      r.fidelity);
        out << line;
    }
    return out.str();
}

std::string report_json(const std::vector<ReportRow>& rows) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        j.push_back({{"case", r.label},
                     {"p_four_click", r.p_four_click},
                     {"fidelity", r.fidelity}});
    return j.dump(2);
}

}  // namespace afc
