// SPDX-License-Identifier: MIT
//
// Four-click heralding arithmetic for the two-chain network: the probability
// that all four detectors fire, the two-ion state this heralds, and its
// fidelity against the target Bell state, under losses, partial waveform
// overlap, and mixed photon states.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace afc {

// Per-photon efficiencies along the heralding chain, each the end-to-end
// survival probability of one photon. eta_mem covers the memory output
// including frequency conversion and fiber loss; it may optionally be split
// into the shaping and conversion factors, which then have to multiply back
// to eta_mem.
struct Efficiencies {
    double eta_det = 1.0;
    double eta_ion = 1.0;
    double eta_mem = 1.0;
    std::optional<double> eta_afc_shaping;
    std::optional<double> eta_qfc;

    void validate() const;  // all in [0,1]; split consistent when given
};

// Squared-modulus overlap between the interfering wavepackets on each side
// of the network (ion photon vs memory photon).
struct OverlapPair {
    double x_a = 1.0;
    double x_b = 1.0;

    void validate() const;  // both in [0,1]
};

// Two-ion polarization state in the basis {HH, HV, VH, VV}, restricted to
// one excitation per ion.
struct TwoQubitState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

    void validate() const;          // Hermitian, PSD, unit trace (1e-12)
    double fidelity_psi_plus() const;  // <Psi+|rho|Psi+>, Psi+ = (HV+VH)/sqrt(2)
};

// Probability that one heralding attempt produces all four clicks:
// eta_det^4 eta_ion^2 eta_mem^2 / 8. The 1/8 counts the 2 of 16 path
// combinations of the four excitations that can trigger the pattern.
double four_click_probability(const Efficiencies& eff);

// Density matrix heralded by a four-click event. Losses only rescale the
// probability, so the state depends on the overlaps alone:
// (1+x_a x_b)/2 on |Psi+> and (1-x_a x_b)/2 on |Psi->.
TwoQubitState heralded_state(const OverlapPair& x);

// <Psi+| heralded_state |Psi+> = (1 + x_a x_b)/2, without building the matrix.
double fidelity_pure(const OverlapPair& x);

// Fidelity when each side's photon is a mixture of shifted wavepackets.
// Inputs are the emission-conditioned mean overlaps per side, so the result
// (1 + a b)/2 equals (1 + V^2)/2 for the shared asymptotic visibility
// V = sqrt(a b).
double fidelity_mixed(double mean_overlap_a, double mean_overlap_b);

// One operating point of the network: the asymptotic visibility between the
// interfering photons and the fraction of memory-photon energy that survives
// shaping and spectral filtering (folded into eta_mem for the probability).
struct NetworkCase {
    std::string label;
    double v_infinity = 1.0;
    double retained_energy = 1.0;
};

struct ReportRow {
    std::string label;
    double p_four_click = 0.0;
    double fidelity = 0.0;
};

// Evaluates every case at the given efficiencies. repeater_fidelity is an
// upper-bound hook for imperfect repeater Bell pairs and multiplies into F.
std::vector<ReportRow> scenario_report(const Efficiencies& eff,
                                       const std::vector<NetworkCase>& cases,
                                       double repeater_fidelity = 1.0);

std::string format_report(const std::vector<ReportRow>& rows);  // aligned text
std::string report_json(const std::vector<ReportRow>& rows);

}  // namespace afc
