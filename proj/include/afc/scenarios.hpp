// SPDX-License-Identifier: MIT
//
// End-to-end demonstration pipelines: storage-and-recall echo benchmarks
// (run_fig3, panels a/b/c for unshaped, plain-shaped and cropped-shaped
// readout) and the two-photon indistinguishability study built on top of
// them (run_fig4). Each run wires comb -> dynamics -> shaper -> filter and,
// for the interference study, hom -> network, and can emit its artifacts
// (waveform CSVs, a JSON summary, a reproducible run manifest) into a
// directory.
#pragma once

#include <string>
#include <vector>

#include "afc/config.hpp"
#include "afc/hom.hpp"
#include "afc/network.hpp"
#include "afc/shaper.hpp"
#include "afc/waveform.hpp"

namespace afc {

// Figures of merit for one echo benchmark. Efficiencies are energies in the
// readout window divided by the input energy; overlaps are
// |<target, out/sqrt(eta_out)>|^2 with the target unit-normalized, i.e. the
// squared modulus of the overlap with the emission-conditioned output mode.
struct PanelMetrics {
    double efficiency = 0.0;
    double overlap = 0.0;
    double efficiency_filtered = 0.0;
    double overlap_filtered = 0.0;
    double filter_retention = 1.0;  // filtered / unfiltered window energy

    double window_begin = 0.0;  // readout window, s
    double window_end = 0.0;
    double echo_peak_t = 0.0;   // |e_out| crest inside the window, s
    double echo_delay = 0.0;    // crest minus input crest, s
    double target_shift = 0.0;  // alignment shift applied to the target, s

    // Prompt-emission bookkeeping: the first echo should rise within one
    // readout spacing of the first readout pulse.
    double first_readout = 0.0;  // s
    double echo_onset = 0.0;     // s
    double onset_gap = 0.0;      // s
    bool prompt_emission = true;

    double r_predicted = 0.0;      // shaper's own overlap prediction (amplitude)
    double budget_deviation = 0.0; // energy-ledger drift of the solver
};

struct Fig3Result {
    char panel = 'a';
    PanelMetrics metrics;
    ShapingPlan plan;  // single full-release bin for panel a

    // Window restrictions on a coarse grid, unit-normalized; handy for
    // overlap/visibility post-processing and compact artifacts.
    Envelope output_window;
    Envelope output_filtered_window;
    Envelope target;  // what the overlap was scored against

    std::vector<std::string> warnings;
};

// Runs one echo benchmark. panel is 'a' (full recall, no shaping), 'b'
// (plain pulse shaping) or 'c' (cropped pulse shaping). A non-empty out_dir
// receives CSVs, summary.json and run_manifest.json.
Fig3Result run_fig3(char panel, const GlobalConfig& cfg,
                    const std::string& out_dir = "");

// One coincidence-window point of the visibility curves.
struct VisibilityPoint {
    double window = 0.0;  // s
    WindowedVisibility unshaped_pure;
    WindowedVisibility unshaped_mixed;
    WindowedVisibility shaped_pure;
    WindowedVisibility shaped_mixed;
};

struct Fig4Result {
    std::vector<VisibilityPoint> points;

    // Unbounded-window values for the same four pairings.
    double v_inf_unshaped_pure = 0.0;
    double v_inf_unshaped_mixed = 0.0;
    double v_inf_shaped_pure = 0.0;
    double v_inf_shaped_mixed = 0.0;

    // Alignment shifts applied to the reference photon, s.
    double offset_unshaped = 0.0;
    double offset_shaped = 0.0;

    std::vector<ReportRow> report;  // heralding probability / fidelity rows
    bool used_synthetic_reference = false;

    PanelMetrics unshaped_metrics;  // the underlying echo runs
    PanelMetrics shaped_metrics;

    std::vector<std::string> warnings;
};

// Indistinguishability study: echo photons (unshaped and cropped-shaped,
// spectrally filtered) against a reference single photon, pure and mixed,
// over the configured coincidence windows, plus the heralding report.
// Reference waveforms come from hom.ion_pure_file / hom.ion_mixture_file
// when set; otherwise a synthetic stand-in is used and flagged in warnings.
Fig4Result run_fig4(const GlobalConfig& cfg, const std::string& out_dir = "");

// The canonical shaping target: an asymmetric two-sided exponential with the
// configured rise/fall ratio and intensity FWHM, restricted to the shaping
// window and unit-normalized there. Exposed for tests and the shape command.
Envelope make_shaping_target(const GlobalConfig& cfg);

// Amplitude standard deviation of the configured input, s. Sets the readout
// bin widths (plain: shaping.bin_width_us or 4.5 sigma; cropped: 2 M sigma).
double input_sigma_amp(const GlobalConfig& cfg);

// Writes run_manifest.json ({"meta": ..., "config": ...}) into dir. The
// manifest reloads through load_config(), reproducing the run.
void write_run_manifest(const std::string& dir, const GlobalConfig& cfg,
                        const std::string& scenario);

}  // namespace afc
