// SPDX-License-Identifier: MIT
//
// Run configuration: a strict, flat-sectioned document mapped onto the domain
// modules. Every physical quantity carries its unit in the key name (_mhz,
// _khz, _us, _ns, _mm); values convert to SI/angular exactly once, in the
// to_* bridges at the bottom. Unknown keys are rejected so typos fail loudly
// instead of silently running defaults.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afc/comb.hpp"
#include "afc/dynamics.hpp"
#include "afc/network.hpp"

namespace afc {

// Cavity-memory physics plus the mirror/crystal geometry consumed by the
// parameter-derivation command.
struct MemorySection {
    double kappa_mhz = 55.0;      // cavity linewidth kappa / 2pi
    double g_sqrt_n_mhz = 0.0;    // collective coupling / 2pi; 0 = impedance-matched
    double optical_t2_us = 152.0; // optical coherence time; 0 disables decay
    double spin_t2_us = 0.0;      // spin coherence time; 0 disables decay
    double cavity_r1 = 0.4;       // input-coupler intensity reflectivity
    double cavity_r2 = 0.97;      // back-mirror intensity reflectivity
    double cavity_length_mm = 208.0;
    double crystal_length_mm = 3.0;
    double d_tilde = 0.48;        // round-trip integrated absorption

    void validate() const;
};

struct CombSection {
    std::string envelope_shape = "rectangular";  // rectangular | gaussian | lorentzian
    double envelope_width_mhz = 4.0;             // rect: full width; gauss: std; lorentz: HWHM
    std::string tooth_shape = "gaussian";        // dirac | rectangular | gaussian | lorentzian
    double tooth_width_khz = 1.0;
    double tooth_spacing_khz = 610.0;
    int n_teeth = 7;
    int classes_per_tooth = 7;  // odd; 1 only for dirac teeth

    void validate() const;
};

struct InputSection {
    std::string shape = "gaussian";  // gaussian | exponential | file
    double center_us = 1.0;          // crest arrival time
    double intensity_fwhm_ns = 330.0;
    double decay_us = 0.2;           // exponential shape only
    std::string file;                // CSV path when shape = file

    void validate() const;
};

struct ShapingSection {
    int n_bins = 20;
    double tau_us = 0.03;          // control pulse duration
    double bin_width_us = 0.0;     // plain mode; 0 = auto (4.5 sigma of the input)
    double crop_m = 1.3;           // cropped mode: bins are 2 m sigma wide
    double window_start_us = 3.2;  // first readout bin edge
    double storage_gap_us = 0.5;   // input crest -> storage pulse start
    bool sync = true;              // emit the synchronization pulse pair
    double target_fwhm_us = 6.0;   // synthetic target intensity FWHM
    double target_rise_us = 1.0;   // synthetic target rise/fall ratio
    double target_fall_us = 2.5;
    std::string target_file;       // CSV target instead of the synthetic one

    void validate() const;
};

struct FilterSection {
    bool enabled = true;
    double half_width_mhz = 0.15;  // sharp cutoff at center +- half width
    double center_mhz = 0.0;

    void validate() const;
};

struct HomSection {
    int samples = 4096;  // QMC points per window estimate
    std::vector<double> windows_us = {0.75, 1.5, 3.0, 6.0, 12.0, 24.0};
    double stderr_goal = 0.0;   // 0 = fixed sample count
    double mixed_p0 = 0.25;     // vacuum weight of the synthetic ion mixture
    int mixed_shifts = 6;       // shifted copies in the synthetic mixture
    double mixed_shift_us = 0.8;
    double mixed_decay = 0.4;   // mass of copy k scales as exp(-decay * k)
    std::string ion_pure_file;     // CSV waveform; empty = synthetic stand-in
    std::string ion_mixture_file;  // mixture JSON; empty = synthetic stand-in

    void validate() const;
};

struct NetworkSection {
    double eta_detection = 0.9;
    double eta_ion_collection = 0.1;
    double eta_memory = 0.0;  // 0 = take the simulated memory efficiency
    double v_infinity = 1.0;  // standalone network command only
    double repeater_fidelity = 1.0;

    void validate() const;
};

struct RunSection {
    std::uint64_t seed = 7;
    int threads = 1;
    std::string out_dir = "out";
    double dt_ns = 0.125;   // integration step
    int trace_stride = 200; // state-trace decimation

    void validate() const;
};

struct GlobalConfig {
    MemorySection memory;
    CombSection comb;
    InputSection input;
    ShapingSection shaping;
    FilterSection filter;
    HomSection hom;
    NetworkSection network;
    RunSection run;

    void validate() const;
};

// Defaults reproduce the Pr:YSO benchmark memory.
GlobalConfig default_config();

// Strict parse: unknown keys or wrong value types raise ConfigError naming
// the offending "section.key" and the expected unit. Sections and keys are
// all optional; omitted ones keep their defaults.
GlobalConfig config_from_json(const std::string& text);

// Reads a config file. A run manifest (an object carrying a "config" member)
// is accepted too, so re-running from a manifest reproduces the run.
GlobalConfig load_config(const std::string& path);

// Canonical serialization: every key, fixed order, 2-space indent.
std::string config_json(const GlobalConfig& cfg);

// FNV-1a hash of the canonical serialization, hex-encoded. Stable across
// runs, used to stamp manifests.
std::string config_hash(const GlobalConfig& cfg);

// --- bridges into the domain types (the one place units convert) ---

// Comb description in angular units.
CombSpec to_comb_spec(const GlobalConfig& cfg);

// Memory parameters with the comb grid built in. A zero g_sqrt_n_mhz picks
// the impedance-matched coupling for the configured envelope. Build warnings
// (bandwidth/resolution guidance) append to `warnings` when given.
MemoryParams to_memory_params(const GlobalConfig& cfg,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace afc
