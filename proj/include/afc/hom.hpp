// SPDX-License-Identifier: MIT
//
// Hong-Ou-Mandel visibilities between photons described as mixtures of
// shifted pure wavepackets. The asymptotic (unbounded coincidence window)
// values have closed forms in the pairwise wavepacket overlaps; finite
// windows need the four coincidence integrals restricted to |t1 - t2| <= T,
// which are estimated with a low-discrepancy sampler.
//
// Both polarisations are assumed to carry the same wavepacket throughout,
// and all detectors the same efficiency, so polarisation never enters the
// formulas explicitly.
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "afc/waveform.hpp"

namespace afc {

// One pure wavepacket of the mixture: psi delayed by `shift`, carrying
// `weight` of the total probability mass.
struct MixedComponent {
    double weight = 0.0;  // probability mass
    double shift = 0.0;   // s, delay applied to psi
    Envelope psi;         // L2-normalized on its own grid
};

// rho = p0 |0><0| + sum_k weight_k |psi_k(. - s_k)><psi_k(. - s_k)|
struct MixedPhoton {
    double p0 = 0.0;  // vacuum probability
    std::vector<MixedComponent> components;

    // Earliest and latest time where any component is nonzero.
    double support_begin() const;
    double support_end() const;

    // Checks p0 + sum(weights) == 1 within 1e-9, weights >= 0, every psi
    // normalized within 1e-6, and shifts finite. Throws ConfigError.
    void validate() const;
};

// Coincidences count when the two clicks are delayed by at most t seconds.
struct CoincidenceWindow {
    double t = std::numeric_limits<double>::infinity();  // s

    bool is_infinite() const { return !(t < std::numeric_limits<double>::infinity()); }
    void validate() const;  // t > 0 or infinite
};

// One sample of the shift distribution P(s): probability mass at delay s.
// A point mass at s = 0 represents the unscattered component.
struct ShiftMass {
    double s = 0.0;
    double mass = 0.0;
};

// Builds the mixture p0 |0><0| + (1-p0) * normalized(distribution) of shifted
// copies of psi. An empty distribution means an unshifted pure photon. Zero
// masses are dropped; an all-zero distribution with p0 < 1 is rejected.
MixedPhoton build_mixture(const Envelope& psi, double p0,
                          const std::vector<ShiftMass>& distribution);

// |<b|a>|^2 for two normalized pure wavepackets (grids may differ).
double visibility_pure_pure(const Envelope& a, const Envelope& b);

// (1/(1-p0)) sum_k w_k |<pure|psi_k(. - s_k)>|^2, the fidelity between the
// pure photon and the mixture. Rejects mixtures that are all vacuum.
double visibility_pure_mixed(const Envelope& pure, const MixedPhoton& mixed);

// Unbounded-window visibility of two mixtures: the double sum of pairwise
// squared overlaps weighted by the (vacuum-excluded, renormalized) component
// masses. Reduces to the pure-pure and pure-mixed forms in the degenerate
// cases. Rejects photons that are all vacuum.
double visibility_mixed_mixed_asymptotic(const MixedPhoton& a, const MixedPhoton& b);

struct WindowedVisibility {
    double value = 0.0;
    double stderr_estimate = 0.0;  // batch-means standard error
    bool above_goal = false;       // stderr exceeded the requested goal
};

// Finite-window visibility 1 - (Det_hh + Det_vv)/(Det_vh + Det_hv) with all
// four coincidence integrals restricted to |t1 - t2| <= window.t.
//
// The strip is parameterized as (t1, t1 - t2) and sampled with a 2-D Sobol
// sequence; the same points are reused in 32 Cranley-Patterson rotations
// drawn from `seed`, giving the batch-means error estimate. `samples` is the
// point count per rotation (at least 1000). When stderr_goal > 0 and the
// estimate comes out above it, the result is flagged but still returned.
// `threads` > 1 evaluates rotations concurrently; results do not depend on it.
WindowedVisibility visibility_windowed(const MixedPhoton& a, const MixedPhoton& b,
                                       const CoincidenceWindow& window,
                                       std::size_t samples, std::uint64_t seed,
                                       double stderr_goal = 0.0, int threads = 1);

// JSON mixture file {p0, components: [{weight, shift_s, waveform_csv_path}]}
// with the waveform CSVs resolved relative to the JSON file's directory.
// save_mixture writes one "<stem>_component_<k>.csv" per component.
void save_mixture(const MixedPhoton& m, const std::string& json_path);
MixedPhoton load_mixture(const std::string& json_path);

}  // namespace afc
