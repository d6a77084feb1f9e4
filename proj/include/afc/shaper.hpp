// SPDX-License-Identifier: MIT
//
// Piecewise waveform shaping: a target envelope on [a, b] is approximated by
// bin-wise weighted, phase-shifted copies of the memory's natural echo shape.
// The closed-form optimum follows from Cauchy-Schwarz on the per-bin overlap
// vector, and the absolute weights translate into a chain of partial readout
// pulses for the memory.
#pragma once

#include <string>
#include <vector>

#include "afc/dynamics.hpp"
#include "afc/waveform.hpp"

namespace afc {

struct BinLayout {
    double a = 0.0;       // shaping window start
    double b = 0.0;       // shaping window end
    int n_shape = 1;      // number of bins tiling [a, b]
    double offset = 0.0;  // manual center shift, occasionally useful at small n

    double bin_width() const { return (b - a) / n_shape; }
    double center(int j) const { return a + (j + 0.5) * bin_width() + offset; }
    void validate() const;
};

struct ShapingPlan {
    BinLayout layout;
    std::vector<double> p;      // absolute amplitudes, sum of squares 1
    std::vector<double> theta;  // phases applied to the readout pulses
    std::vector<double> q;      // relative amplitudes, q.back() = 1
    std::vector<double> areas;  // pulse areas 2 arcsin(q_j), in [0, pi]
    double r_predicted = 0.0;   // overlap the plan should achieve

    void validate() const;
};

// Crop window [alpha, beta] for the input piece, with the dimensionless
// factor m recording how the bounds were derived (gaussian: +-m sigma around
// the center; exponential: [0, m / decay_rate]).
struct CropSpec {
    double m = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    double width() const { return beta - alpha; }
    void validate() const;
};

enum class ScheduleMode { plain, cropped };

// Per-bin overlaps J_j between the conjugated target and the input shape
// translated to each bin center, by trapezoid quadrature on the target grid.
// h_in is addressed relative to its own time axis (a shape centered near 0),
// and reads as zero outside its grid. Unless crop is set, the h_in grid span
// must fit inside one bin.
std::vector<cplx> bin_overlaps(const Envelope& target, const Envelope& h_in,
                               const BinLayout& layout, bool crop = false);

struct WeightSolution {
    std::vector<double> p;
    std::vector<double> theta;
    double r = 0.0;
};

// Closed-form optimum: p_j = |J_j| / sqrt(sum |J|^2), theta_j = -Arg J_j,
// and the achieved overlap r = sqrt(sum |J|^2).
WeightSolution optimal_weights(const std::vector<cplx>& j_overlaps);

// Sequential-emission conversion: q_j^2 is the fraction of the amplitude
// still stored that bin j releases. Computed from suffix sums so the last
// nonzero bin gets exactly q = 1.
std::vector<double> absolute_to_relative(const std::vector<double>& p);

// Pulse areas 2 arcsin(q_j); a full release (q = 1) is a pi pulse.
std::vector<double> relative_to_areas(const std::vector<double>& q);

// Assembles a full plan for a target and input shape.
ShapingPlan make_plan(const Envelope& target, const Envelope& h_in,
                      const BinLayout& layout, bool crop = false);

// Pulse-time bookkeeping for schedule construction. Times are pulse starts;
// the effective rotation is taken at each pulse center.
struct ReadoutTiming {
    double t_input = 0.0;     // crest arrival of the stored photon
    double t_storage = 0.0;   // storage pulse start
    double rephasing = 0.0;   // 2 pi / delta of the comb
    double sync_start = -1.0; // first synchronization pulse start; < 0 disables
};

// Storage pulse, the optional synchronization pair, then one partial readout
// per bin. The sync separation is set so each released piece starts right at
// its bin edge: time parked in the spin state replaces all but half a bin
// (plus half a pulse) of the remaining rephasing delay. Without the pair the
// readout times absorb the full remaining delay instead.
PulseSchedule build_readout_schedule(const ShapingPlan& plan, double tau,
                                     ScheduleMode mode, const ReadoutTiming& timing,
                                     const CropSpec* crop = nullptr,
                                     std::vector<std::string>* warnings = nullptr);

// Large-n overlap limit (1/sqrt(beta-alpha)) |integral of h_in over the crop
// window|. The proof behind it assumes a real, single-signed h_in; other
// inputs are still evaluated but flagged through `warnings`.
double asymptotic_overlap(const Envelope& h_in, const CropSpec& crop,
                          std::vector<std::string>* warnings = nullptr);

// Closed forms for the two worked crop families: a unit-norm gaussian cut at
// +-m sigma, and the unit exponential cut at m decay times.
double gaussian_crop_overlap(double m);
double exponential_crop_overlap(double m);

// Gaussian overlap renormalized by the energy surviving the crop; tends to 1
// as m -> 0.
double renormalized_asymptotic_overlap(double m);

// Energy fraction surviving a +-m sigma gaussian crop.
double gaussian_crop_energy(double m);

enum class CropFamily { gaussian, exponential };

struct CropOptimum {
    double m = 0.0;
    double value = 0.0;
};

// Golden-section maximization of the asymptotic overlap over m in (0, 10].
CropOptimum optimize_crop(CropFamily family);

// JSON document with the layout, weights, phases, areas, and predicted
// overlap, for reproducibility.
std::string shaping_plan_json(const ShapingPlan& plan);

}  // namespace afc
