// SPDX-License-Identifier: MIT
//
// Complex single-photon envelopes on uniform time grids: generators, inner
// products, spectral box filtering, resampling, and CSV I/O. Envelopes carry
// amplitudes in units of s^(-1/2), so |a(t)|^2 integrates to a probability.
// All L2 quantities use the trapezoidal rule on the grid.
#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace afc {

using cplx = std::complex<double>;

// Uniform sampling times t_i = t0 + i*dt for i in [0, n).
struct TimeGrid {
    double t0 = 0.0;    // s
    double dt = 0.0;    // s
    std::size_t n = 0;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double t_end() const { return n ? time(n - 1) : t0; }
    double span() const { return n ? static_cast<double>(n - 1) * dt : 0.0; }

    // Grids are interchangeable when t0, dt and n agree to relative 1e-12.
    bool same_as(const TimeGrid& o) const;

    // Throws ConfigError unless dt > 0, n >= 2 and the span is finite.
    void validate() const;
};

struct Envelope {
    TimeGrid grid;
    std::vector<cplx> a;  // one sample per grid point, s^(-1/2)

    // Trapezoidal integral of |a|^2 over the grid.
    double norm2() const;

    // Linear interpolation at an arbitrary time, zero outside the grid. Times
    // within a millionth of a sample of the grid edges count as inside, so
    // endpoints evaluated through rounded arithmetic keep their sample value.
    cplx value_at(double t) const;

    Envelope& scale(cplx factor);

    // Rescales so norm2() == 1. Throws NumericError on a (near-)zero envelope.
    Envelope& normalize();
};

struct SpectralBoxFilter {
    double half_width = 0.0;  // rad/s
    double center = 0.0;      // rad/s
};

// Gaussian amplitude whose intensity |a|^2 has the requested FWHM, centered
// at `center`, L2-normalized on the grid.
Envelope make_gaussian(const TimeGrid& grid, double center, double intensity_fwhm);

// One-sided decaying exponential starting at `start`: a(t) proportional to
// exp(-(t-start)/decay) for t >= start, zero before, L2-normalized.
Envelope make_exponential(const TimeGrid& grid, double start, double decay);

// Asymmetric profile with exponential rise and exponential fall joined at the
// peak (placed at the middle of the grid). `rise` and `fall` fix the shape
// ratio; both are rescaled together so the intensity FWHM equals `fwhm`.
// Requires rise <= fall. Stand-in for emitter waveforms supplied as files.
Envelope make_asymmetric_ion_like(const TimeGrid& grid, double rise, double fall,
                                  double fwhm);

// Trapezoidal inner product  integral of conj(a)*b dt. Grids must match; call
// resample() explicitly when they do not.
cplx overlap(const Envelope& a, const Envelope& b);

struct FilterResult {
    Envelope out;
    double retained_energy = 0.0;  // output energy / input energy, in [0, 1]
};

// DFT -> zero all bins outside [center - half_width, center + half_width]
// (sharp indicator, no apodization) -> inverse DFT. Rejects grids whose
// spectral resolution 2*pi/(n*dt) is coarser than half_width/10.
FilterResult box_filter(const Envelope& e, const SpectralBoxFilter& f);

enum class ResampleMethod { linear, band_limited };

struct ResampleResult {
    Envelope out;
    // Target grid reached beyond the source span; the outside was zero-filled.
    bool clipped = false;
};

// Interpolates onto `target`. Downsampling below the Nyquist rate of the
// envelope content is rejected. band_limited evaluates the periodic DFT
// interpolant (cost O(n*m)); linear is the default everywhere.
ResampleResult resample(const Envelope& e, const TimeGrid& target,
                        ResampleMethod method = ResampleMethod::linear);

// CSV with header "t,re,im", SI seconds, uniform spacing; %.17g formatting so
// a save/load round trip is exact to double precision.
void save_csv(const Envelope& e, const std::string& path);
Envelope load_csv(const std::string& path);

}  // namespace afc
