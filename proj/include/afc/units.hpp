// SPDX-License-Identifier: MIT
#pragma once

namespace afc {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Vacuum speed of light, m/s. The crystal's refractive index is ignored
// throughout; see README caveats.
inline constexpr double c_light = 299792458.0;

// Config files quote frequencies in plain Hz-derived units (key suffixes
// _mhz, _khz, _hz). Internally everything is angular (rad/s), so conversion
// happens exactly once, here.
constexpr double rad_from_hz(double f_hz) { return two_pi * f_hz; }
constexpr double rad_from_khz(double f_khz) { return two_pi * 1.0e3 * f_khz; }
constexpr double rad_from_mhz(double f_mhz) { return two_pi * 1.0e6 * f_mhz; }

constexpr double s_from_us(double t_us) { return 1.0e-6 * t_us; }
constexpr double s_from_ns(double t_ns) { return 1.0e-9 * t_ns; }

}  // namespace afc
