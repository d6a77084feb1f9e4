// SPDX-License-Identifier: MIT
//
// Internal helper shared by the shaper and HOM translation units.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include "afc/waveform.hpp"

namespace afc {
namespace detail {

// Trapezoid of f over [left, right] on the grid's nodes, with the partial
// edge segments evaluated at the exact bounds.
template <typename F>
cplx integrate_window(const TimeGrid& g, double left, double right, F&& f) {
    if (!(right > left)) return cplx(0.0);
    const double lo = std::max(left, g.t0);
    const double hi = std::min(right, g.t_end());
    if (!(hi > lo)) return cplx(0.0);

    const auto i0 = static_cast<std::size_t>(
        std::max(0.0, std::ceil((lo - g.t0) / g.dt - 1e-9)));
    const auto i1 = static_cast<std::size_t>(std::min(
        static_cast<double>(g.n - 1), std::floor((hi - g.t0) / g.dt + 1e-9)));

    if (i0 > i1)  // window narrower than one grid cell
        return 0.5 * (f(lo) + f(hi)) * (hi - lo);

    cplx acc(0.0);
    cplx prev = f(g.time(i0));
    const double lead = g.time(i0) - lo;
    if (lead > 1e-12 * g.dt) acc += 0.5 * (f(lo) + prev) * lead;
    for (std::size_t i = i0; i < i1; ++i) {
        const cplx next = f(g.time(i + 1));
        acc += 0.5 * (prev + next) * g.dt;
        prev = next;
    }
    const double tail = hi - g.time(i1);
    if (tail > 1e-12 * g.dt) acc += 0.5 * (prev + f(hi)) * tail;
    return acc;
}

}  // namespace detail
}  // namespace afc
