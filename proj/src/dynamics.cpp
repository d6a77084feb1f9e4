// SPDX-License-Identifier: MIT
#include "afc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "afc/detail/rk8_tableau.hpp"
#include "afc/errors.hpp"
#include "afc/units.hpp"

namespace afc {

namespace {

// Complex product spelled out to keep the hot loops free of the library's
// inf/nan promotion path.
inline cplx cmul(cplx x, cplx y) {
    return {x.real() * y.real() - x.imag() * y.imag(),
            x.real() * y.imag() + x.imag() * y.real()};
}

// i * s * z for real s.
inline cplx imul(double s, cplx z) { return {-s * z.imag(), s * z.real()}; }

struct StepPulse {
    std::size_t first_step = 0;
    std::size_t last_step = 0;  // exclusive
    cplx omega;                 // rabi * exp(i phase), area-preserving rescale
};

}  // namespace

void PulseSchedule::validate() const {
    double prev_end = -std::numeric_limits<double>::infinity();
    double prev_start = prev_end;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const ControlPulse& p = pulses[i];
        if (!(p.duration > 0.0))
            throw ConfigError("PulseSchedule: pulse " + std::to_string(i) +
                              " has non-positive duration");
        if (!(p.start > prev_start) && i > 0)
            throw ConfigError("PulseSchedule: pulse starts must strictly increase "
                              "(pulse " + std::to_string(i) + ")");
        if (p.start < prev_end - 1e-15)
            throw ConfigError("PulseSchedule: pulse " + std::to_string(i) +
                              " overlaps the previous one");
        prev_start = p.start;
        prev_end = p.start + p.duration;
    }
}

double PulseSchedule::min_duration() const {
    double m = std::numeric_limits<double>::infinity();
    for (const ControlPulse& p : pulses) m = std::min(m, p.duration);
    return m;
}

double max_step_allowed(const MemoryParams& params, const PulseSchedule& schedule) {
    if (!(params.kappa > 0.0)) throw ConfigError("max_step_allowed: kappa must be positive");
    double limit = 1.0 / (20.0 * params.kappa);
    const double tau = schedule.min_duration();
    if (std::isfinite(tau)) limit = std::min(limit, tau / 20.0);
    const double wmax = params.comb.max_abs_omega();
    if (wmax > 0.0) limit = std::min(limit, two_pi / (20.0 * wmax));
    return limit;
}

SimOutput simulate(const MemoryParams& params, const Envelope& input,
                   const PulseSchedule& schedule, const TimeGrid& grid,
                   const SimOptions& opts) {
    grid.validate();
    schedule.validate();
    if (!(params.kappa > 0.0)) throw ConfigError("simulate: kappa must be positive");
    if (params.g_sqrt_n < 0.0) throw ConfigError("simulate: g sqrt N must be >= 0");
    if (params.gamma_p < 0.0 || params.gamma_s < 0.0)
        throw ConfigError("simulate: decay rates must be >= 0");
    const std::size_t K = params.comb.size();
    if (K == 0 || params.comb.weights.size() != K)
        throw ConfigError("simulate: empty or inconsistent comb grid");
    {
        double total = 0.0;
        for (double w : params.comb.weights) {
            if (w < 0.0) throw ConfigError("simulate: negative comb weight");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-6)
            throw ConfigError("simulate: comb weights sum to " + std::to_string(total) +
                              ", expected 1");
    }

    // Step-size rule, with the binding scale named in the diagnostic.
    {
        const double l_cav = 1.0 / (20.0 * params.kappa);
        const double tau = schedule.min_duration();
        const double l_pulse = std::isfinite(tau) ? tau / 20.0
                                                  : std::numeric_limits<double>::infinity();
        const double wmax = params.comb.max_abs_omega();
        const double l_comb = wmax > 0.0 ? two_pi / (20.0 * wmax)
                                         : std::numeric_limits<double>::infinity();
        const double limit = std::min({l_cav, l_pulse, l_comb});
        if (grid.dt > limit * (1.0 + 1e-9)) {
            const char* binding = (limit == l_cav) ? "cavity decay 1/(20 kappa)"
                                  : (limit == l_pulse) ? "pulse duration tau/20"
                                                       : "comb detuning 2 pi/(20 max|omega|)";
            throw ConfigError("simulate: step " + std::to_string(grid.dt) +
                              " s exceeds the " + std::string(binding) + " limit of " +
                              std::to_string(limit) + " s");
        }
    }

    // Input on the simulation grid; the solver sees its piecewise-linear
    // interpolant, which is exactly what the budget quadrature integrates.
    Envelope ein;
    if (input.grid.same_as(grid)) {
        ein = input;
    } else {
        ein = resample(input, grid).out;
    }
    {
        double peak = 0.0;
        for (const cplx& z : ein.a) peak = std::max(peak, std::abs(z));
        if (peak > 0.0 && std::abs(ein.a.front()) > 1e-5 * peak)
            throw ConfigError("simulate: input envelope must vanish at the grid start");
    }

    const std::size_t n_steps = grid.n - 1;
    const double dt = grid.dt;

    // Snap pulse edges to grid nodes, rescaling the Rabi amplitude so the
    // pulse area is preserved exactly.
    std::vector<StepPulse> steppulses;
    steppulses.reserve(schedule.pulses.size());
    for (std::size_t i = 0; i < schedule.pulses.size(); ++i) {
        const ControlPulse& p = schedule.pulses[i];
        const auto i0 = static_cast<long long>(std::llround((p.start - grid.t0) / dt));
        const auto i1 =
            static_cast<long long>(std::llround((p.start + p.duration - grid.t0) / dt));
        if (i0 < 0 || i1 > static_cast<long long>(n_steps))
            throw ConfigError("simulate: pulse " + std::to_string(i) +
                              " falls outside the time grid");
        if (i1 <= i0)
            throw ConfigError("simulate: pulse " + std::to_string(i) +
                              " is shorter than one grid step");
        StepPulse sp;
        sp.first_step = static_cast<std::size_t>(i0);
        sp.last_step = static_cast<std::size_t>(i1);
        const double snapped = static_cast<double>(i1 - i0) * dt;
        const double rabi_eff = p.rabi * p.duration / snapped;
        sp.omega = std::polar(rabi_eff, p.phase);
        if (!steppulses.empty() && sp.first_step < steppulses.back().last_step)
            throw ConfigError("simulate: pulses " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " overlap after grid snapping");
        steppulses.push_back(sp);
    }

    using detail::rk8_a;
    using detail::rk8_b;
    using detail::rk8_c;
    using detail::rk8_stages;

    // Per-class constants.
    std::vector<double> rootw(K);       // sqrt(n_k)
    std::vector<cplx> pole(K);          // -(gamma_P + i omega_k)
    for (std::size_t k = 0; k < K; ++k) {
        rootw[k] = std::sqrt(params.comb.weights[k]);
        pole[k] = cplx(-params.gamma_p, -params.comb.omegas[k]);
    }
    const double g = params.g_sqrt_n;
    const double root2k = std::sqrt(2.0 * params.kappa);
    const double kappa = params.kappa;
    const double gamma_s = params.gamma_s;

    // dt-scaled tableau with per-stage nonzero column lists.
    double adt[rk8_stages][rk8_stages];
    int nz[rk8_stages][rk8_stages];
    int nnz[rk8_stages];
    for (int i = 0; i < rk8_stages; ++i) {
        nnz[i] = 0;
        for (int j = 0; j < i; ++j) {
            adt[i][j] = dt * rk8_a[i][j];
            if (rk8_a[i][j] != 0.0) nz[i][nnz[i]++] = j;
        }
    }
    double bdt[rk8_stages];
    for (int i = 0; i < rk8_stages; ++i) bdt[i] = dt * rk8_b[i];

    // State and stage slabs, class-major so each class's stages are adjacent.
    cplx E(0.0);
    std::vector<cplx> P(K, cplx(0.0)), S(K, cplx(0.0));
    std::vector<cplx> kP(K * rk8_stages), kS(K * rk8_stages);
    cplx kE[rk8_stages];
    double kIout[rk8_stages], kIin[rk8_stages];
    double i_out = 0.0, i_in = 0.0;

    SimOutput out;
    out.e_in = ein;
    out.e_out.grid = grid;
    out.e_out.a.assign(grid.n, cplx(0.0));
    out.e_out.a[0] = -ein.a[0];  // E(0) = 0

    const std::size_t stride =
        opts.trace_stride > 0 ? static_cast<std::size_t>(opts.trace_stride) : 1;

    double sumP2 = 0.0, sumS2 = 0.0;
    double max_dev = 0.0;

    auto record = [&](std::size_t node) {
        const double t = grid.time(node);
        const double state2 = std::norm(E) + sumP2 + sumS2;
        if (node % stride == 0 || node == grid.n - 1) {
            out.state_trace.push_back({t, E, sumP2, sumS2});
            out.budget.push_back({t, std::norm(E), sumP2, sumS2, i_out, -i_in});
        }
        const double dev = std::abs(state2 + i_out - i_in);
        if (dev > max_dev) max_dev = dev;
    };
    record(0);

    std::size_t pulse_idx = 0;
    bool spin_touched = false;

    for (std::size_t n = 0; n < n_steps; ++n) {
        while (pulse_idx < steppulses.size() && n >= steppulses[pulse_idx].last_step)
            ++pulse_idx;
        cplx omega(0.0);
        if (pulse_idx < steppulses.size() && n >= steppulses[pulse_idx].first_step &&
            n < steppulses[pulse_idx].last_step)
            omega = steppulses[pulse_idx].omega;

        const bool driving = omega != cplx(0.0);
        const bool spin_active = driving || (gamma_s > 0.0 && spin_touched);
        if (driving) spin_touched = true;

        const cplx half_i_omega = imul(0.5, omega);
        const cplx half_i_omega_c = imul(0.5, std::conj(omega));
        const cplx ein0 = ein.a[n];
        const cplx ein1 = ein.a[n + 1];

        for (int st = 0; st < rk8_stages; ++st) {
            // Cavity stage value (scalar chain).
            cplx Ei = E;
            for (int m = 0; m < nnz[st]; ++m) Ei += adt[st][nz[st][m]] * kE[nz[st][m]];

            const double ci = rk8_c[st];
            const cplx ein_i = (1.0 - ci) * ein0 + ci * ein1;

            cplx sum_rootw_P(0.0);

            if (spin_active) {
                for (std::size_t k = 0; k < K; ++k) {
                    cplx* slabP = &kP[k * rk8_stages];
                    cplx* slabS = &kS[k * rk8_stages];
                    cplx accP = P[k];
                    cplx accS = S[k];
                    for (int m = 0; m < nnz[st]; ++m) {
                        const int j = nz[st][m];
                        const double w = adt[st][j];
                        accP += w * slabP[j];
                        accS += w * slabS[j];
                    }
                    sum_rootw_P += rootw[k] * accP;
                    slabP[st] = cmul(pole[k], accP) + imul(g * rootw[k], Ei) +
                                cmul(half_i_omega, accS);
                    slabS[st] = -gamma_s * accS + cmul(half_i_omega_c, accP);
                }
            } else {
                for (std::size_t k = 0; k < K; ++k) {
                    cplx* slabP = &kP[k * rk8_stages];
                    cplx accP = P[k];
                    for (int m = 0; m < nnz[st]; ++m)
                        accP += adt[st][nz[st][m]] * slabP[nz[st][m]];
                    sum_rootw_P += rootw[k] * accP;
                    slabP[st] = cmul(pole[k], accP) + imul(g * rootw[k], Ei);
                }
            }

            kE[st] = -kappa * Ei + imul(g, sum_rootw_P) + root2k * ein_i;
            kIout[st] = std::norm(root2k * Ei - ein_i);
            kIin[st] = std::norm(ein_i);
        }

        // Combine stages.
        for (int st = 0; st < rk8_stages; ++st) {
            E += bdt[st] * kE[st];
            i_out += bdt[st] * kIout[st];
            i_in += bdt[st] * kIin[st];
        }
        sumP2 = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            cplx* slabP = &kP[k * rk8_stages];
            cplx acc = P[k];
            for (int st = 0; st < rk8_stages; ++st) acc += bdt[st] * slabP[st];
            P[k] = acc;
            sumP2 += std::norm(acc);
        }
        if (spin_active) {
            sumS2 = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                cplx* slabS = &kS[k * rk8_stages];
                cplx acc = S[k];
                for (int st = 0; st < rk8_stages; ++st) acc += bdt[st] * slabS[st];
                S[k] = acc;
                sumS2 += std::norm(acc);
            }
        }

        const std::size_t node = n + 1;
        out.e_out.a[node] = root2k * E - ein.a[node];
        record(node);

        if ((node & 0xfff) == 0 || node == grid.n - 1) {
            if (!std::isfinite(E.real()) || !std::isfinite(E.imag()) ||
                !std::isfinite(sumP2))
                throw NumericError("simulate: non-finite state at t = " +
                                   std::to_string(grid.time(node)) + " s");
        }
    }

    out.input_energy = i_in;
    out.max_budget_deviation = max_dev;

    // The budget history stored -incoming so far; convert to energy remaining
    // after t now that the total is known.
    for (BudgetSample& b : out.budget) b.incoming += i_in;
    return out;
}

double energy_budget(const SimOutput& out) { return out.max_budget_deviation; }

double window_efficiency(const SimOutput& out, double t1, double t2) {
    if (!(t2 > t1)) throw ConfigError("window_efficiency: need t2 > t1");
    const TimeGrid& g = out.e_out.grid;
    if (t1 < g.t0 - 0.5 * g.dt || t2 > g.t_end() + 0.5 * g.dt)
        throw ConfigError("window_efficiency: window outside the simulation grid");
    if (!(out.input_energy > 0.0))
        throw NumericError("window_efficiency: zero input energy");

    const auto lo = static_cast<std::size_t>(
        std::max(0.0, std::ceil((t1 - g.t0) / g.dt - 1e-9)));
    const auto hi = static_cast<std::size_t>(
        std::min(static_cast<double>(g.n - 1), std::floor((t2 - g.t0) / g.dt + 1e-9)));
    if (hi <= lo) return 0.0;
    double s = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) s += std::norm(out.e_out.a[i]);
    s -= 0.5 * (std::norm(out.e_out.a[lo]) + std::norm(out.e_out.a[hi]));
    return s * g.dt / out.input_energy;
}

double analytic_eta_abs(double x) {
    if (x < 0.0) throw ConfigError("analytic_eta_abs: ratio must be >= 0");
    const double d = 1.0 + x;
    return 4.0 * x / (d * d);
}

double analytic_eta_first_echo(double x, double eta_f, double gamma_p, double delta) {
    if (x < 0.0 || eta_f < 0.0 || gamma_p < 0.0 || !(delta > 0.0))
        throw ConfigError("analytic_eta_first_echo: arguments out of range");
    const double d = 1.0 + x;
    const double matched = 16.0 * x * x / (d * d * d * d);
    return eta_f * matched * std::exp(-2.0 * gamma_p * two_pi / delta);
}

double rabi_transfer(double omega_detuning, double rabi, double duration) {
    if (duration < 0.0) throw ConfigError("rabi_transfer: negative duration");
    const double y2 = rabi * rabi + omega_detuning * omega_detuning;
    const double x = 0.5 * std::sqrt(y2) * duration;
    double sinc;
    if (std::abs(x) < 1e-8) {
        sinc = 1.0 - x * x / 6.0;
    } else {
        sinc = std::sin(x) / x;
    }
    const double amp = 0.5 * rabi * duration * sinc;
    return amp * amp;
}

}  // namespace afc
