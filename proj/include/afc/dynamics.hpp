// SPDX-License-Identifier: MIT
//
// Time integration of the scalar cavity-memory equations
//
//   dE/dt   = -kappa E + i g sqrt(N) sum_k sqrt(n_k) P_k + sqrt(2 kappa) E_in(t)
//   dP_k/dt = -(gamma_P + i omega_k) P_k + i g sqrt(N) sqrt(n_k) E + (i/2) Omega(t) S_k
//   dS_k/dt = -gamma_S S_k + (i/2) conj(Omega(t)) P_k
//   E_out   = sqrt(2 kappa) E - E_in
//
// from zero initial conditions, with rectangular control pulses, using a
// fixed-step explicit Runge-Kutta scheme of order 8. Fixed steps keep pulse
// edges on grid nodes, so Omega is exactly constant within every step.
#pragma once

#include <vector>

#include "afc/comb.hpp"
#include "afc/waveform.hpp"

namespace afc {

struct MemoryParams {
    double kappa = 0.0;     // cavity field decay rate, rad/s
    double g_sqrt_n = 0.0;  // collective coupling, rad/s
    double gamma_p = 0.0;   // optical coherence decay, 1/s
    double gamma_s = 0.0;   // spin coherence decay, 1/s
    CombGrid comb;
};

enum class PulseKind { storage, synchronization, readout };

// Rectangular control pulse: Omega(t) = rabi * exp(i phase) while
// start <= t < start + duration, zero otherwise.
struct ControlPulse {
    double start = 0.0;     // s
    double duration = 0.0;  // s
    double rabi = 0.0;      // rad/s
    double phase = 0.0;     // rad
    PulseKind kind = PulseKind::readout;
};

struct PulseSchedule {
    std::vector<ControlPulse> pulses;

    // Throws ConfigError unless pulses have positive durations, strictly
    // increasing starts, and no mutual overlap.
    void validate() const;
    double min_duration() const;  // +inf when empty
};

// Downsampled state history entry.
struct StateSample {
    double t = 0.0;
    cplx e;             // cavity field
    double p2 = 0.0;    // sum_k |P_k|^2
    double s2 = 0.0;    // sum_k |S_k|^2
};

// Downsampled energy-budget entry. With gamma_P = gamma_S = 0 the five terms
// plus future incoming energy add up to the input energy at all times.
struct BudgetSample {
    double t = 0.0;
    double cavity = 0.0;     // |E|^2
    double optical = 0.0;    // sum |P_k|^2
    double spin = 0.0;       // sum |S_k|^2
    double emitted = 0.0;    // integral of |E_out|^2 up to t
    double incoming = 0.0;   // integral of |E_in|^2 remaining after t
};

struct SimOutput {
    Envelope e_out;                        // on the simulation grid
    Envelope e_in;                         // input as seen by the solver
    std::vector<BudgetSample> budget;      // downsampled history
    std::vector<StateSample> state_trace;  // downsampled history
    double input_energy = 0.0;             // total injected energy
    double max_budget_deviation = 0.0;     // tracked at every node
};

struct SimOptions {
    int trace_stride = 100;  // node downsampling for the histories
};

// Integrates the system over `grid`. Requires the step to resolve the fastest
// scale: dt <= min(1/(20 kappa), tau_min/20, 2 pi/(20 max|omega_k|)); the
// input envelope must vanish at the grid start. Pulse edges are snapped to
// grid nodes with the Rabi amplitude rescaled to preserve the pulse area.
// Between grid nodes the input is evaluated by linear interpolation, so the
// energy ledger stays consistent to integrator accuracy while the field error
// from the interpolation stays around 1e-8 at the admitted step sizes.
SimOutput simulate(const MemoryParams& params, const Envelope& input,
                   const PulseSchedule& schedule, const TimeGrid& grid,
                   const SimOptions& opts = {});

// Largest admissible step for these parameters and schedule.
double max_step_allowed(const MemoryParams& params, const PulseSchedule& schedule);

// Maximum over time of the absolute deviation of the conservation budget
// from the total input energy (valid as a conservation check when
// gamma_P = gamma_S = 0).
double energy_budget(const SimOutput& out);

// Energy of e_out inside [t1, t2] divided by the input energy.
double window_efficiency(const SimOutput& out, double t1, double t2);

// Absorption efficiency 4x/(1+x)^2 at x = C/C_opt.
double analytic_eta_abs(double c_over_copt);

// First-echo efficiency eta_F * 16 x^2/(1+x)^4 * exp(-2 gamma_P * 2 pi/Delta).
double analytic_eta_first_echo(double c_over_copt, double eta_f, double gamma_p,
                               double delta);

// Population transfer of a rectangular pulse at detuning omega:
// (Omega^2 T^2 / 4) * sinc^2(Y T / 2) with Y = sqrt(Omega^2 + omega^2).
double rabi_transfer(double omega_detuning, double rabi, double duration);

}  // namespace afc
