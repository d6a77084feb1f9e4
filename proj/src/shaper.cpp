// SPDX-License-Identifier: MIT
#include "afc/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "json.hpp"

#include "afc/errors.hpp"
#include "afc/units.hpp"
#include "window_quadrature.hpp"

namespace afc {

using detail::integrate_window;

namespace {

double sq(double x) { return x * x; }

}  // namespace

void BinLayout::validate() const {
    if (!(b > a)) throw ConfigError("BinLayout: window end must exceed its start");
    if (n_shape < 1) throw ConfigError("BinLayout: need at least one bin");
    if (!std::isfinite(offset)) throw ConfigError("BinLayout: offset must be finite");
}

void CropSpec::validate() const {
    if (!(beta > alpha)) throw ConfigError("CropSpec: beta must exceed alpha");
}

void ShapingPlan::validate() const {
    layout.validate();
    const auto n = static_cast<std::size_t>(layout.n_shape);
    if (p.size() != n || theta.size() != n || q.size() != n || areas.size() != n)
        throw ConfigError("ShapingPlan: weight vectors must have one entry per bin");

    double sum2 = 0.0;
    bool all_positive = true;
    for (double v : p) {
        if (v < 0.0) throw ConfigError("ShapingPlan: amplitudes must be >= 0");
        if (v == 0.0) all_positive = false;
        sum2 += v * v;
    }
    if (std::abs(sum2 - 1.0) > 1e-12)
        throw ConfigError("ShapingPlan: squared amplitudes sum to " +
                          std::to_string(sum2) + ", expected 1");

    double remaining = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (q[i] < 0.0 || q[i] > 1.0)
            throw ConfigError("ShapingPlan: relative amplitudes must be in [0, 1]");
        if (std::abs(sq(p[i]) - sq(q[i]) * remaining) > 1e-12)
            throw ConfigError("ShapingPlan: relative amplitudes do not reconstruct "
                              "the absolute ones");
        remaining *= 1.0 - sq(q[i]);
        if (areas[i] < 0.0 || areas[i] > pi + 1e-12)
            throw ConfigError("ShapingPlan: pulse areas must lie in [0, pi]");
    }
    if (all_positive && std::abs(q.back() - 1.0) > 1e-12)
        throw ConfigError("ShapingPlan: the last release must empty the memory");
}

std::vector<cplx> bin_overlaps(const Envelope& target, const Envelope& h_in,
                               const BinLayout& layout, bool crop) {
    layout.validate();
    target.grid.validate();
    h_in.grid.validate();

    const double w = layout.bin_width();
    if (!crop && h_in.grid.span() > w * (1.0 + 1e-9))
        throw ConfigError("bin_overlaps: input shape spans " +
                          std::to_string(h_in.grid.span()) + " s, wider than the " +
                          std::to_string(w) + " s bin (crop mode not requested)");

    const double slack = 0.5 * target.grid.dt;
    if (target.grid.t0 > layout.a + slack || target.grid.t_end() < layout.b - slack)
        throw ConfigError("bin_overlaps: target grid does not cover the shaping window");

    std::vector<cplx> j_overlaps(static_cast<std::size_t>(layout.n_shape));
    for (int j = 0; j < layout.n_shape; ++j) {
        const double c = layout.center(j);
        j_overlaps[static_cast<std::size_t>(j)] = integrate_window(
            target.grid, c - 0.5 * w, c + 0.5 * w, [&](double t) {
                return std::conj(target.value_at(t)) * h_in.value_at(t - c);
            });
    }
    return j_overlaps;
}

WeightSolution optimal_weights(const std::vector<cplx>& j_overlaps) {
    if (j_overlaps.empty()) throw ConfigError("optimal_weights: no bins");
    double s2 = 0.0;
    for (const cplx& z : j_overlaps) s2 += std::norm(z);
    if (!(s2 > 0.0))
        throw ConfigError("optimal_weights: target is orthogonal to every "
                          "translate of the input shape");

    WeightSolution sol;
    sol.r = std::sqrt(s2);
    sol.p.reserve(j_overlaps.size());
    sol.theta.reserve(j_overlaps.size());
    for (const cplx& z : j_overlaps) {
        sol.p.push_back(std::abs(z) / sol.r);
        sol.theta.push_back(z == cplx(0.0) ? 0.0 : -std::arg(z));
    }
    return sol;
}

std::vector<double> absolute_to_relative(const std::vector<double>& p) {
    if (p.empty()) throw ConfigError("absolute_to_relative: no amplitudes");
    double sum2 = 0.0;
    for (double v : p) {
        if (v < 0.0) throw ConfigError("absolute_to_relative: amplitudes must be >= 0");
        sum2 += v * v;
    }
    if (std::abs(sum2 - 1.0) > 1e-9)
        throw ConfigError("absolute_to_relative: squared amplitudes sum to " +
                          std::to_string(sum2) + ", expected 1 (infeasible chain)");

    // Suffix sums keep the chain exactly feasible: q_j^2 = p_j^2 divided by
    // the mass not yet released, and the last occupied bin gets q = 1.
    const std::size_t n = p.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + sq(p[i]);

    std::vector<double> q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == 0.0) continue;
        q[i] = std::sqrt(sq(p[i]) / suffix[i]);
        if (q[i] > 1.0) q[i] = 1.0;
    }
    return q;
}

std::vector<double> relative_to_areas(const std::vector<double>& q) {
    std::vector<double> areas;
    areas.reserve(q.size());
    for (double v : q) {
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw ConfigError("relative_to_areas: relative amplitudes must be in [0, 1]");
        areas.push_back(2.0 * std::asin(std::clamp(v, 0.0, 1.0)));
    }
    return areas;
}

ShapingPlan make_plan(const Envelope& target, const Envelope& h_in,
                      const BinLayout& layout, bool crop) {
    ShapingPlan plan;
    plan.layout = layout;
    WeightSolution sol = optimal_weights(bin_overlaps(target, h_in, layout, crop));
    plan.p = std::move(sol.p);
    plan.theta = std::move(sol.theta);
    plan.r_predicted = sol.r;
    plan.q = absolute_to_relative(plan.p);
    plan.areas = relative_to_areas(plan.q);
    plan.validate();
    return plan;
}

PulseSchedule build_readout_schedule(const ShapingPlan& plan, double tau,
                                     ScheduleMode mode, const ReadoutTiming& timing,
                                     const CropSpec* crop,
                                     std::vector<std::string>* warnings) {
    plan.validate();
    if (!(tau > 0.0)) throw ConfigError("build_readout_schedule: pulse duration must be positive");
    if (!(timing.rephasing > 0.0))
        throw ConfigError("build_readout_schedule: rephasing time must be positive");
    if (!(timing.t_storage > timing.t_input))
        throw ConfigError("build_readout_schedule: storage pulse must follow the input");

    double spacing = plan.layout.bin_width();
    if (mode == ScheduleMode::cropped) {
        if (crop == nullptr)
            throw ConfigError("build_readout_schedule: cropped mode needs a crop window");
        crop->validate();
        if (std::abs(crop->width() - spacing) > 1e-9 * spacing)
            throw ConfigError("build_readout_schedule: crop window width " +
                              std::to_string(crop->width()) +
                              " s does not match the bin width " +
                              std::to_string(spacing) + " s");
        spacing = crop->width();
    }

    if (warnings != nullptr && tau > spacing / 10.0)
        warnings->push_back("build_readout_schedule: pulse duration " +
                            std::to_string(tau) + " s exceeds a tenth of the " +
                            std::to_string(spacing) + " s bin width");
    if (spacing < tau)
        throw ConfigError("build_readout_schedule: readout pulses 0 and 1 overlap, "
                          "spacing " + std::to_string(spacing) +
                          " s is shorter than the pulse duration " +
                          std::to_string(tau) + " s");

    // Delay still owed to the comb when the storage pulse (center) fires.
    const double r0 = timing.t_input + timing.rephasing - (timing.t_storage + 0.5 * tau);
    if (!(r0 > 0.0))
        throw ConfigError("build_readout_schedule: storage pulse must precede the "
                          "rephasing time");

    PulseSchedule sched;
    const double pi_rabi = pi / tau;
    sched.pulses.push_back({timing.t_storage, tau, pi_rabi, 0.0, PulseKind::storage});

    // After the readout pulse (center) the crest should sit half a bin plus
    // half a pulse later, putting the released piece right against its bin.
    double remaining = r0;
    if (timing.sync_start >= 0.0) {
        const double separation = r0 - 0.5 * spacing - 0.5 * tau;
        if (!(separation > tau))
            throw ConfigError("build_readout_schedule: synchronization separation " +
                              std::to_string(separation) +
                              " s is not realizable with pulse duration " +
                              std::to_string(tau) + " s");
        if (timing.sync_start < timing.t_storage + tau)
            throw ConfigError("build_readout_schedule: synchronization pair starts "
                              "inside the storage pulse");
        sched.pulses.push_back(
            {timing.sync_start, tau, pi_rabi, 0.0, PulseKind::synchronization});
        sched.pulses.push_back({timing.sync_start + separation, tau, pi_rabi, 0.0,
                                PulseKind::synchronization});
        remaining = 0.5 * spacing + 0.5 * tau;
    }

    const double first_start = plan.layout.center(0) - remaining - 0.5 * tau;
    if (first_start < sched.pulses.back().start + tau)
        throw ConfigError("build_readout_schedule: first readout pulse at " +
                          std::to_string(first_start) + " s collides with the " +
                          "preceding control pulse");

    for (int j = 0; j < plan.layout.n_shape; ++j) {
        const auto k = static_cast<std::size_t>(j);
        sched.pulses.push_back({plan.layout.center(j) - remaining - 0.5 * tau, tau,
                                plan.areas[k] / tau, plan.theta[k], PulseKind::readout});
    }
    sched.validate();
    return sched;
}

double asymptotic_overlap(const Envelope& h_in, const CropSpec& crop,
                          std::vector<std::string>* warnings) {
    crop.validate();
    h_in.grid.validate();
    const double slack = 0.5 * h_in.grid.dt;
    if (h_in.grid.t0 > crop.alpha + slack || h_in.grid.t_end() < crop.beta - slack)
        throw ConfigError("asymptotic_overlap: envelope grid does not cover the "
                          "crop window");

    if (warnings != nullptr) {
        double max_abs = 0.0, max_im = 0.0;
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < h_in.grid.n; ++i) {
            const double t = h_in.grid.time(i);
            if (t < crop.alpha || t > crop.beta) continue;
            max_abs = std::max(max_abs, std::abs(h_in.a[i]));
            max_im = std::max(max_im, std::abs(h_in.a[i].imag()));
            if (h_in.a[i].real() > 0.0) pos = true;
            if (h_in.a[i].real() < 0.0) neg = true;
        }
        if (max_im > 1e-9 * max_abs || (pos && neg))
            warnings->push_back("asymptotic_overlap: input is not real and "
                                "single-signed on the crop window, outside the "
                                "hypotheses of the limit");
    }

    const cplx integral = integrate_window(h_in.grid, crop.alpha, crop.beta,
                                           [&](double t) { return h_in.value_at(t); });
    return std::abs(integral) / std::sqrt(crop.width());
}

double gaussian_crop_overlap(double m) {
    if (!(m > 0.0)) throw ConfigError("gaussian_crop_overlap: m must be positive");
    return std::pow(pi, 0.25) * std::erf(m / std::sqrt(2.0)) / std::sqrt(m);
}

double exponential_crop_overlap(double m) {
    if (!(m > 0.0)) throw ConfigError("exponential_crop_overlap: m must be positive");
    return std::sqrt(2.0 / m) * (1.0 - std::exp(-m));
}

double renormalized_asymptotic_overlap(double m) {
    if (!(m > 0.0))
        throw ConfigError("renormalized_asymptotic_overlap: m must be positive");
    return std::pow(pi, 0.25) * std::erf(m / std::sqrt(2.0)) /
           std::sqrt(m * std::erf(m));
}

double gaussian_crop_energy(double m) {
    if (!(m > 0.0)) throw ConfigError("gaussian_crop_energy: m must be positive");
    return std::erf(m);
}

CropOptimum optimize_crop(CropFamily family) {
    const auto f = family == CropFamily::gaussian ? gaussian_crop_overlap
                                                  : exponential_crop_overlap;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-6, hi = 10.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    const double m = 0.5 * (lo + hi);
    return {m, f(m)};
}

std::string shaping_plan_json(const ShapingPlan& plan) {
    nlohmann::ordered_json doc;
    doc["window"] = {{"a_s", plan.layout.a},
                     {"b_s", plan.layout.b},
                     {"n_shape", plan.layout.n_shape},
                     {"offset_s", plan.layout.offset}};
    std::vector<double> centers;
    centers.reserve(static_cast<std::size_t>(plan.layout.n_shape));
    for (int j = 0; j < plan.layout.n_shape; ++j) centers.push_back(plan.layout.center(j));
    doc["bin_centers_s"] = centers;
    doc["p"] = plan.p;
    doc["theta_rad"] = plan.theta;
    doc["q"] = plan.q;
    doc["areas_rad"] = plan.areas;
    doc["r_predicted"] = plan.r_predicted;
    return doc.dump(2);
}

}  // namespace afc
