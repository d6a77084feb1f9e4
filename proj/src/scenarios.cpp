// SPDX-License-Identifier: MIT

#include "afc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include "afc/dynamics.hpp"
#include "afc/errors.hpp"
#include "afc/units.hpp"
#include "afc/version.hpp"
#include "json.hpp"
#include "window_quadrature.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace afc {
namespace {

// Working resolution of the emitted records kept in results and artifacts.
// 2 ns resolves the fastest echo feature (the 30 ns pulse edges through the
// kappa ringdown) while keeping files and overlap quadrature light.
constexpr double kCoarseDt = 2e-9;

// Zero-padded span used for spectral filtering: the box filter wants a
// frequency resolution of a tenth of its edge, i.e. >= ~67 us of record for
// the default 0.15 MHz half width.
constexpr double kFilterSpan = 100e-6;

// Gap left between the storage pulse (or synchronization block) and the next
// pulse so neighbouring rectangles never touch.
constexpr double kPulseGap = 0.05e-6;

// The synthetic target's crest sits a quarter of the way into the shaping
// window: earlier placement wastes the slow tail, later placement truncates
// the rise. The kept-mass optimum is flat around this value.
constexpr double kTargetPeakFraction = 0.25;

// Emission-onset threshold relative to the echo's own crest.
constexpr double kOnsetFraction = 0.1;

double window_energy(const Envelope& e, double t1, double t2) {
    return detail::integrate_window(e.grid, t1, t2, [&](double t) {
               const double v = std::abs(e.value_at(t));
               return cplx(v * v, 0.0);
           })
        .real();
}

// <f(. - shift), e> over [t1, t2], f conjugated.
cplx windowed_inner(const Envelope& e, const Envelope& f, double t1, double t2,
                    double shift) {
    return detail::integrate_window(e.grid, t1, t2, [&](double t) {
        return std::conj(f.value_at(t - shift)) * e.value_at(t);
    });
}

// Maximizes score over [lo, hi] by golden-section search; score must be
// unimodal on the bracket (we hand it one found by a coarse scan).
template <typename F>
double golden_max(F&& score, double lo, double hi, double tol) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = score(x1), f2 = score(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = score(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = score(x1);
        }
    }
    return 0.5 * (lo + hi);
}

// Shift of f that maximizes |<f(. - s), e>|^2 over the window: coarse scan of
// the full correlation range, then golden refinement around the best cell.
double best_alignment(const Envelope& e, const Envelope& f, double t1, double t2) {
    const double s_lo = t1 - f.grid.t_end();
    const double s_hi = t2 - f.grid.t0;
    auto score = [&](double s) { return std::norm(windowed_inner(e, f, t1, t2, s)); };

    const int n_scan = 241;
    const double step = (s_hi - s_lo) / (n_scan - 1);
    double best_s = s_lo, best_v = -1.0;
    for (int i = 0; i < n_scan; ++i) {
        const double s = s_lo + i * step;
        const double v = score(s);
        if (v > best_v) {
            best_v = v;
            best_s = s;
        }
    }
    return golden_max(score, best_s - step, best_s + step, 1e-11);
}

Envelope make_input(const GlobalConfig& cfg, const TimeGrid& grid) {
    const auto& in = cfg.input;
    if (in.shape == "gaussian")
        return make_gaussian(grid, s_from_us(in.center_us), s_from_ns(in.intensity_fwhm_ns));
    if (in.shape == "exponential")
        return make_exponential(grid, s_from_us(in.center_us), s_from_us(in.decay_us));
    Envelope raw = load_csv(in.file);
    Envelope e = resample(raw, grid).out;
    e.normalize();
    return e;
}

// The natural echo piece used by the planner: the input shape, truncated to
// one readout spacing (plain) or to the crop window with the discarded tail's
// energy written off (cropped).
Envelope make_piece_shape(const GlobalConfig& cfg, double width, bool cropped) {
    const double dt = 0.5e-9;
    const double fwhm = s_from_ns(cfg.input.intensity_fwhm_ns);
    if (!cropped) {
        const auto n = static_cast<std::size_t>(std::floor(width / dt));
        const TimeGrid g{-0.5 * static_cast<double>(n - 1) * dt, dt, n};
        return make_gaussian(g, 0.0, fwhm);
    }
    const auto n = static_cast<std::size_t>(std::floor(width / dt)) + 1;
    const TimeGrid g{-0.5 * static_cast<double>(n - 1) * dt, dt, n};
    Envelope h = make_gaussian(g, 0.0, fwhm);
    h.scale(cplx(std::sqrt(gaussian_crop_energy(cfg.shaping.crop_m)), 0.0));
    return h;
}

// Zero-extends an envelope so its grid reaches at least t2 (the planner wants
// the target grid to cover the whole bin layout even where the target is 0).
Envelope zero_pad_to(const Envelope& e, double t2) {
    if (e.grid.t_end() >= t2) return e;
    const auto extra =
        static_cast<std::size_t>(std::ceil((t2 - e.grid.t_end()) / e.grid.dt));
    Envelope out{TimeGrid{e.grid.t0, e.grid.dt, e.grid.n + extra}, e.a};
    out.a.resize(e.grid.n + extra, cplx(0.0));
    return out;
}

Envelope coarse_copy(const Envelope& e, double t1, double t2) {
    const auto n = static_cast<std::size_t>(std::floor((t2 - t1) / kCoarseDt)) + 1;
    return resample(e, TimeGrid{t1, kCoarseDt, n}).out;
}

Envelope window_copy(const Envelope& e, double t1, double t2) {
    Envelope w = coarse_copy(e, t1, t2);
    w.normalize();
    return w;
}

Envelope apply_box_filter(const Envelope& e, const GlobalConfig& cfg) {
    const auto n = static_cast<std::size_t>(std::round(kFilterSpan / kCoarseDt)) + 1;
    Envelope coarse = resample(e, TimeGrid{0.0, kCoarseDt, n}).out;
    const SpectralBoxFilter f{rad_from_mhz(cfg.filter.half_width_mhz),
                              rad_from_mhz(cfg.filter.center_mhz)};
    FilterResult r = box_filter(coarse, f);
    return std::move(r.out);
}

// Wide-grid synthetic reference photon: asymmetric two-sided exponential
// with the configured rise/fall ratio and intensity FWHM.
Envelope make_reference_photon(const GlobalConfig& cfg) {
    const double span = 70e-6;
    const auto n = static_cast<std::size_t>(std::round(span / kCoarseDt)) + 1;
    const TimeGrid g{0.0, kCoarseDt, n};
    return make_asymmetric_ion_like(g, cfg.shaping.target_rise_us,
                                    cfg.shaping.target_fall_us,
                                    s_from_us(cfg.shaping.target_fwhm_us));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << text;
    if (!out) throw ConfigError("failed writing: " + path);
}

void save_budget_csv(const std::vector<BudgetSample>& budget, const std::string& path) {
    std::string text = "t,cavity,optical,spin,emitted,incoming\n";
    char line[192];
    for (const auto& b : budget) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      b.t, b.cavity, b.optical, b.spin, b.emitted, b.incoming);
        text += line;
    }
    write_text(path, text);
}

ordered_json pulses_json(const PulseSchedule& sched) {
    auto kind_name = [](PulseKind k) {
        switch (k) {
            case PulseKind::storage: return "storage";
            case PulseKind::synchronization: return "synchronization";
            default: return "readout";
        }
    };
    ordered_json arr = ordered_json::array();
    for (const auto& p : sched.pulses) {
        arr.push_back(ordered_json{{"start_us", p.start * 1e6},
                                   {"duration_us", p.duration * 1e6},
                                   {"rabi_rad_s", p.rabi},
                                   {"phase_rad", p.phase},
                                   {"kind", kind_name(p.kind)}});
    }
    return arr;
}

ordered_json metrics_json(const PanelMetrics& m) {
    return ordered_json{
        {"efficiency", m.efficiency},
        {"conditional_overlap", m.overlap},
        {"efficiency_filtered", m.efficiency_filtered},
        {"conditional_overlap_filtered", m.overlap_filtered},
        {"filter_retention", m.filter_retention},
        {"window_us", {m.window_begin * 1e6, m.window_end * 1e6}},
        {"echo_peak_us", m.echo_peak_t * 1e6},
        {"echo_delay_us", m.echo_delay * 1e6},
        {"target_shift_us", m.target_shift * 1e6},
        {"first_readout_us", m.first_readout * 1e6},
        {"echo_onset_us", m.echo_onset * 1e6},
        {"onset_gap_us", m.onset_gap * 1e6},
        {"prompt_emission", m.prompt_emission},
        {"r_predicted", m.r_predicted},
        {"budget_deviation", m.budget_deviation}};
}

}  // namespace

double input_sigma_amp(const GlobalConfig& cfg) {
    const auto& in = cfg.input;
    if (in.shape == "gaussian")
        return s_from_ns(in.intensity_fwhm_ns) / (2.0 * std::sqrt(std::log(2.0)));
    if (in.shape == "exponential") return 0.5 * s_from_us(in.decay_us);

    // File input: amplitude second moment on the stored grid.
    Envelope e = load_csv(in.file);
    e.normalize();
    const auto& g = e.grid;
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double w = std::norm(e.a[i]) * g.dt;
        mean += g.time(i) * w;
        second += g.time(i) * g.time(i) * w;
    }
    const double var = second - mean * mean;
    if (!(var > 0.0)) throw NumericError("input waveform has no temporal spread");
    return std::sqrt(var);
}

Envelope make_shaping_target(const GlobalConfig& cfg) {
    const auto& sh = cfg.shaping;
    const double span = sh.n_bins * 2.0 * sh.crop_m * input_sigma_amp(cfg);
    const double a = s_from_us(sh.window_start_us);
    const auto n = static_cast<std::size_t>(std::floor(span / kCoarseDt)) + 1;
    const TimeGrid g{a, kCoarseDt, n};

    if (!sh.target_file.empty()) {
        // File targets are taken in absolute time and must cover the window.
        Envelope raw = load_csv(sh.target_file);
        Envelope t = resample(raw, g).out;
        t.normalize();
        return t;
    }

    const Envelope shape = make_reference_photon(cfg);
    const double crest_src = shape.grid.t0 + 0.5 * shape.grid.span();
    const double crest_dst = a + kTargetPeakFraction * span;
    Envelope t{g, std::vector<cplx>(n)};
    for (std::size_t i = 0; i < n; ++i)
        t.a[i] = shape.value_at(g.time(i) - crest_dst + crest_src);
    t.normalize();
    return t;
}

void write_run_manifest(const std::string& dir, const GlobalConfig& cfg,
                        const std::string& scenario) {
    ordered_json root;
    root["meta"] = ordered_json{{"tool", "afcmem"},
                                {"version", version_string},
                                {"scenario", scenario},
                                {"seed", cfg.run.seed},
                                {"threads", cfg.run.threads},
                                {"config_hash", config_hash(cfg)}};
    root["config"] = ordered_json::parse(config_json(cfg));
    write_text((fs::path(dir) / "run_manifest.json").string(), root.dump(2) + "\n");
}

Fig3Result run_fig3(char panel, const GlobalConfig& cfg, const std::string& out_dir) {
    if (panel != 'a' && panel != 'b' && panel != 'c')
        throw ConfigError("run_fig3: panel must be 'a', 'b' or 'c'");

    Fig3Result res;
    res.panel = panel;
    auto& warn = res.warnings;

    const MemoryParams params = to_memory_params(cfg, &warn);
    const double rephasing = two_pi / to_comb_spec(cfg).delta;
    const double sigma = input_sigma_amp(cfg);
    const double tau = s_from_us(cfg.shaping.tau_us);
    const double t_in = s_from_us(cfg.input.center_us);
    const double t_storage = t_in + s_from_us(cfg.shaping.storage_gap_us);

    // Rephasing delay still owed when the storage pulse freezes the optical
    // coherence; everything downstream is scheduled against it.
    const double owed = t_in + rephasing - (t_storage + 0.5 * tau);
    if (!(owed > 2.0 * tau))
        throw ConfigError(
            "run_fig3: storage pulse lands too close to the comb rephasing time; "
            "reduce shaping.storage_gap_us or the comb tooth spacing");

    res.target = make_shaping_target(cfg);
    ReadoutTiming timing{t_in, t_storage, rephasing, -1.0};
    CropSpec crop{};
    bool cropped = false;

    if (panel == 'a') {
        // Full recall: one pi readout right after the storage pulse, echo
        // crest a whole rephasing time of optical evolution after the input.
        const double c0 = t_storage + tau + kPulseGap + 0.5 * tau + owed;
        const double hw = 3.0 * sigma;
        res.plan.layout = BinLayout{c0 - hw, c0 + hw, 1, 0.0};
        res.plan.p = {1.0};
        res.plan.theta = {0.0};
        res.plan.q = {1.0};
        res.plan.areas = {pi};
        // no shaping, so no overlap prediction; the measured overlap against
        // the long target is what it is
        res.plan.r_predicted = 0.0;
    } else {
        const double a = res.target.grid.t0;
        const int n = cfg.shaping.n_bins;
        double w;
        if (panel == 'b') {
            w = cfg.shaping.bin_width_us > 0 ? s_from_us(cfg.shaping.bin_width_us)
                                             : 4.5 * sigma;
        } else {
            w = 2.0 * cfg.shaping.crop_m * sigma;
            crop = CropSpec{cfg.shaping.crop_m, -0.5 * w, 0.5 * w};
            cropped = true;
        }
        const BinLayout layout{a, a + n * w, n, 0.0};
        const Envelope h = make_piece_shape(cfg, layout.bin_width(), cropped);
        res.plan = make_plan(zero_pad_to(res.target, layout.b), h, layout, cropped);
        if (cfg.shaping.sync) timing.sync_start = t_storage + tau + kPulseGap;
    }

    const PulseSchedule sched =
        build_readout_schedule(res.plan, tau,
                               cropped ? ScheduleMode::cropped : ScheduleMode::plain,
                               timing, cropped ? &crop : nullptr, &warn);

    const double win1 = res.plan.layout.a;
    const double win2 = res.plan.layout.b;
    const double dt = s_from_ns(cfg.run.dt_ns);
    const double horizon = win2 + 0.3e-6;
    const TimeGrid grid{0.0, dt, static_cast<std::size_t>(std::ceil(horizon / dt)) + 1};

    const Envelope input = make_input(cfg, grid);
    const SimOutput sim = simulate(params, input, sched, grid, {cfg.run.trace_stride});

    PanelMetrics& m = res.metrics;
    m.window_begin = win1;
    m.window_end = win2;
    m.budget_deviation = sim.max_budget_deviation;
    m.r_predicted = res.plan.r_predicted;
    m.efficiency = window_efficiency(sim, win1, win2);

    // Conditional overlap: project the emission-conditioned output mode on
    // the unit-norm target. The unshaped echo is nowhere near the shaping
    // window, so panel a gets the best-aligned shift of the target first.
    m.target_shift = panel == 'a' ? best_alignment(sim.e_out, res.target, win1, win2) : 0.0;
    const double e_win = m.efficiency * sim.input_energy;
    if (e_win > 0.0)
        m.overlap =
            std::norm(windowed_inner(sim.e_out, res.target, win1, win2, m.target_shift)) /
            e_win;

    // Echo crest and onset, on the solver grid.
    {
        const auto& g = sim.e_out.grid;
        const auto i1 = static_cast<std::size_t>(std::max(0.0, std::ceil((win1 - g.t0) / g.dt)));
        const auto i2 = std::min(g.n - 1, static_cast<std::size_t>(std::floor((win2 - g.t0) / g.dt)));
        double peak = 0.0;
        std::size_t ipk = i1;
        for (std::size_t i = i1; i <= i2; ++i) {
            const double v = std::abs(sim.e_out.a[i]);
            if (v > peak) {
                peak = v;
                ipk = i;
            }
        }
        m.echo_peak_t = g.time(ipk);
        m.echo_delay = m.echo_peak_t - t_in;

        for (const auto& p : sched.pulses)
            if (p.kind == PulseKind::readout) {
                m.first_readout = p.start;
                break;
            }
        const auto istart =
            static_cast<std::size_t>(std::max(0.0, std::ceil((m.first_readout - g.t0) / g.dt)));
        m.echo_onset = win2;
        for (std::size_t i = istart; i <= i2; ++i)
            if (std::abs(sim.e_out.a[i]) >= kOnsetFraction * peak) {
                m.echo_onset = g.time(i);
                break;
            }
        m.onset_gap = m.echo_onset - m.first_readout;
        m.prompt_emission = m.onset_gap <= res.plan.layout.bin_width();
    }

    // Spectral filtering on a zero-padded coarse copy of the whole record.
    Envelope filtered;
    if (cfg.filter.enabled) {
        filtered = apply_box_filter(sim.e_out, cfg);
        m.efficiency_filtered = window_energy(filtered, win1, win2) / sim.input_energy;
        const double e_f = m.efficiency_filtered * sim.input_energy;
        if (e_f > 0.0)
            m.overlap_filtered =
                std::norm(windowed_inner(filtered, res.target, win1, win2, m.target_shift)) /
                e_f;
        m.filter_retention = m.efficiency > 0.0 ? m.efficiency_filtered / m.efficiency : 0.0;
    } else {
        filtered = sim.e_out;
        m.efficiency_filtered = m.efficiency;
        m.overlap_filtered = m.overlap;
        m.filter_retention = 1.0;
    }

    res.output_window = window_copy(sim.e_out, win1, win2);
    res.output_filtered_window = window_copy(filtered, win1, win2);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        save_csv(coarse_copy(sim.e_out, 0.0, grid.t_end()), (dir / "output_full.csv").string());
        save_csv(res.output_window, (dir / "echo_window.csv").string());
        save_csv(res.output_filtered_window, (dir / "echo_window_filtered.csv").string());
        save_csv(res.target, (dir / "target.csv").string());
        save_budget_csv(sim.budget, (dir / "budget.csv").string());
        write_text((dir / "plan.json").string(), shaping_plan_json(res.plan) + "\n");

        ordered_json summary;
        summary["panel"] = std::string(1, panel);
        summary["metrics"] = metrics_json(m);
        summary["pulses"] = pulses_json(sched);
        summary["warnings"] = res.warnings;
        write_text((dir / "summary.json").string(), summary.dump(2) + "\n");
        write_run_manifest(out_dir, cfg, std::string("fig3") + panel);
    }
    return res;
}

namespace {

MixedPhoton pure_photon(const Envelope& psi, double shift) {
    MixedPhoton p;
    p.p0 = 0.0;
    p.components.push_back(MixedComponent{1.0, shift, psi});
    return p;
}

MixedPhoton shifted_mixture(const MixedPhoton& m, double shift) {
    MixedPhoton out = m;
    for (auto& c : out.components) c.shift += shift;
    return out;
}

// Emission-conditioned mean squared overlap of a delayed reference mixture
// with a pure memory photon; equals visibility_pure_mixed of the shifted
// mixture but without copying any waveforms.
double mixed_overlap_at(const Envelope& mem, const MixedPhoton& ref, double s) {
    double wsum = 0.0, acc = 0.0;
    for (const auto& c : ref.components) {
        const cplx o =
            windowed_inner(mem, c.psi, mem.grid.t0, mem.grid.t_end(), c.shift + s);
        acc += c.weight * std::norm(o);
        wsum += c.weight;
    }
    return acc / wsum;
}

// Best alignment of the reference photon (pure or mixed) against a memory
// photon: coarse scan plus golden refinement of the asymptotic visibility.
double best_reference_shift(const Envelope& mem, const MixedPhoton& ref) {
    double ref_begin = ref.support_begin();
    double ref_end = ref.support_end();
    const double s_lo = mem.grid.t0 - ref_end;
    const double s_hi = mem.grid.t_end() - ref_begin;
    auto score = [&](double s) { return mixed_overlap_at(mem, ref, s); };
    const int n_scan = 481;
    const double step = (s_hi - s_lo) / (n_scan - 1);
    double best_s = s_lo, best_v = -1.0;
    for (int i = 0; i < n_scan; ++i) {
        const double s = s_lo + i * step;
        const double v = score(s);
        if (v > best_v) {
            best_v = v;
            best_s = s;
        }
    }
    return golden_max(score, best_s - step, best_s + step, 1e-11);
}

std::uint64_t mix_seed(std::uint64_t base, unsigned curve, unsigned point) {
    std::uint64_t x = base ^ (0x9e3779b97f4a7c15ull * (curve * 257u + point + 1u));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return x;
}

}  // namespace

Fig4Result run_fig4(const GlobalConfig& cfg, const std::string& out_dir) {
    Fig4Result res;

    // The two memory photons: the plain full-recall echo and the
    // cropped-shaped echo after spectral filtering.
    const Fig3Result pa = run_fig3('a', cfg, "");
    const Fig3Result pc = run_fig3('c', cfg, "");
    res.unshaped_metrics = pa.metrics;
    res.shaped_metrics = pc.metrics;
    res.warnings.insert(res.warnings.end(), pa.warnings.begin(), pa.warnings.end());
    for (const auto& w : pc.warnings)
        if (std::find(res.warnings.begin(), res.warnings.end(), w) == res.warnings.end())
            res.warnings.push_back(w);

    const Envelope& mem_unshaped = pa.output_window;
    const Envelope& mem_unshaped_f = pa.output_filtered_window;
    const Envelope& mem_shaped_f = pc.output_filtered_window;

    // Reference photon, pure and mixed.
    Envelope ref;
    if (!cfg.hom.ion_pure_file.empty()) {
        ref = load_csv(cfg.hom.ion_pure_file);
        ref.normalize();
    } else {
        ref = make_reference_photon(cfg);
        res.used_synthetic_reference = true;
        res.warnings.push_back(
            "reference photon: SYNTHETIC stand-in waveform (hom.ion_pure_file not set); "
            "visibilities describe the stand-in, not a measured emitter");
    }

    MixedPhoton ref_mixed;
    if (!cfg.hom.ion_mixture_file.empty()) {
        ref_mixed = load_mixture(cfg.hom.ion_mixture_file);
    } else {
        std::vector<ShiftMass> dist{{0.0, 1.0}};
        for (int k = 1; k <= cfg.hom.mixed_shifts; ++k)
            dist.push_back(ShiftMass{k * s_from_us(cfg.hom.mixed_shift_us),
                                     std::exp(-cfg.hom.mixed_decay * k)});
        ref_mixed = build_mixture(ref, cfg.hom.mixed_p0, dist);
        if (!res.used_synthetic_reference)
            res.warnings.push_back(
                "reference mixture: synthetic shift distribution around the pure "
                "waveform (hom.ion_mixture_file not set)");
    }

    // Per-pairing alignment shifts ("time offsets set for best visibility").
    const MixedPhoton ref_pure = pure_photon(ref, 0.0);
    const double s_up = best_reference_shift(mem_unshaped, ref_pure);
    const double s_um = best_reference_shift(mem_unshaped, ref_mixed);
    const double s_ufm = best_reference_shift(mem_unshaped_f, ref_mixed);
    const double s_sp = best_reference_shift(mem_shaped_f, ref_pure);
    const double s_sm = best_reference_shift(mem_shaped_f, ref_mixed);
    res.offset_unshaped = s_up;
    res.offset_shaped = s_sp;

    res.v_inf_unshaped_pure =
        visibility_pure_mixed(mem_unshaped, shifted_mixture(ref_pure, s_up));
    res.v_inf_unshaped_mixed =
        visibility_pure_mixed(mem_unshaped, shifted_mixture(ref_mixed, s_um));
    res.v_inf_shaped_pure =
        visibility_pure_mixed(mem_shaped_f, shifted_mixture(ref_pure, s_sp));
    res.v_inf_shaped_mixed =
        visibility_pure_mixed(mem_shaped_f, shifted_mixture(ref_mixed, s_sm));
    const double v_inf_unshaped_f_mixed =
        visibility_pure_mixed(mem_unshaped_f, shifted_mixture(ref_mixed, s_ufm));

    // Finite coincidence windows.
    const MixedPhoton mem_u = pure_photon(mem_unshaped, 0.0);
    const MixedPhoton mem_s = pure_photon(mem_shaped_f, 0.0);
    const auto samples = static_cast<std::size_t>(cfg.hom.samples);
    const double goal = cfg.hom.stderr_goal;
    const int threads = cfg.run.threads;
    const std::uint64_t seed = cfg.run.seed;

    for (unsigned i = 0; i < cfg.hom.windows_us.size(); ++i) {
        const CoincidenceWindow T{s_from_us(cfg.hom.windows_us[i])};
        VisibilityPoint pt;
        pt.window = T.t;
        pt.unshaped_pure = visibility_windowed(mem_u, shifted_mixture(ref_pure, s_up), T,
                                               samples, mix_seed(seed, 0, i), goal, threads);
        pt.unshaped_mixed = visibility_windowed(mem_u, shifted_mixture(ref_mixed, s_um), T,
                                                samples, mix_seed(seed, 1, i), goal, threads);
        pt.shaped_pure = visibility_windowed(mem_s, shifted_mixture(ref_pure, s_sp), T,
                                             samples, mix_seed(seed, 2, i), goal, threads);
        pt.shaped_mixed = visibility_windowed(mem_s, shifted_mixture(ref_mixed, s_sm), T,
                                              samples, mix_seed(seed, 3, i), goal, threads);
        res.points.push_back(pt);
    }

    // Heralding report: the mixed-reference visibilities are the ones a
    // network would see, and the retained energy folds into the memory arm.
    Efficiencies eff;
    eff.eta_det = cfg.network.eta_detection;
    eff.eta_ion = cfg.network.eta_ion_collection;
    eff.eta_mem = cfg.network.eta_memory > 0.0 ? cfg.network.eta_memory : 1.0;
    const std::vector<NetworkCase> cases{
        {"unshaped", res.v_inf_unshaped_mixed, pa.metrics.efficiency},
        {"unshaped+filtered", v_inf_unshaped_f_mixed, pa.metrics.efficiency_filtered},
        {"shaped+filtered", res.v_inf_shaped_mixed, pc.metrics.efficiency_filtered}};
    res.report = scenario_report(eff, cases, cfg.network.repeater_fidelity);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);

        std::string csv =
            "window_us,unshaped_pure,unshaped_pure_stderr,unshaped_mixed,"
            "unshaped_mixed_stderr,shaped_pure,shaped_pure_stderr,shaped_mixed,"
            "shaped_mixed_stderr\n";
        char line[320];
        for (const auto& pt : res.points) {
            std::snprintf(line, sizeof line,
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          pt.window * 1e6, pt.unshaped_pure.value,
                          pt.unshaped_pure.stderr_estimate, pt.unshaped_mixed.value,
                          pt.unshaped_mixed.stderr_estimate, pt.shaped_pure.value,
                          pt.shaped_pure.stderr_estimate, pt.shaped_mixed.value,
                          pt.shaped_mixed.stderr_estimate);
            csv += line;
        }
        write_text((dir / "visibility_curves.csv").string(), csv);

        save_csv(mem_unshaped, (dir / "memory_unshaped.csv").string());
        save_csv(mem_shaped_f, (dir / "memory_shaped_filtered.csv").string());
        save_csv(ref, (dir / "reference_pure.csv").string());

        ordered_json summary;
        summary["v_infinity"] = ordered_json{{"unshaped_pure", res.v_inf_unshaped_pure},
                                             {"unshaped_mixed", res.v_inf_unshaped_mixed},
                                             {"unshaped_filtered_mixed", v_inf_unshaped_f_mixed},
                                             {"shaped_pure", res.v_inf_shaped_pure},
                                             {"shaped_mixed", res.v_inf_shaped_mixed}};
        summary["offsets_us"] = ordered_json{{"unshaped_pure", s_up * 1e6},
                                             {"unshaped_mixed", s_um * 1e6},
                                             {"unshaped_filtered_mixed", s_ufm * 1e6},
                                             {"shaped_pure", s_sp * 1e6},
                                             {"shaped_mixed", s_sm * 1e6}};
        ordered_json rows = ordered_json::array();
        for (const auto& r : res.report)
            rows.push_back(ordered_json{{"label", r.label},
                                        {"p_four_click", r.p_four_click},
                                        {"fidelity", r.fidelity}});
        summary["report"] = rows;
        summary["report_note"] =
            "p_four_click = eta_det^4 eta_ion^2 eta_mem^2 / 8 with the retained "
            "energy folded into eta_mem; fidelity = (1 + V^2)/2 times the repeater factor";
        summary["unshaped_metrics"] = metrics_json(res.unshaped_metrics);
        summary["shaped_metrics"] = metrics_json(res.shaped_metrics);
        summary["used_synthetic_reference"] = res.used_synthetic_reference;
        summary["warnings"] = res.warnings;
        write_text((dir / "summary.json").string(), summary.dump(2) + "\n");
        write_run_manifest(out_dir, cfg, "fig4");
    }
    return res;
}

}  // namespace afc
