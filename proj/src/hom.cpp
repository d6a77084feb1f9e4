// SPDX-License-Identifier: MIT
#include "afc/hom.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/random/sobol.hpp>

#include "json.hpp"

#include "afc/errors.hpp"
#include "window_quadrature.hpp"

namespace afc {

namespace {

constexpr int kBatches = 32;

void require_normalized(const Envelope& e, const char* who) {
    e.grid.validate();
    if (std::abs(e.norm2() - 1.0) > 1e-6)
        throw ConfigError(std::string(who) + ": wavepacket is not L2-normalized " +
                          "(norm^2 = " + std::to_string(e.norm2()) + ")");
}

// <b(. - sb) | a(. - sa)> on the finer of the two grids.
cplx shifted_overlap(const Envelope& a, double sa, const Envelope& b, double sb) {
    const double lo = std::max(a.grid.t0 + sa, b.grid.t0 + sb);
    const double hi = std::min(a.grid.t_end() + sa, b.grid.t_end() + sb);
    if (!(hi > lo)) return cplx(0.0);

    const bool a_finer = a.grid.dt <= b.grid.dt;
    TimeGrid nodes = a_finer ? a.grid : b.grid;
    nodes.t0 += a_finer ? sa : sb;
    return detail::integrate_window(nodes, lo, hi, [&](double t) {
        return std::conj(b.value_at(t - sb)) * a.value_at(t - sa);
    });
}

double occupied_weight(const MixedPhoton& m, const char* who) {
    double w = 0.0;
    for (const MixedComponent& c : m.components) w += c.weight;
    if (!(w > 0.0))
        throw ConfigError(std::string(who) + ": photon is all vacuum (p0 = 1)");
    return w;
}

}  // namespace

double MixedPhoton::support_begin() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const MixedComponent& c : components)
        lo = std::min(lo, c.psi.grid.t0 + c.shift);
    return lo;
}

double MixedPhoton::support_end() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const MixedComponent& c : components)
        hi = std::max(hi, c.psi.grid.t_end() + c.shift);
    return hi;
}

void MixedPhoton::validate() const {
    if (!(p0 >= 0.0) || p0 > 1.0 + 1e-12)
        throw ConfigError("MixedPhoton: vacuum probability must be in [0, 1]");
    double wsum = 0.0;
    for (const MixedComponent& c : components) {
        if (!(c.weight >= 0.0))
            throw ConfigError("MixedPhoton: component weights must be >= 0");
        if (!std::isfinite(c.shift))
            throw ConfigError("MixedPhoton: component shift must be finite");
        require_normalized(c.psi, "MixedPhoton");
        wsum += c.weight;
    }
    if (std::abs(p0 + wsum - 1.0) > 1e-9)
        throw ConfigError("MixedPhoton: p0 + sum of weights is " +
                          std::to_string(p0 + wsum) + ", expected 1");
}

void CoincidenceWindow::validate() const {
    if (std::isnan(t) || !(t > 0.0))
        throw ConfigError("CoincidenceWindow: need t > 0 (or infinite)");
}

MixedPhoton build_mixture(const Envelope& psi, double p0,
                          const std::vector<ShiftMass>& distribution) {
    require_normalized(psi, "build_mixture");
    if (!(p0 >= 0.0) || p0 > 1.0)
        throw ConfigError("build_mixture: vacuum probability must be in [0, 1]");

    MixedPhoton m;
    m.p0 = p0;
    const double occupied = 1.0 - p0;
    if (occupied <= 0.0) return m;

    if (distribution.empty()) {
        m.components.push_back({occupied, 0.0, psi});
        return m;
    }

    double total = 0.0;
    for (const ShiftMass& sm : distribution) {
        if (!(sm.mass >= 0.0))
            throw ConfigError("build_mixture: distribution masses must be >= 0");
        if (!std::isfinite(sm.s))
            throw ConfigError("build_mixture: shifts must be finite");
        total += sm.mass;
    }
    if (!(total > 0.0))
        throw ConfigError("build_mixture: distribution has no mass but p0 < 1");

    for (const ShiftMass& sm : distribution) {
        if (sm.mass == 0.0) continue;
        m.components.push_back({occupied * sm.mass / total, sm.s, psi});
    }
    return m;
}

double visibility_pure_pure(const Envelope& a, const Envelope& b) {
    require_normalized(a, "visibility_pure_pure");
    require_normalized(b, "visibility_pure_pure");
    return std::min(1.0, std::norm(shifted_overlap(a, 0.0, b, 0.0)));
}

double visibility_pure_mixed(const Envelope& pure, const MixedPhoton& mixed) {
    require_normalized(pure, "visibility_pure_mixed");
    mixed.validate();
    const double wsum = occupied_weight(mixed, "visibility_pure_mixed");
    double v = 0.0;
    for (const MixedComponent& c : mixed.components)
        v += c.weight * std::norm(shifted_overlap(pure, 0.0, c.psi, c.shift));
    return std::min(1.0, v / wsum);
}

double visibility_mixed_mixed_asymptotic(const MixedPhoton& a, const MixedPhoton& b) {
    a.validate();
    b.validate();
    const double wa = occupied_weight(a, "visibility_mixed_mixed_asymptotic");
    const double wb = occupied_weight(b, "visibility_mixed_mixed_asymptotic");
    double v = 0.0;
    for (const MixedComponent& ca : a.components)
        for (const MixedComponent& cb : b.components)
            v += ca.weight * cb.weight *
                 std::norm(shifted_overlap(ca.psi, ca.shift, cb.psi, cb.shift));
    return std::min(1.0, v / (wa * wb));
}

WindowedVisibility visibility_windowed(const MixedPhoton& a, const MixedPhoton& b,
                                       const CoincidenceWindow& window,
                                       std::size_t samples, std::uint64_t seed,
                                       double stderr_goal, int threads) {
    a.validate();
    b.validate();
    occupied_weight(a, "visibility_windowed");
    occupied_weight(b, "visibility_windowed");
    window.validate();
    if (window.is_infinite())
        throw ConfigError("visibility_windowed: window must be finite, use the "
                          "asymptotic form instead");
    if (samples < 1000)
        throw ConfigError("visibility_windowed: need at least 1000 samples per batch");

    const double lo = std::min(a.support_begin(), b.support_begin());
    const double hi = std::max(a.support_end(), b.support_end());
    const double span = hi - lo;
    // Delays beyond the union support cannot produce coincidences, so the
    // sampled strip is clipped there; with a window that wide the result is
    // the asymptotic value up to sampling noise.
    const double half_v = std::min(window.t, span);

    // One 2-D Sobol point set, reused by every rotation.
    std::vector<std::pair<double, double>> pts(samples);
    boost::random::sobol eng(2);
    for (auto& [u, v] : pts) {
        u = std::ldexp(static_cast<double>(eng()), -64);
        v = std::ldexp(static_cast<double>(eng()), -64);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::pair<double, double>> rot(kBatches);
    for (auto& [su, sv] : rot) {
        su = uni(rng);
        sv = uni(rng);
    }

    // Coincidence-rate integrands at (t1, t2), summed over the mixture:
    //   same-pol pair:  n = rho_a(t1) rho_b(t2) + rho_a(t2) rho_b(t1)
    //                       - 2 Re(K_a(t1,t2) conj(K_b(t1,t2)))
    //   cross-pol pair: d = rho_a(t1) rho_b(t2) + rho_a(t2) rho_b(t1)
    // with K the first-order coherence kernel of each photon. The common
    // prefactors and the strip area cancel in the ratio.
    auto kernel = [](const MixedPhoton& m, double t1, double t2, cplx& k, double& r1,
                     double& r2) {
        k = cplx(0.0);
        r1 = r2 = 0.0;
        for (const MixedComponent& c : m.components) {
            const cplx a1 = c.psi.value_at(t1 - c.shift);
            const cplx a2 = c.psi.value_at(t2 - c.shift);
            k += c.weight * a1 * std::conj(a2);
            r1 += c.weight * std::norm(a1);
            r2 += c.weight * std::norm(a2);
        }
    };

    std::vector<std::pair<double, double>> sums(kBatches);  // (n, d) per batch
    auto run_batch = [&](int bi) {
        const auto [su, sv] = rot[static_cast<std::size_t>(bi)];
        double nsum = 0.0, dsum = 0.0;
        for (const auto& [u0, v0] : pts) {
            double u = u0 + su;
            if (u >= 1.0) u -= 1.0;
            double v = v0 + sv;
            if (v >= 1.0) v -= 1.0;
            const double t1 = lo + u * span;
            const double t2 = t1 - (2.0 * v - 1.0) * half_v;
            cplx ka, kb;
            double ra1, ra2, rb1, rb2;
            kernel(a, t1, t2, ka, ra1, ra2);
            kernel(b, t1, t2, kb, rb1, rb2);
            const double d = ra1 * rb2 + ra2 * rb1;
            nsum += std::max(0.0, d - 2.0 * std::real(ka * std::conj(kb)));
            dsum += d;
        }
        sums[static_cast<std::size_t>(bi)] = {nsum, dsum};
    };

    const int nthreads = std::clamp(threads, 1, kBatches);
    if (nthreads == 1) {
        for (int bi = 0; bi < kBatches; ++bi) run_batch(bi);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int tid = 0; tid < nthreads; ++tid)
            pool.emplace_back([&, tid] {
                for (int bi = tid; bi < kBatches; bi += nthreads) run_batch(bi);
            });
        for (std::thread& t : pool) t.join();
    }

    double n_total = 0.0, d_total = 0.0;
    std::vector<double> per_batch;
    per_batch.reserve(kBatches);
    for (const auto& [nsum, dsum] : sums) {
        if (!(dsum > 0.0))
            throw NumericError("visibility_windowed: a batch saw no coincidence "
                               "weight inside the window");
        n_total += nsum;
        d_total += dsum;
        per_batch.push_back(1.0 - nsum / dsum);
    }

    WindowedVisibility out;
    out.value = 1.0 - n_total / d_total;
    double mean = 0.0;
    for (double v : per_batch) mean += v;
    mean /= kBatches;
    double var = 0.0;
    for (double v : per_batch) var += (v - mean) * (v - mean);
    var /= (kBatches - 1);
    out.stderr_estimate = std::sqrt(var / kBatches);
    out.above_goal = stderr_goal > 0.0 && out.stderr_estimate > stderr_goal;
    return out;
}

void save_mixture(const MixedPhoton& m, const std::string& json_path) {
    m.validate();
    const std::filesystem::path jp(json_path);
    const std::filesystem::path dir = jp.parent_path();
    const std::string stem = jp.stem().string();

    nlohmann::ordered_json doc;
    doc["p0"] = m.p0;
    doc["components"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < m.components.size(); ++k) {
        const MixedComponent& c = m.components[k];
        const std::string csv = stem + "_component_" + std::to_string(k) + ".csv";
        save_csv(c.psi, (dir / csv).string());
        doc["components"].push_back(
            {{"weight", c.weight}, {"shift_s", c.shift}, {"waveform_csv_path", csv}});
    }

    std::ofstream out(json_path);
    if (!out) throw ConfigError("save_mixture: cannot open " + json_path + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw ConfigError("save_mixture: write failure on " + json_path);
}

MixedPhoton load_mixture(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw ConfigError("load_mixture: cannot open " + json_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_mixture: " + json_path + ": " + std::string(e.what()));
    }

    const std::filesystem::path dir = std::filesystem::path(json_path).parent_path();
    MixedPhoton m;
    try {
        m.p0 = doc.at("p0").get<double>();
        for (const auto& comp : doc.at("components")) {
            MixedComponent c;
            c.weight = comp.at("weight").get<double>();
            c.shift = comp.at("shift_s").get<double>();
            std::filesystem::path csv(comp.at("waveform_csv_path").get<std::string>());
            if (csv.is_relative()) csv = dir / csv;
            c.psi = load_csv(csv.string());
            m.components.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_mixture: " + json_path + ": " + std::string(e.what()));
    }
    m.validate();
    return m;
}

}  // namespace afc
