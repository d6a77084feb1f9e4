// SPDX-License-Identifier: MIT
#include "afc/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/units.hpp"

namespace afc {

namespace {

// FFTW's planner is not thread-safe; execution of a ready plan is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<cplx> src(in);
    std::vector<cplx> out(in.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(src.data()),
                                reinterpret_cast<fftw_complex*>(out.data()), sign,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

// Angular frequency of DFT bin j on an n-point grid with step dt, wrapped to
// (-pi/dt, pi/dt].
double bin_omega(std::size_t j, std::size_t n, double dt) {
    const double j_signed = (j <= n / 2) ? static_cast<double>(j)
                                         : static_cast<double>(j) - static_cast<double>(n);
    return two_pi * j_signed / (static_cast<double>(n) * dt);
}

double sum_abs2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return s;
}

}  // namespace

bool TimeGrid::same_as(const TimeGrid& o) const {
    if (n != o.n) return false;
    const double scale = std::max({std::abs(t0), std::abs(o.t0), dt, o.dt});
    return std::abs(t0 - o.t0) <= 1e-12 * scale && std::abs(dt - o.dt) <= 1e-12 * dt;
}

void TimeGrid::validate() const {
    if (!(dt > 0.0)) throw ConfigError("TimeGrid: dt must be positive");
    if (n < 2) throw ConfigError("TimeGrid: need at least 2 samples");
    if (!std::isfinite(t0) || !std::isfinite(t_end()))
        throw ConfigError("TimeGrid: non-finite span");
}

double Envelope::norm2() const {
    if (a.size() != grid.n) throw ConfigError("Envelope: sample count does not match grid");
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    s -= 0.5 * (std::norm(a.front()) + std::norm(a.back()));
    return s * grid.dt;
}

cplx Envelope::value_at(double t) const {
    const double x = (t - grid.t0) / grid.dt;
    const double top = static_cast<double>(grid.n - 1);
    if (x < -1e-6 || x > top + 1e-6) return cplx(0.0);
    if (x <= 0.0) return a[0];
    if (x >= top) return a[grid.n - 1];
    auto i = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * a[i] + f * a[i + 1];
}

Envelope& Envelope::scale(cplx factor) {
    for (cplx& z : a) z *= factor;
    return *this;
}

Envelope& Envelope::normalize() {
    const double n2 = norm2();
    if (!(n2 > 1e-300)) throw NumericError("Envelope::normalize: zero-energy envelope");
    return scale(1.0 / std::sqrt(n2));
}

Envelope make_gaussian(const TimeGrid& grid, double center, double intensity_fwhm) {
    grid.validate();
    if (!(intensity_fwhm > 4.0 * grid.dt))
        throw ConfigError("make_gaussian: intensity FWHM " + std::to_string(intensity_fwhm) +
                          " s is not resolvable on dt=" + std::to_string(grid.dt) + " s");
    // Intensity std from its FWHM; amplitude falls as exp(-t^2/(4 sigma^2)).
    const double sigma = intensity_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    Envelope e{grid, std::vector<cplx>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double u = grid.time(i) - center;
        e.a[i] = std::exp(-u * u / (4.0 * sigma * sigma));
    }
    return e.normalize();
}

Envelope make_exponential(const TimeGrid& grid, double start, double decay) {
    grid.validate();
    if (!(decay > grid.dt))
        throw ConfigError("make_exponential: decay time must exceed the grid step");
    Envelope e{grid, std::vector<cplx>(grid.n, cplx(0.0))};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double t = grid.time(i);
        if (t >= start) e.a[i] = std::exp(-(t - start) / decay);
    }
    return e.normalize();
}

Envelope make_asymmetric_ion_like(const TimeGrid& grid, double rise, double fall,
                                  double fwhm) {
    grid.validate();
    if (!(rise > 0.0) || !(fall > 0.0))
        throw ConfigError("make_asymmetric_ion_like: rise and fall must be positive");
    if (rise > fall)
        throw ConfigError("make_asymmetric_ion_like: rise must not exceed fall");
    if (!(fwhm > 4.0 * grid.dt))
        throw ConfigError("make_asymmetric_ion_like: FWHM not resolvable on this grid");
    // Amplitude half-max sits at ln(sqrt 2) time constants on each side, so the
    // intensity FWHM of the raw shape is (ln 2 / 2)*(rise + fall); rescale both
    // constants together to hit the requested width.
    const double raw_fwhm = 0.5 * std::log(2.0) * (rise + fall);
    const double s = fwhm / raw_fwhm;
    const double tr = s * rise;
    const double tf = s * fall;
    const double peak_t = grid.t0 + 0.5 * grid.span();
    Envelope e{grid, std::vector<cplx>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double u = grid.time(i) - peak_t;
        e.a[i] = (u < 0.0) ? std::exp(u / tr) : std::exp(-u / tf);
    }
    return e.normalize();
}

cplx overlap(const Envelope& a, const Envelope& b) {
    if (!a.grid.same_as(b.grid))
        throw ConfigError("overlap: envelope grids differ; resample explicitly first");
    if (a.a.size() != a.grid.n || b.a.size() != b.grid.n)
        throw ConfigError("overlap: sample count does not match grid");
    cplx s(0.0);
    for (std::size_t i = 0; i < a.grid.n; ++i) s += std::conj(a.a[i]) * b.a[i];
    s -= 0.5 * (std::conj(a.a.front()) * b.a.front() + std::conj(a.a.back()) * b.a.back());
    return s * a.grid.dt;
}

FilterResult box_filter(const Envelope& e, const SpectralBoxFilter& f) {
    e.grid.validate();
    if (!(f.half_width > 0.0)) throw ConfigError("box_filter: half_width must be positive");
    const double resolution = two_pi / (static_cast<double>(e.grid.n) * e.grid.dt);
    if (!(resolution < f.half_width / 10.0))
        throw ConfigError("box_filter: grid too short to resolve the filter edge "
                          "(spectral resolution " + std::to_string(resolution) +
                          " rad/s, need < half_width/10)");

    std::vector<cplx> spec = dft(e.a, FFTW_FORWARD);
    const double total = sum_abs2(spec);
    if (!(total > 1e-300)) throw NumericError("box_filter: zero-energy envelope");

    double kept = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double w = bin_omega(j, e.grid.n, e.grid.dt);
        if (w < f.center - f.half_width || w > f.center + f.half_width) {
            spec[j] = 0.0;
        } else {
            kept += std::norm(spec[j]);
        }
    }

    std::vector<cplx> out = dft(spec, FFTW_BACKWARD);
    const double inv_n = 1.0 / static_cast<double>(e.grid.n);
    for (cplx& z : out) z *= inv_n;

    FilterResult r;
    r.out = Envelope{e.grid, std::move(out)};
    r.retained_energy = kept / total;
    return r;
}

ResampleResult resample(const Envelope& e, const TimeGrid& target, ResampleMethod method) {
    e.grid.validate();
    target.validate();

    if (target.dt > e.grid.dt * (1.0 + 1e-12)) {
        // Downsampling: make sure the content fits under the new Nyquist rate.
        // Occupancy is the smallest |omega| band holding 99.99% of the energy.
        std::vector<cplx> spec = dft(e.a, FFTW_FORWARD);
        const double total = sum_abs2(spec);
        if (total > 1e-300) {
            std::vector<std::size_t> idx(spec.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
                return std::abs(bin_omega(i, e.grid.n, e.grid.dt)) <
                       std::abs(bin_omega(j, e.grid.n, e.grid.dt));
            });
            double acc = 0.0;
            double occupancy = 0.0;
            for (std::size_t j : idx) {
                acc += std::norm(spec[j]);
                occupancy = std::abs(bin_omega(j, e.grid.n, e.grid.dt));
                if (acc >= (1.0 - 1e-4) * total) break;
            }
            if (pi / target.dt < occupancy)
                throw ConfigError("resample: target step " + std::to_string(target.dt) +
                                  " s would alias content extending to " +
                                  std::to_string(occupancy) + " rad/s");
        }
    }

    ResampleResult r;
    r.out.grid = target;
    r.out.a.assign(target.n, cplx(0.0));
    r.clipped = target.t0 < e.grid.t0 - 1e-12 * e.grid.dt ||
                target.t_end() > e.grid.t_end() + 1e-12 * e.grid.dt;

    if (method == ResampleMethod::linear) {
        for (std::size_t i = 0; i < target.n; ++i) {
            const double u = (target.time(i) - e.grid.t0) / e.grid.dt;
            if (u < -1e-9 || u > static_cast<double>(e.grid.n - 1) + 1e-9) continue;
            double fl = std::floor(u);
            double frac = u - fl;
            if (frac < 1e-9) frac = 0.0;
            if (frac > 1.0 - 1e-9) { fl += 1.0; frac = 0.0; }
            const std::size_t k = static_cast<std::size_t>(std::max(0.0, fl));
            if (k >= e.grid.n) continue;
            if (frac == 0.0 || k + 1 >= e.grid.n)
                r.out.a[i] = e.a[k];
            else
                r.out.a[i] = (1.0 - frac) * e.a[k] + frac * e.a[k + 1];
        }
    } else {
        if (static_cast<double>(e.grid.n) * static_cast<double>(target.n) > 5e7)
            throw ConfigError("resample: band_limited interpolation too large; use linear");
        std::vector<cplx> spec = dft(e.a, FFTW_FORWARD);
        const double inv_n = 1.0 / static_cast<double>(e.grid.n);
        for (std::size_t i = 0; i < target.n; ++i) {
            const double t = target.time(i);
            if (t < e.grid.t0 - 1e-12 || t > e.grid.t_end() + 1e-12) continue;
            cplx acc(0.0);
            for (std::size_t j = 0; j < spec.size(); ++j) {
                const double w = bin_omega(j, e.grid.n, e.grid.dt);
                acc += spec[j] * std::polar(1.0, w * (t - e.grid.t0));
            }
            r.out.a[i] = acc * inv_n;
        }
    }
    return r;
}

void save_csv(const Envelope& e, const std::string& path) {
    if (e.a.size() != e.grid.n) throw ConfigError("save_csv: sample count does not match grid");
    std::ofstream out(path);
    if (!out) throw ConfigError("save_csv: cannot open '" + path + "' for writing");
    out << "t,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < e.grid.n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", e.grid.time(i),
                      e.a[i].real(), e.a[i].imag());
        out << buf;
    }
    if (!out) throw ConfigError("save_csv: write failure on '" + path + "'");
}

Envelope load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("load_csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::istringstream hs(line);
        std::string col;
        const char* expected[3] = {"t", "re", "im"};
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(hs, col, ',') || col != expected[k])
                throw ConfigError("load_csv: missing or misnamed column '" +
                                  std::string(expected[k]) + "' in header of '" + path + "'");
        }
    }

    std::vector<double> ts;
    std::vector<cplx> as;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double vals[3];
        std::istringstream ls(line);
        std::string cell;
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ls, cell, ','))
                throw ConfigError("load_csv: row " + std::to_string(row) +
                                  " has fewer than 3 columns");
            std::size_t pos = 0;
            try {
                vals[k] = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw ConfigError("load_csv: row " + std::to_string(row) +
                                  ": cannot parse '" + cell + "'");
            }
        }
        ts.push_back(vals[0]);
        as.emplace_back(vals[1], vals[2]);
    }
    if (ts.size() < 2) throw ConfigError("load_csv: need at least 2 rows in '" + path + "'");

    const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    if (!(dt > 0.0)) throw ConfigError("load_csv: time column must be strictly increasing");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double expected = ts.front() + static_cast<double>(i) * dt;
        if (std::abs(ts[i] - expected) > 1e-6 * dt)
            throw ConfigError("load_csv: non-uniform time step at row " +
                              std::to_string(i + 2));
    }
    Envelope e;
    e.grid = TimeGrid{ts.front(), dt, ts.size()};
    e.a = std::move(as);
    return e;
}

}  // namespace afc
