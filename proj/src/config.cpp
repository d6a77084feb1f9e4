// SPDX-License-Identifier: MIT
#include "afc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "afc/errors.hpp"
#include "afc/units.hpp"
#include "json.hpp"

namespace afc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError("config: " + msg); }

void require_object(const json& j, const std::string& name) {
    if (!j.is_object()) bad(name + " must be an object");
}

void reject_unknown(const json& j, const std::string& section,
                    std::initializer_list<const char*> keys) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys)
            if (item.key() == k) { known = true; break; }
        if (!known) bad("unknown key \"" + section + "." + item.key() + "\"");
    }
}

// Readers tolerate absent keys (defaults win) but not wrong types. The unit
// tag goes into the error message so a bare number in the wrong scale is
// caught at the source.
void get_num(const json& j, const std::string& section, const char* key,
             const char* unit, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) bad(section + "." + key + " must be a number (" + unit + ")");
    out = v.get<double>();
}

void get_int(const json& j, const std::string& section, const char* key, int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) bad(section + "." + key + " must be an integer");
    out = v.get<int>();
}

void get_u64(const json& j, const std::string& section, const char* key,
             std::uint64_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0))
        bad(section + "." + key + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
}

void get_bool(const json& j, const std::string& section, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_boolean()) bad(section + "." + key + " must be true or false");
    out = v.get<bool>();
}

void get_str(const json& j, const std::string& section, const char* key,
             std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) bad(section + "." + key + " must be a string");
    out = v.get<std::string>();
}

void get_num_list(const json& j, const std::string& section, const char* key,
                  const char* unit, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array()) bad(section + "." + key + " must be an array of numbers (" + unit + ")");
    std::vector<double> vals;
    for (const auto& e : v) {
        if (!e.is_number())
            bad(section + "." + key + " must be an array of numbers (" + unit + ")");
        vals.push_back(e.get<double>());
    }
    out = std::move(vals);
}

void require_positive(double v, const char* key, const char* unit) {
    if (!(v > 0.0) || !std::isfinite(v))
        bad(std::string(key) + " must be > 0 (" + unit + ")");
}

void require_nonneg(double v, const char* key, const char* unit) {
    if (v < 0.0 || !std::isfinite(v))
        bad(std::string(key) + " must be >= 0 (" + unit + ")");
}

void require_fraction01(double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0))
        bad(std::string(key) + " must lie in [0, 1] (dimensionless)");
}

ShapeKind parse_shape_kind(const std::string& s, const char* key, bool allow_dirac) {
    if (s == "rectangular") return ShapeKind::rectangular;
    if (s == "gaussian") return ShapeKind::gaussian;
    if (s == "lorentzian") return ShapeKind::lorentzian;
    if (s == "dirac" && allow_dirac) return ShapeKind::dirac;
    bad(std::string(key) + " must be one of " +
        (allow_dirac ? "dirac|rectangular|gaussian|lorentzian" : "rectangular|gaussian|lorentzian") +
        ", got \"" + s + "\"");
}

}  // namespace

void MemorySection::validate() const {
    require_positive(kappa_mhz, "memory.kappa_mhz", "MHz");
    require_nonneg(g_sqrt_n_mhz, "memory.g_sqrt_n_mhz", "MHz");
    require_nonneg(optical_t2_us, "memory.optical_t2_us", "us");
    require_nonneg(spin_t2_us, "memory.spin_t2_us", "us");
    if (!(cavity_r1 > 0.0 && cavity_r1 < 1.0))
        bad("memory.cavity_r1 must lie in (0, 1) (intensity reflectivity)");
    if (!(cavity_r2 > 0.0 && cavity_r2 <= 1.0))
        bad("memory.cavity_r2 must lie in (0, 1] (intensity reflectivity)");
    require_positive(cavity_length_mm, "memory.cavity_length_mm", "mm");
    require_positive(crystal_length_mm, "memory.crystal_length_mm", "mm");
    require_positive(d_tilde, "memory.d_tilde", "dimensionless");
}

void CombSection::validate() const {
    parse_shape_kind(envelope_shape, "comb.envelope_shape", false);
    ShapeKind tooth = parse_shape_kind(tooth_shape, "comb.tooth_shape", true);
    require_positive(envelope_width_mhz, "comb.envelope_width_mhz", "MHz");
    if (tooth != ShapeKind::dirac)
        require_positive(tooth_width_khz, "comb.tooth_width_khz", "kHz");
    require_positive(tooth_spacing_khz, "comb.tooth_spacing_khz", "kHz");
    if (n_teeth < 3) bad("comb.n_teeth must be >= 3");
    if (tooth == ShapeKind::dirac) {
        if (classes_per_tooth != 1)
            bad("comb.classes_per_tooth must be 1 for dirac teeth");
    } else if (classes_per_tooth < 3 || classes_per_tooth % 2 == 0) {
        bad("comb.classes_per_tooth must be an odd integer >= 3");
    }
}

void InputSection::validate() const {
    if (shape != "gaussian" && shape != "exponential" && shape != "file")
        bad("input.shape must be one of gaussian|exponential|file, got \"" + shape + "\"");
    require_nonneg(center_us, "input.center_us", "us");
    if (shape == "gaussian")
        require_positive(intensity_fwhm_ns, "input.intensity_fwhm_ns", "ns");
    if (shape == "exponential")
        require_positive(decay_us, "input.decay_us", "us");
    if (shape == "file" && file.empty())
        bad("input.file must name a CSV waveform when input.shape = \"file\"");
}

void ShapingSection::validate() const {
    if (n_bins < 1) bad("shaping.n_bins must be >= 1");
    require_positive(tau_us, "shaping.tau_us", "us");
    require_nonneg(bin_width_us, "shaping.bin_width_us", "us");
    require_positive(crop_m, "shaping.crop_m", "dimensionless");
    require_positive(window_start_us, "shaping.window_start_us", "us");
    require_positive(storage_gap_us, "shaping.storage_gap_us", "us");
    if (target_file.empty()) {
        require_positive(target_fwhm_us, "shaping.target_fwhm_us", "us");
        require_positive(target_rise_us, "shaping.target_rise_us", "us");
        require_positive(target_fall_us, "shaping.target_fall_us", "us");
        if (target_rise_us > target_fall_us)
            bad("shaping.target_rise_us must not exceed shaping.target_fall_us (us)");
    }
}

void FilterSection::validate() const {
    if (enabled) require_positive(half_width_mhz, "filter.half_width_mhz", "MHz");
    if (!std::isfinite(center_mhz)) bad("filter.center_mhz must be finite (MHz)");
}

void HomSection::validate() const {
    if (samples < 64) bad("hom.samples must be >= 64");
    if (windows_us.empty()) bad("hom.windows_us must not be empty (us)");
    for (double w : windows_us)
        require_positive(w, "hom.windows_us entries", "us");
    require_nonneg(stderr_goal, "hom.stderr_goal", "dimensionless");
    require_fraction01(mixed_p0, "hom.mixed_p0");
    if (mixed_p0 == 1.0) bad("hom.mixed_p0 must be < 1 (all-vacuum mixture)");
    if (mixed_shifts < 0) bad("hom.mixed_shifts must be >= 0");
    if (mixed_shifts > 0) {
        require_positive(mixed_shift_us, "hom.mixed_shift_us", "us");
        require_positive(mixed_decay, "hom.mixed_decay", "dimensionless");
    }
}

void NetworkSection::validate() const {
    require_fraction01(eta_detection, "network.eta_detection");
    require_fraction01(eta_ion_collection, "network.eta_ion_collection");
    require_fraction01(eta_memory, "network.eta_memory");
    require_fraction01(v_infinity, "network.v_infinity");
    require_fraction01(repeater_fidelity, "network.repeater_fidelity");
}

void RunSection::validate() const {
    if (threads < 1) bad("run.threads must be >= 1");
    if (out_dir.empty()) bad("run.out_dir must not be empty");
    require_positive(dt_ns, "run.dt_ns", "ns");
    if (trace_stride < 1) bad("run.trace_stride must be >= 1");
}

void GlobalConfig::validate() const {
    memory.validate();
    comb.validate();
    input.validate();
    shaping.validate();
    filter.validate();
    hom.validate();
    network.validate();
    run.validate();
}

GlobalConfig default_config() { return GlobalConfig{}; }

GlobalConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        bad(std::string("invalid JSON: ") + e.what());
    }
    require_object(doc, "top level");
    reject_unknown(doc, "top level",
                   {"memory", "comb", "input", "shaping", "filter", "hom", "network", "run"});

    GlobalConfig cfg;

    if (doc.contains("memory")) {
        const json& j = doc.at("memory");
        require_object(j, "memory");
        reject_unknown(j, "memory",
                       {"kappa_mhz", "g_sqrt_n_mhz", "optical_t2_us", "spin_t2_us",
                        "cavity_r1", "cavity_r2", "cavity_length_mm", "crystal_length_mm",
                        "d_tilde"});
        auto& m = cfg.memory;
        get_num(j, "memory", "kappa_mhz", "MHz", m.kappa_mhz);
        get_num(j, "memory", "g_sqrt_n_mhz", "MHz", m.g_sqrt_n_mhz);
        get_num(j, "memory", "optical_t2_us", "us", m.optical_t2_us);
        get_num(j, "memory", "spin_t2_us", "us", m.spin_t2_us);
        get_num(j, "memory", "cavity_r1", "dimensionless", m.cavity_r1);
        get_num(j, "memory", "cavity_r2", "dimensionless", m.cavity_r2);
        get_num(j, "memory", "cavity_length_mm", "mm", m.cavity_length_mm);
        get_num(j, "memory", "crystal_length_mm", "mm", m.crystal_length_mm);
        get_num(j, "memory", "d_tilde", "dimensionless", m.d_tilde);
    }

    if (doc.contains("comb")) {
        const json& j = doc.at("comb");
        require_object(j, "comb");
        reject_unknown(j, "comb",
                       {"envelope_shape", "envelope_width_mhz", "tooth_shape",
                        "tooth_width_khz", "tooth_spacing_khz", "n_teeth",
                        "classes_per_tooth"});
        auto& c = cfg.comb;
        get_str(j, "comb", "envelope_shape", c.envelope_shape);
        get_num(j, "comb", "envelope_width_mhz", "MHz", c.envelope_width_mhz);
        get_str(j, "comb", "tooth_shape", c.tooth_shape);
        get_num(j, "comb", "tooth_width_khz", "kHz", c.tooth_width_khz);
        get_num(j, "comb", "tooth_spacing_khz", "kHz", c.tooth_spacing_khz);
        get_int(j, "comb", "n_teeth", c.n_teeth);
        get_int(j, "comb", "classes_per_tooth", c.classes_per_tooth);
    }

    if (doc.contains("input")) {
        const json& j = doc.at("input");
        require_object(j, "input");
        reject_unknown(j, "input",
                       {"shape", "center_us", "intensity_fwhm_ns", "decay_us", "file"});
        auto& i = cfg.input;
        get_str(j, "input", "shape", i.shape);
        get_num(j, "input", "center_us", "us", i.center_us);
        get_num(j, "input", "intensity_fwhm_ns", "ns", i.intensity_fwhm_ns);
        get_num(j, "input", "decay_us", "us", i.decay_us);
        get_str(j, "input", "file", i.file);
    }

    if (doc.contains("shaping")) {
        const json& j = doc.at("shaping");
        require_object(j, "shaping");
        reject_unknown(j, "shaping",
                       {"n_bins", "tau_us", "bin_width_us", "crop_m", "window_start_us",
                        "storage_gap_us", "sync", "target_fwhm_us", "target_rise_us",
                        "target_fall_us", "target_file"});
        auto& s = cfg.shaping;
        get_int(j, "shaping", "n_bins", s.n_bins);
        get_num(j, "shaping", "tau_us", "us", s.tau_us);
        get_num(j, "shaping", "bin_width_us", "us", s.bin_width_us);
        get_num(j, "shaping", "crop_m", "dimensionless", s.crop_m);
        get_num(j, "shaping", "window_start_us", "us", s.window_start_us);
        get_num(j, "shaping", "storage_gap_us", "us", s.storage_gap_us);
        get_bool(j, "shaping", "sync", s.sync);
        get_num(j, "shaping", "target_fwhm_us", "us", s.target_fwhm_us);
        get_num(j, "shaping", "target_rise_us", "us", s.target_rise_us);
        get_num(j, "shaping", "target_fall_us", "us", s.target_fall_us);
        get_str(j, "shaping", "target_file", s.target_file);
    }

    if (doc.contains("filter")) {
        const json& j = doc.at("filter");
        require_object(j, "filter");
        reject_unknown(j, "filter", {"enabled", "half_width_mhz", "center_mhz"});
        auto& f = cfg.filter;
        get_bool(j, "filter", "enabled", f.enabled);
        get_num(j, "filter", "half_width_mhz", "MHz", f.half_width_mhz);
        get_num(j, "filter", "center_mhz", "MHz", f.center_mhz);
    }

    if (doc.contains("hom")) {
        const json& j = doc.at("hom");
        require_object(j, "hom");
        reject_unknown(j, "hom",
                       {"samples", "windows_us", "stderr_goal", "mixed_p0", "mixed_shifts",
                        "mixed_shift_us", "mixed_decay", "ion_pure_file", "ion_mixture_file"});
        auto& h = cfg.hom;
        get_int(j, "hom", "samples", h.samples);
        get_num_list(j, "hom", "windows_us", "us", h.windows_us);
        get_num(j, "hom", "stderr_goal", "dimensionless", h.stderr_goal);
        get_num(j, "hom", "mixed_p0", "dimensionless", h.mixed_p0);
        get_int(j, "hom", "mixed_shifts", h.mixed_shifts);
        get_num(j, "hom", "mixed_shift_us", "us", h.mixed_shift_us);
        get_num(j, "hom", "mixed_decay", "dimensionless", h.mixed_decay);
        get_str(j, "hom", "ion_pure_file", h.ion_pure_file);
        get_str(j, "hom", "ion_mixture_file", h.ion_mixture_file);
    }

    if (doc.contains("network")) {
        const json& j = doc.at("network");
        require_object(j, "network");
        reject_unknown(j, "network",
                       {"eta_detection", "eta_ion_collection", "eta_memory", "v_infinity",
                        "repeater_fidelity"});
        auto& n = cfg.network;
        get_num(j, "network", "eta_detection", "dimensionless", n.eta_detection);
        get_num(j, "network", "eta_ion_collection", "dimensionless", n.eta_ion_collection);
        get_num(j, "network", "eta_memory", "dimensionless", n.eta_memory);
        get_num(j, "network", "v_infinity", "dimensionless", n.v_infinity);
        get_num(j, "network", "repeater_fidelity", "dimensionless", n.repeater_fidelity);
    }

    if (doc.contains("run")) {
        const json& j = doc.at("run");
        require_object(j, "run");
        reject_unknown(j, "run", {"seed", "threads", "out_dir", "dt_ns", "trace_stride"});
        auto& r = cfg.run;
        get_u64(j, "run", "seed", r.seed);
        get_int(j, "run", "threads", r.threads);
        get_str(j, "run", "out_dir", r.out_dir);
        get_num(j, "run", "dt_ns", "ns", r.dt_ns);
        get_int(j, "run", "trace_stride", r.trace_stride);
    }

    cfg.validate();
    return cfg;
}

GlobalConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    // Accept a run manifest transparently: it wraps the effective config
    // under a "config" member next to run metadata.
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        bad("invalid JSON in \"" + path + "\": " + e.what());
    }
    if (doc.is_object() && doc.contains("config") && doc.at("config").is_object())
        return config_from_json(doc.at("config").dump());
    return config_from_json(text);
}

std::string config_json(const GlobalConfig& cfg) {
    ordered_json j;
    j["memory"] = {{"kappa_mhz", cfg.memory.kappa_mhz},
                   {"g_sqrt_n_mhz", cfg.memory.g_sqrt_n_mhz},
                   {"optical_t2_us", cfg.memory.optical_t2_us},
                   {"spin_t2_us", cfg.memory.spin_t2_us},
                   {"cavity_r1", cfg.memory.cavity_r1},
                   {"cavity_r2", cfg.memory.cavity_r2},
                   {"cavity_length_mm", cfg.memory.cavity_length_mm},
                   {"crystal_length_mm", cfg.memory.crystal_length_mm},
                   {"d_tilde", cfg.memory.d_tilde}};
    j["comb"] = {{"envelope_shape", cfg.comb.envelope_shape},
                 {"envelope_width_mhz", cfg.comb.envelope_width_mhz},
                 {"tooth_shape", cfg.comb.tooth_shape},
                 {"tooth_width_khz", cfg.comb.tooth_width_khz},
                 {"tooth_spacing_khz", cfg.comb.tooth_spacing_khz},
                 {"n_teeth", cfg.comb.n_teeth},
                 {"classes_per_tooth", cfg.comb.classes_per_tooth}};
    j["input"] = {{"shape", cfg.input.shape},
                  {"center_us", cfg.input.center_us},
                  {"intensity_fwhm_ns", cfg.input.intensity_fwhm_ns},
                  {"decay_us", cfg.input.decay_us},
                  {"file", cfg.input.file}};
    j["shaping"] = {{"n_bins", cfg.shaping.n_bins},
                    {"tau_us", cfg.shaping.tau_us},
                    {"bin_width_us", cfg.shaping.bin_width_us},
                    {"crop_m", cfg.shaping.crop_m},
                    {"window_start_us", cfg.shaping.window_start_us},
                    {"storage_gap_us", cfg.shaping.storage_gap_us},
                    {"sync", cfg.shaping.sync},
                    {"target_fwhm_us", cfg.shaping.target_fwhm_us},
                    {"target_rise_us", cfg.shaping.target_rise_us},
                    {"target_fall_us", cfg.shaping.target_fall_us},
                    {"target_file", cfg.shaping.target_file}};
    j["filter"] = {{"enabled", cfg.filter.enabled},
                   {"half_width_mhz", cfg.filter.half_width_mhz},
                   {"center_mhz", cfg.filter.center_mhz}};
    j["hom"] = {{"samples", cfg.hom.samples},
                {"windows_us", cfg.hom.windows_us},
                {"stderr_goal", cfg.hom.stderr_goal},
                {"mixed_p0", cfg.hom.mixed_p0},
                {"mixed_shifts", cfg.hom.mixed_shifts},
                {"mixed_shift_us", cfg.hom.mixed_shift_us},
                {"mixed_decay", cfg.hom.mixed_decay},
                {"ion_pure_file", cfg.hom.ion_pure_file},
                {"ion_mixture_file", cfg.hom.ion_mixture_file}};
    j["network"] = {{"eta_detection", cfg.network.eta_detection},
                    {"eta_ion_collection", cfg.network.eta_ion_collection},
                    {"eta_memory", cfg.network.eta_memory},
                    {"v_infinity", cfg.network.v_infinity},
                    {"repeater_fidelity", cfg.network.repeater_fidelity}};
    j["run"] = {{"seed", cfg.run.seed},
                {"threads", cfg.run.threads},
                {"out_dir", cfg.run.out_dir},
                {"dt_ns", cfg.run.dt_ns},
                {"trace_stride", cfg.run.trace_stride}};
    return j.dump(2) + "\n";
}

std::string config_hash(const GlobalConfig& cfg) {
    const std::string text = config_json(cfg);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64-bit offset basis
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CombSpec to_comb_spec(const GlobalConfig& cfg) {
    const auto& c = cfg.comb;
    CombSpec spec;
    spec.envelope.kind = parse_shape_kind(c.envelope_shape, "comb.envelope_shape", false);
    spec.envelope.width = rad_from_mhz(c.envelope_width_mhz);
    spec.tooth.kind = parse_shape_kind(c.tooth_shape, "comb.tooth_shape", true);
    spec.tooth.width = spec.tooth.kind == ShapeKind::dirac ? 0.0
                                                           : rad_from_khz(c.tooth_width_khz);
    spec.delta = rad_from_khz(c.tooth_spacing_khz);
    spec.n_teeth = c.n_teeth;
    spec.classes_per_tooth = c.classes_per_tooth;
    return spec;
}

MemoryParams to_memory_params(const GlobalConfig& cfg, std::vector<std::string>* warnings) {
    CombSpec spec = to_comb_spec(cfg);
    MemoryParams p;
    p.kappa = rad_from_mhz(cfg.memory.kappa_mhz);
    if (cfg.memory.g_sqrt_n_mhz > 0.0) {
        p.g_sqrt_n = rad_from_mhz(cfg.memory.g_sqrt_n_mhz);
    } else {
        // Impedance matching: cooperativity pinned to the envelope's optimum.
        p.g_sqrt_n = std::sqrt(c_opt(spec.envelope) * p.kappa * spec.envelope.width);
    }
    p.gamma_p = cfg.memory.optical_t2_us > 0.0 ? 1.0 / s_from_us(cfg.memory.optical_t2_us) : 0.0;
    p.gamma_s = cfg.memory.spin_t2_us > 0.0 ? 1.0 / s_from_us(cfg.memory.spin_t2_us) : 0.0;
    p.comb = build_comb(spec, warnings);
    return p;
}

}  // namespace afc
