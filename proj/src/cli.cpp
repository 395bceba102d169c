#include "tsui/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsui/detection.hpp"
#include "tsui/errors.hpp"
#include "tsui/experiment.hpp"
#include "tsui/fisher.hpp"
#include "tsui/fock.hpp"
#include "tsui/snri.hpp"

namespace tsui::cli {

using json = nlohmann::ordered_json;

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

enum class Format { csv, json };

// ---------------------------------------------------------------- scenario reading

/// Strict view of one JSON object: every key must be consumed, and types are checked.
class Params {
public:
    explicit Params(json obj) : obj_(std::move(obj)) {
        if (!obj_.is_object()) throw ValidationError("scenario must be a JSON object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_number()) throw ValidationError("'" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError("'" + key + "' must be finite");
        return x;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!obj_.contains(key)) {
            seen_.insert(key);
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    int integer(const std::string& key, int fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_number_integer()) throw ValidationError("'" + key + "' must be an integer");
        return v.get<int>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_number_unsigned()) throw ValidationError("'" + key + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_boolean()) throw ValidationError("'" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_string()) throw ValidationError("'" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_array()) throw ValidationError("'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ValidationError("'" + key + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) return fallback;
        const json& v = obj_[key];
        if (!v.is_array()) throw ValidationError("'" + key + "' must be an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) throw ValidationError("'" + key + "' must be an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [k, _] : obj_.items()) {
            if (!seen_.count(k)) throw ValidationError("unknown scenario field '" + k + "'");
        }
    }

private:
    json obj_;
    std::set<std::string> seen_;
};

json load_scenario(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read scenario '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed scenario '" + path + "': " + e.what());
    }
}

/// Gain and squeezing are two spellings of the same input.
double read_r(Params& p, double default_r) {
    const auto g = p.optional_number("gain");
    const auto r = p.optional_number("r");
    if (g && r) throw ValidationError("give either 'gain' or 'r', not both");
    if (r) {
        if (*r < 0.0) throw ValidationError("'r' must be >= 0");
        return *r;
    }
    return g ? squeeze_from_gain(*g) : default_r;
}

InterferometerConfig read_interferometer(Params& p, double default_gain, double default_eta) {
    InterferometerConfig c;
    c.r = read_r(p, squeeze_from_gain(default_gain));
    const double eta = p.number("eta", default_eta);
    c.eta_p1 = p.number("eta_p1", eta);
    c.eta_c1 = p.number("eta_c1", eta);
    c.eta_p2 = p.number("eta_p2", 1.0);
    c.eta_c2 = p.number("eta_c2", 1.0);
    c.phi = p.number("phi", 0.0);
    c.phi_p = p.number("phi_p", std::numbers::pi / 2);
    c.phi_c = p.number("phi_c", std::numbers::pi / 2);
    c.alpha2 = p.number("alpha2", 1e6);
    return c;
}

// ---------------------------------------------------------------- output

std::string json_text(const json& v);

void dump_json(const json& v, std::string& s, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    if (v.is_object()) {
        if (v.empty()) {
            s += "{}";
            return;
        }
        s += "{\n";
        bool first = true;
        for (const auto& [k, e] : v.items()) {
            if (!first) s += ",\n";
            first = false;
            s += inner + json(k).dump() + ": ";
            dump_json(e, s, indent + 1);
        }
        s += "\n" + pad + "}";
    } else if (v.is_array()) {
        if (v.empty()) {
            s += "[]";
            return;
        }
        const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
        if (flat) {
            s += "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ", ";
                dump_json(v[i], s, indent + 1);
            }
            s += "]";
            return;
        }
        s += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",\n";
            s += inner;
            dump_json(v[i], s, indent + 1);
        }
        s += "\n" + pad + "]";
    } else if (v.is_number_float()) {
        const double x = v.get<double>();
        s += std::isfinite(x) ? format_number(x) : "null";
    } else {
        s += v.dump();
    }
}

std::string json_text(const json& v) {
    std::string s;
    dump_json(v, s, 0);
    s += "\n";
    return s;
}

json number_or_null(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

/// Column table; empty optionals are blank CSV cells and JSON nulls.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    std::string csv() const {
        std::string s;
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        s += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ",";
                if (row[i] && std::isfinite(*row[i])) s += format_number(*row[i]);
            }
            s += "\n";
        }
        return s;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& row : rows) {
            json o = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) o[columns[i]] = number_or_null(row[i]);
            arr.push_back(std::move(o));
        }
        return arr;
    }
};

/// Flat key/value report; CSV form is one header line and one value line.
std::string report_csv(const json& report) {
    std::string head, vals;
    bool first = true;
    for (const auto& [k, v] : report.items()) {
        if (!v.is_primitive()) continue;
        head += (first ? "" : ",") + k;
        vals += first ? "" : ",";
        first = false;
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (std::isfinite(x)) vals += format_number(x);
        } else if (v.is_string()) {
            vals += v.get<std::string>();
        } else if (!v.is_null()) {
            vals += v.dump();
        }
    }
    return head + "\n" + vals + "\n";
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw ComputationError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------- commands

struct Context {
    Params params;
    Format format;
    std::optional<std::uint64_t> seed;
    std::ostream& err;
};

struct Result {
    std::string text;
};

std::optional<double> closed_form_for(const InterferometerConfig& c, DetectionScheme scheme, bool optimized) {
    const bool lossless = c.eta_p1 == 1.0 && c.eta_c1 == 1.0 && c.eta_p2 == 1.0 && c.eta_c2 == 1.0;
    try {
        switch (scheme) {
            case DetectionScheme::full_dual_homodyne:
            case DetectionScheme::truncated_dual_homodyne:
                if (c.phi == 0.0 && c.eta_p1 == c.eta_c1 && c.eta_p2 == 1.0 && c.eta_c2 == 1.0) {
                    return closed_form::general(c.eta_p1, c.r, c.phi_p, c.phi_c, c.alpha2);
                }
                return std::nullopt;
            case DetectionScheme::full_conj_homodyne:
            case DetectionScheme::full_conj_intensity:
                if (lossless && optimized) return closed_form::conjugate_only(c.r, c.alpha2);
                return std::nullopt;
            case DetectionScheme::full_dual_intensity:
                if (lossless && optimized) return closed_form::dual_intensity(c.r, c.alpha2);
                return std::nullopt;
        }
    } catch (const SlopeZero&) {
    }
    return std::nullopt;
}

Result cmd_sensitivity(Context& ctx) {
    Params& p = ctx.params;
    const DetectionScheme scheme = parse_scheme(p.string("scheme", "v"));
    InterferometerConfig cfg = configure(read_interferometer(p, 3.3, 0.65), scheme);
    if (auto a = p.optional_number("gain_p")) cfg.gain_p = *a;
    if (auto a = p.optional_number("gain_c")) cfg.gain_c = *a;
    const bool optimize = p.boolean("optimize", false);
    const int grid = p.integer("grid", 360);
    p.finish();
    cfg.validate();
    if (grid < 4) throw ValidationError("'grid' must be >= 4");

    SensitivityReport rep;
    if (optimize) {
        ScanOptions opts;
        opts.grid = grid;
        const OperatingPoint op = optimal_operating_point(cfg, scheme, opts);
        rep = op.report;
        cfg.phi = op.phi;
        cfg.phi_p = op.phi_p;
        cfg.phi_c = op.phi_c;
    } else {
        rep = is_homodyne(scheme) ? phase_variance_homodyne(cfg) : phase_variance_direct(cfg);
    }

    const double gain = gain_from_squeeze(cfg.r);
    const double coh = coherent_baseline(cfg.eta_p1 * cfg.eta_p2, gain, cfg.alpha2);
    const std::optional<double> closed = closed_form_for(cfg, scheme, optimize);

    json o = json::object();
    o["scheme"] = std::string(scheme_label(scheme));
    o["gain"] = gain;
    o["r"] = cfg.r;
    o["s"] = cfg.s;
    o["alpha2"] = cfg.alpha2;
    o["phi"] = cfg.phi;
    o["phi_p"] = cfg.phi_p;
    o["phi_c"] = cfg.phi_c;
    o["phase_variance"] = rep.phase_variance;
    o["variance_times_alpha2"] = rep.phase_variance * cfg.alpha2;
    o["closed_form_times_alpha2"] = closed ? json(*closed * cfg.alpha2) : json(nullptr);
    o["signal_mean"] = rep.signal_mean;
    o["signal_slope"] = rep.signal_slope;
    o["noise_variance"] = rep.noise_variance;
    o["coherent_variance"] = coh;
    o["snri_db"] = snri_db(rep.phase_variance, coh);
    return {ctx.format == Format::json ? json_text(o) : report_csv(o)};
}

std::vector<double> gain_grid(Params& p) {
    const double lo = p.number("gain_min", 1.0);
    const double hi = p.number("gain_max", 5.0);
    const int points = p.integer("points", 41);
    if (lo < 1.0 || hi < lo) throw ValidationError("need 1 <= gain_min <= gain_max");
    if (points < 1) throw ValidationError("'points' must be >= 1");
    std::vector<double> g;
    for (int k = 0; k < points; ++k) g.push_back(points == 1 ? lo : lo + (hi - lo) * k / (points - 1));
    return g;
}

Result cmd_figure2(Context& ctx) {
    Params& p = ctx.params;
    std::vector<double> gains;
    if (p.has("gains")) {
        if (p.has("gain_min") || p.has("gain_max") || p.has("points")) {
            throw ValidationError("'gains' cannot be combined with gain_min/gain_max/points");
        }
        gains = p.numbers("gains", {});
    } else {
        gains = gain_grid(p);
    }
    std::vector<DetectionScheme> schemes;
    for (const auto& s : p.strings("schemes", {"i", "ii", "iii", "iv", "v"})) schemes.push_back(parse_scheme(s));
    const double alpha2 = p.number("alpha2", 1e6);
    p.finish();
    for (double g : gains) {
        if (!(g >= 1.0)) throw ValidationError("gains must be >= 1");
    }
    if (schemes.empty()) throw ValidationError("'schemes' must not be empty");

    const auto rows = figure2_table(gains, schemes, alpha2);
    Table t;
    t.columns.push_back("gain");
    for (DetectionScheme s : schemes) {
        t.columns.push_back(std::string(scheme_label(s)) + "_closed");
        t.columns.push_back(std::string(scheme_label(s)) + "_numeric");
    }
    t.columns.push_back("qfi_bound");
    for (const auto& row : rows) {
        std::vector<std::optional<double>> cells{row.gain};
        for (const auto& c : row.cells) {
            cells.push_back(c.closed);
            cells.push_back(c.numeric);
        }
        cells.push_back(alpha2 / qfi(squeeze_from_gain(row.gain), alpha2));
        t.rows.push_back(std::move(cells));
    }
    return {ctx.format == Format::json ? json_text(t.to_json()) : t.csv()};
}

Result cmd_fig4b(Context& ctx) {
    Params& p = ctx.params;
    const double gain = p.number("gain", 3.3);
    const double eta = p.number("eta", 0.65);
    const double alpha2 = p.number("alpha2", 1e6);
    const double phi_c = p.number("phi_c", std::numbers::pi / 2);
    const int points = p.integer("points", 361);
    const bool with_fisher = p.boolean("fisher", true);
    p.finish();

    const auto curve = snri_scan_phip(eta, gain, alpha2, phi_c, points);
    const double coh = coherent_baseline(eta, gain, alpha2);
    const double r = squeeze_from_gain(gain);
    Table t;
    t.columns = {"phi_p", "snri_db"};
    if (with_fisher) t.columns.push_back("snri_cfi_db");
    for (const auto& pt : curve) {
        std::vector<std::optional<double>> row{pt.phi_p, pt.snri_db};
        if (with_fisher) {
            InterferometerConfig c = InterferometerConfig::equal_loss(r, eta, alpha2);
            c.phi_p = pt.phi_p;
            c.phi_c = phi_c;
            std::optional<double> v;
            if (pt.snri_db) {
                const FisherReport f = cfi_homodyne(c);
                if (f.cfi > 0.0) v = snri_db(1.0 / f.cfi, coh);
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return {ctx.format == Format::json ? json_text(t.to_json()) : t.csv()};
}

Result cmd_figs2(Context& ctx) {
    Params& p = ctx.params;
    const double r = read_r(p, 0.4605);
    const double eta = p.number("eta", 1.0);
    const int points = p.integer("points", 361);
    const std::string signals_out = p.string("signals_out", "");
    p.finish();

    const SnriMap map = snri_map(r, eta, points);
    if (!signals_out.empty()) {
        Table s;
        s.columns = {"phi", "probe_signal", "conjugate_signal"};
        for (std::size_t k = 0; k < map.phi_p.size(); ++k) {
            s.rows.push_back({map.phi_p[k], map.probe_signal[k], map.conjugate_signal[k]});
        }
        write_text(signals_out, s.csv(), ctx.err);
    }

    if (ctx.format == Format::json) {
        const auto pk = map.peak();
        json o = json::object();
        o["r"] = r;
        o["eta"] = eta;
        o["peak_snri_db"] = pk.value;
        o["peak_phi_p"] = map.phi_p[pk.i];
        o["peak_phi_c"] = map.phi_c[pk.j];
        o["phi_p"] = map.phi_p;
        o["phi_c"] = map.phi_c;
        json rows = json::array();
        for (std::size_t i = 0; i < map.phi_p.size(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < map.phi_c.size(); ++j) row.push_back(number_or_null(map.at(i, j)));
            rows.push_back(std::move(row));
        }
        o["snri_db"] = std::move(rows);
        o["probe_signal"] = map.probe_signal;
        o["conjugate_signal"] = map.conjugate_signal;
        return {json_text(o)};
    }
    Table t;
    t.columns = {"phi_p", "phi_c", "snri_db"};
    for (std::size_t i = 0; i < map.phi_p.size(); ++i) {
        for (std::size_t j = 0; j < map.phi_c.size(); ++j) t.rows.push_back({map.phi_p[i], map.phi_c[j], map.at(i, j)});
    }
    return {t.csv()};
}

Result cmd_fisher(Context& ctx) {
    Params& p = ctx.params;
    const DetectionScheme scheme = parse_scheme(p.string("scheme", "v"));
    if (!is_homodyne(scheme)) throw ValidationError("fisher information is defined for homodyne schemes only");
    InterferometerConfig cfg = configure(read_interferometer(p, 3.3, 0.65), scheme);
    p.finish();
    cfg.validate();

    const FisherReport f = cfi_homodyne(cfg);
    json o = json::object();
    o["scheme"] = std::string(scheme_label(scheme));
    o["gain"] = gain_from_squeeze(cfg.r);
    o["alpha2"] = cfg.alpha2;
    o["phi_p"] = cfg.phi_p;
    o["phi_c"] = cfg.phi_c;
    o["qfi"] = f.qfi;
    o["cfi"] = f.cfi;
    o["snr_term"] = f.snr_term;
    o["dist_term"] = f.dist_term;
    try {
        o["inverse_phase_variance"] = 1.0 / phase_variance_homodyne(cfg).phase_variance;
    } catch (const SlopeZero&) {
        o["inverse_phase_variance"] = 0.0;
    }
    return {ctx.format == Format::json ? json_text(o) : report_csv(o)};
}

Result cmd_oracle_check(Context& ctx) {
    Params& p = ctx.params;
    OracleGrid g;
    g.r = p.numbers("r", g.r);
    g.alpha = p.numbers("alpha", g.alpha);
    g.eta = p.numbers("eta", g.eta);
    g.cutoff = p.integer("cutoff", g.cutoff);
    g.phi = p.number("phi", g.phi);
    g.dense = p.boolean("dense", g.dense);
    g.tolerance = p.number("tolerance", g.tolerance);
    p.finish();

    const DiscrepancyReport rep = compare_to_gaussian(g);
    if (ctx.format == Format::csv) {
        std::string s = "r,alpha,eta,quantity,gaussian,fock,difference\n";
        for (const auto& e : rep.entries) {
            s += format_number(e.r) + "," + format_number(e.alpha) + "," + format_number(e.eta) + "," +
                 e.quantity + "," + format_number(e.gaussian) + "," + format_number(e.fock) + "," +
                 format_number(e.difference) + "\n";
        }
        return {s};
    }
    json o = json::object();
    o["status"] = rep.pass ? "pass" : "fail";
    o["max_discrepancy"] = rep.max_discrepancy;
    o["tolerance"] = rep.tolerance;
    o["max_norm_deficit"] = rep.max_norm_deficit;
    o["max_imag_residue"] = rep.max_imag_residue;
    o["cutoff"] = g.cutoff;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json row = json::object();
        row["r"] = e.r;
        row["alpha"] = e.alpha;
        row["eta"] = e.eta;
        row["quantity"] = e.quantity;
        row["gaussian"] = e.gaussian;
        row["fock"] = e.fock;
        row["difference"] = e.difference;
        entries.push_back(std::move(row));
    }
    o["entries"] = std::move(entries);
    return {json_text(o)};
}

ModulationConfig read_modulation(Params& p, std::optional<std::uint64_t> seed) {
    ModulationConfig m;
    m.delta_phi = p.number("delta_phi", m.delta_phi);
    m.omega_hz = p.number("omega_hz", m.omega_hz);
    m.sample_rate_hz = p.number("sample_rate_hz", m.sample_rate_hz);
    m.duration_s = p.number("duration_s", m.duration_s);
    m.rbw_hz = p.number("rbw_hz", m.rbw_hz);
    m.seed = p.unsigned_integer("seed", m.seed);
    if (seed) m.seed = *seed;
    m.validate();
    return m;
}

json run_json(const ExperimentRun& run) {
    json o = json::object();
    o["gain"] = gain_from_squeeze(run.config.r);
    o["seed_photons_per_sample"] = run.config.alpha2;
    o["analytic_snr_db"] = run.analytic_snr_db;
    o["estimated_snr_db"] = run.estimate.snr_db;
    o["tone_power"] = run.estimate.tone_power;
    o["noise_psd"] = run.estimate.noise_psd;
    o["noise_power_rbw_db"] = run.estimate.noise_power_rbw_db;
    return o;
}

Result cmd_mc_experiment(Context& ctx) {
    Params& p = ctx.params;
    const double eta = p.number("eta", 0.65);
    const double gain = p.number("gain", 3.3);
    const std::optional<double> photons_in = p.optional_number("detected_photons");
    const ModulationConfig mod = read_modulation(p, ctx.seed);
    const std::string samples_out = p.string("samples_out", "");
    const std::string periodogram_out = p.string("periodogram_out", "");
    p.finish();

    const double photons = photons_in.value_or(photons_from_power(CalibrationInputs{}));
    if (!(photons > 0.0)) throw ValidationError("'detected_photons' must be > 0");
    for (const auto& w : mod.warnings()) ctx.err << "warning: " << w << "\n";

    const PairedExperiment pe = paired_experiment(eta, gain, photons, mod);
    if (!samples_out.empty()) {
        write_samples_binary(samples_out, simulate_homodyne_timeseries(pe.squeezed.config, mod));
    }
    if (!periodogram_out.empty()) {
        Table t;
        t.columns = {"frequency_hz", "power_db"};
        const Periodogram& pg = pe.squeezed.estimate.periodogram;
        for (std::size_t k = 0; k < pg.psd.size(); ++k) {
            t.rows.push_back({pg.frequency_hz[k], 10.0 * std::log10(pg.psd[k] * mod.rbw_hz)});
        }
        write_text(periodogram_out, t.csv(), ctx.err);
    }

    json o = json::object();
    o["eta"] = eta;
    o["gain"] = gain;
    o["detected_photons"] = photons;
    o["seed"] = mod.seed;
    o["samples"] = mod.sample_count();
    o["analytic_difference_db"] = pe.analytic_difference_db;
    o["estimated_difference_db"] = pe.estimated_difference_db;
    if (ctx.format == Format::csv) {
        json flat = o;
        const json sq = run_json(pe.squeezed);
        const json co = run_json(pe.coherent);
        for (auto it = sq.begin(); it != sq.end(); ++it) flat["squeezed_" + it.key()] = it.value();
        for (auto it = co.begin(); it != co.end(); ++it) flat["coherent_" + it.key()] = it.value();
        return {report_csv(flat)};
    }
    o["squeezed"] = run_json(pe.squeezed);
    o["coherent"] = run_json(pe.coherent);
    return {json_text(o)};
}

Result cmd_calibrate_sql(Context& ctx) {
    Params& p = ctx.params;
    CalibrationInputs cal;
    cal.eta_coh = p.number("eta_coh", cal.eta_coh);
    cal.responsivity = p.number("responsivity", cal.responsivity);
    cal.power_w = p.number("power_w", cal.power_w);
    cal.enbw_hz = p.number("enbw_hz", cal.enbw_hz);
    cal.charge = p.number("charge", cal.charge);
    const double delta_phi = p.number("delta_phi", 1.7e-3);
    const double measured = p.number("measured_snr_db", 22.5);
    p.finish();
    if (!(delta_phi > 0.0)) throw ValidationError("'delta_phi' must be > 0");

    const double n = photons_from_power(cal);
    const double snr = coherent_snr_db(delta_phi, n);
    json o = json::object();
    o["detected_photons"] = n;
    o["sql_variance"] = sql_variance(n);
    o["delta_phi"] = delta_phi;
    o["predicted_snr_db"] = snr;
    o["measured_snr_db"] = measured;
    o["difference_db"] = snr - measured;
    return {ctx.format == Format::json ? json_text(o) : report_csv(o)};
}

struct CommandInfo {
    const char* name;
    const char* help;
    Format default_format;
    std::function<Result(Context&)> fn;
};

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> list = {
        {"sensitivity", "phase variance of one detection scheme at one operating point", Format::json, cmd_sensitivity},
        {"figure2", "lossless |alpha|^2 * variance vs gain for schemes i-v", Format::csv, cmd_figure2},
        {"fig4b", "SNRI vs probe LO phase", Format::csv, cmd_fig4b},
        {"figs2", "SNRI map over both LO phases", Format::csv, cmd_figs2},
        {"fisher", "classical and quantum Fisher information", Format::json, cmd_fisher},
        {"oracle-check", "Gaussian model vs truncated Fock-space simulation", Format::json, cmd_oracle_check},
        {"mc-experiment", "simulated squeezed/coherent SNR measurement", Format::json, cmd_mc_experiment},
        {"calibrate-sql", "photon number and coherent SNR from detector calibration", Format::json, cmd_calibrate_sql},
    };
    return list;
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ValidationError("format must be csv or json, got '" + s + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase sensitivity of seeded SU(1,1) interferometers", "tsui"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format_text;
    std::optional<std::uint64_t> seed;
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "scenario JSON file");
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "RNG seed (overrides the scenario)");
        subs[c.name] = sub;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    const CommandInfo* cmd = nullptr;
    for (const auto& c : commands()) {
        if (subs[c.name]->parsed()) cmd = &c;
    }

    try {
        configure_threads_from_env();
        json scenario = load_scenario(config_path);
        if (!scenario.is_object()) throw ValidationError("scenario must be a JSON object");
        // Output settings may live in the scenario; command-line flags win.
        std::string scenario_out, scenario_format;
        if (scenario.contains("out")) {
            if (!scenario["out"].is_string()) throw ValidationError("'out' must be a string");
            scenario_out = scenario["out"].get<std::string>();
            scenario.erase("out");
        }
        if (scenario.contains("format")) {
            if (!scenario["format"].is_string()) throw ValidationError("'format' must be a string");
            scenario_format = scenario["format"].get<std::string>();
            scenario.erase("format");
        }
        Format fmt = cmd->default_format;
        if (!scenario_format.empty()) fmt = parse_format(scenario_format);
        if (!format_text.empty()) fmt = parse_format(format_text);
        const std::string target = out_path.empty() ? scenario_out : out_path;

        Context ctx{Params(std::move(scenario)), fmt, seed, err};
        const Result res = cmd->fn(ctx);
        write_text(target, res.text, out);
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace tsui::cli
