#include "tsui/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "optimize.hpp"
#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"

namespace tsui {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void check_unit_interval(const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << name << " must lie in [0, 1], got " << v;
        throw ValidationError(os.str());
    }
}

void check_finite(const char* name, double v) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

std::string point_description(const InterferometerConfig& c) {
    std::ostringstream os;
    os << "phi=" << c.phi << ", phi_p=" << c.phi_p << ", phi_c=" << c.phi_c;
    return os.str();
}

// Wraps an angle to (-pi, pi].
double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

std::vector<double> angle_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = -kPi + 2.0 * kPi * k / n;
    return g;
}

kernels::HomodyneInputs homodyne_inputs(const InterferometerConfig& cfg) {
    InterferometerConfig plus = cfg;
    InterferometerConfig minus = cfg;
    plus.phi += kPhaseStep;
    minus.phi -= kPhaseStep;
    const GaussianState at = build_output_state(cfg);
    const Vec4 dmean =
        (build_output_state(plus).mean() - build_output_state(minus).mean()) / (2.0 * kPhaseStep);
    return {at.cov(), at.mean(), dmean, cfg.gain_p, cfg.gain_c};
}

double homodyne_ratio(const kernels::HomodyneInputs& in, double phi_p, double phi_c) {
    const Vec4 u = homodyne_weights(phi_p, phi_c, in.gain_p, in.gain_c);
    const double slope = u.dot(in.dmean);
    if (std::abs(slope) < kernels::slope_floor(u.norm() * in.mean.norm())) return kInf;
    return u.dot(in.cov * u) / (slope * slope);
}

OperatingPoint optimize_homodyne(const InterferometerConfig& cfg, const ScanOptions& opt) {
    const auto in = homodyne_inputs(cfg);
    const std::vector<double> grid = angle_grid(opt.grid);
    const kernels::Landscape land = opt.exec == Exec::parallel
                                        ? kernels::omp::homodyne_landscape(in, grid, grid)
                                        : kernels::serial::homodyne_landscape(in, grid, grid);
    const double best = land.minCoeff();
    if (!std::isfinite(best)) {
        throw SlopeZero("no phase-sensitive homodyne operating point for this configuration");
    }

    // Equivalent minima come in pairs related by a sign flip of the signal; keep the
    // one locked to a positive slope.
    int bi = -1;
    int bj = -1;
    bool best_positive = false;
    for (int i = 0; i < land.rows(); ++i) {
        for (int j = 0; j < land.cols(); ++j) {
            if (!(land(i, j) <= best * (1.0 + 1e-9))) continue;
            const Vec4 u = homodyne_weights(grid[i], grid[j], in.gain_p, in.gain_c);
            const bool positive = u.dot(in.dmean) > 0.0;
            if (bi < 0 || (positive && !best_positive)) {
                bi = i;
                bj = j;
                best_positive = positive;
            }
        }
    }

    const double step = 2.0 * kPi / opt.grid;
    auto f = [&](double a, double b) { return homodyne_ratio(in, a, b); };
    const auto m = detail::powell_refine(f, grid[bi], grid[bj], step, opt.tolerance);

    InterferometerConfig at = cfg;
    at.phi_p = wrap_angle(m.x);
    at.phi_c = wrap_angle(m.y);
    if (cfg.gain_p == 0.0) at.phi_p = cfg.phi_p;  // irrelevant angle: leave as given
    if (cfg.gain_c == 0.0) at.phi_c = cfg.phi_c;
    OperatingPoint op;
    op.phi_p = at.phi_p;
    op.phi_c = at.phi_c;
    op.phi = at.phi;
    op.report = phase_variance_homodyne(at);
    return op;
}

double direct_ratio(const InterferometerConfig& cfg, double phi, double* slope = nullptr) {
    InterferometerConfig c = cfg;
    c.phi = phi;
    try {
        const SensitivityReport rep = phase_variance_direct(c);
        if (slope != nullptr) *slope = rep.signal_slope;
        return rep.phase_variance;
    } catch (const SlopeZero&) {
        if (slope != nullptr) *slope = 0.0;
        return kInf;
    }
}

OperatingPoint optimize_direct(const InterferometerConfig& cfg, const ScanOptions& opt) {
    const std::vector<double> grid = angle_grid(opt.grid);
    const int n = opt.grid;
    std::vector<double> values(grid.size());
    std::vector<double> slopes(grid.size());

#pragma omp parallel for schedule(static) if (opt.exec == Exec::parallel)
    for (int k = 0; k < n; ++k) values[k] = direct_ratio(cfg, grid[k], &slopes[k]);

    const double best = *std::min_element(values.begin(), values.end());
    if (!std::isfinite(best)) {
        throw SlopeZero("no phase-sensitive intensity operating point for this configuration");
    }
    int bk = -1;
    for (int k = 0; k < n; ++k) {
        if (!(values[k] <= best * (1.0 + 1e-9))) continue;
        if (bk < 0 || (slopes[k] > 0.0 && !(slopes[bk] > 0.0))) bk = k;
    }

    // The optimum often sits next to an insensitive (dark-fringe) point; keep the
    // bracket a small guard away from it so the variance never degenerates to 0/0.
    const double step = 2.0 * kPi / n;
    const double guard = 1e-3 * step;
    double lo = grid[bk] - step;
    double hi = grid[bk] + step;
    if (!std::isfinite(values[(bk + n - 1) % n])) lo += guard;
    if (!std::isfinite(values[(bk + 1) % n])) hi -= guard;
    const auto m = detail::golden_section([&](double p) { return direct_ratio(cfg, p); }, lo, hi,
                                          opt.tolerance);
    InterferometerConfig at = cfg;
    at.phi = m.f <= values[bk] ? m.x : grid[bk];
    OperatingPoint op;
    op.phi_p = at.phi_p;
    op.phi_c = at.phi_c;
    op.phi = at.phi;
    op.report = phase_variance_direct(at);
    return op;
}

double require_positive_seed(double alpha2) {
    if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) {
        throw ValidationError("seed photon number must be > 0 for a closed-form variance");
    }
    return alpha2;
}

}  // namespace

void InterferometerConfig::validate() const {
    check_finite("r", r);
    check_finite("s", s);
    check_finite("phi", phi);
    check_finite("phi_p", phi_p);
    check_finite("phi_c", phi_c);
    check_unit_interval("eta_p1", eta_p1);
    check_unit_interval("eta_c1", eta_c1);
    check_unit_interval("eta_p2", eta_p2);
    check_unit_interval("eta_c2", eta_c2);
    if (!(gain_p >= 0.0) || !std::isfinite(gain_p)) throw ValidationError("gain_p must be >= 0");
    if (!(gain_c >= 0.0) || !std::isfinite(gain_c)) throw ValidationError("gain_c must be >= 0");
    if (!(alpha2 >= 0.0) || !std::isfinite(alpha2)) throw ValidationError("alpha2 must be >= 0");
}

InterferometerConfig InterferometerConfig::equal_loss(double r, double eta, double alpha2,
                                                      double s) {
    InterferometerConfig c;
    c.r = r;
    c.s = s;
    c.eta_p1 = eta;
    c.eta_c1 = eta;
    c.alpha2 = alpha2;
    c.validate();
    return c;
}

std::string_view scheme_label(DetectionScheme scheme) {
    switch (scheme) {
        case DetectionScheme::full_dual_homodyne: return "i";
        case DetectionScheme::full_conj_homodyne: return "ii";
        case DetectionScheme::full_conj_intensity: return "iii";
        case DetectionScheme::full_dual_intensity: return "iv";
        case DetectionScheme::truncated_dual_homodyne: return "v";
    }
    return "?";
}

DetectionScheme parse_scheme(std::string_view text) {
    for (DetectionScheme s : kAllSchemes) {
        if (text == scheme_label(s)) return s;
    }
    if (text == "full_dual_homodyne") return DetectionScheme::full_dual_homodyne;
    if (text == "full_conj_homodyne") return DetectionScheme::full_conj_homodyne;
    if (text == "full_conj_intensity") return DetectionScheme::full_conj_intensity;
    if (text == "full_dual_intensity") return DetectionScheme::full_dual_intensity;
    if (text == "truncated_dual_homodyne") return DetectionScheme::truncated_dual_homodyne;
    throw ValidationError("unknown detection scheme '" + std::string(text) + "'");
}

bool is_homodyne(DetectionScheme scheme) {
    return scheme != DetectionScheme::full_conj_intensity &&
           scheme != DetectionScheme::full_dual_intensity;
}

bool is_truncated(DetectionScheme scheme) {
    return scheme == DetectionScheme::truncated_dual_homodyne;
}

InterferometerConfig configure(InterferometerConfig config, DetectionScheme scheme) {
    config.s = is_truncated(scheme) ? 0.0 : -config.r;
    switch (scheme) {
        case DetectionScheme::full_conj_homodyne:
        case DetectionScheme::full_conj_intensity:
            config.gain_p = 0.0;
            config.gain_c = 1.0;
            break;
        default:
            config.gain_p = 1.0;
            config.gain_c = 1.0;
    }
    return config;
}

GaussianState build_output_state(const InterferometerConfig& c) {
    c.validate();
    GaussianState st = coherent_seed_state(std::complex<double>(std::sqrt(c.alpha2), 0.0));
    st = apply_two_mode_squeeze(st, c.r);
    st = apply_phase_shift(st, Mode::probe, c.phi);
    st = apply_loss(st, Mode::probe, c.eta_p1);
    st = apply_loss(st, Mode::conjugate, c.eta_c1);
    st = apply_two_mode_squeeze(st, c.s);
    st = apply_loss(st, Mode::probe, c.eta_p2);
    st = apply_loss(st, Mode::conjugate, c.eta_c2);
    return st;
}

SensitivityReport phase_variance_homodyne(const InterferometerConfig& config) {
    if (config.gain_p == 0.0 && config.gain_c == 0.0) {
        throw ValidationError("homodyne detection needs at least one non-zero detector gain");
    }
    const auto in = homodyne_inputs(config);
    const Vec4 u = homodyne_weights(config.phi_p, config.phi_c, config.gain_p, config.gain_c);
    const double slope = u.dot(in.dmean);
    const double var = u.dot(in.cov * u);
    if (std::abs(slope) < kernels::slope_floor(u.norm() * in.mean.norm())) {
        throw SlopeZero("joint quadrature is insensitive to the phase at " +
                        point_description(config));
    }
    SensitivityReport rep;
    rep.signal_slope = slope;
    rep.noise_variance = var;
    rep.signal_mean = u.dot(in.mean);
    rep.phase_variance = var / (slope * slope);
    rep.phi = config.phi;
    rep.phi_p = config.phi_p;
    rep.phi_c = config.phi_c;
    return rep;
}

SensitivityReport phase_variance_direct(const InterferometerConfig& config) {
    auto binary = [](double g) { return g == 0.0 || g == 1.0; };
    if (!binary(config.gain_p) || !binary(config.gain_c) ||
        (config.gain_p == 0.0 && config.gain_c == 0.0)) {
        throw ValidationError("intensity detection needs detector gains in {0, 1}, not both 0");
    }
    InterferometerConfig plus = config;
    InterferometerConfig minus = config;
    plus.phi += kPhaseStep;
    minus.phi -= kPhaseStep;
    const Moments at = weighted_number_stats(build_output_state(config), config.gain_p, config.gain_c);
    const double np = weighted_number_stats(build_output_state(plus), config.gain_p, config.gain_c).mean;
    const double nm = weighted_number_stats(build_output_state(minus), config.gain_p, config.gain_c).mean;
    const double slope = (np - nm) / (2.0 * kPhaseStep);
    if (std::abs(slope) < kernels::slope_floor(std::abs(at.mean))) {
        throw SlopeZero("photon-number sum is insensitive to the phase at " +
                        point_description(config));
    }
    SensitivityReport rep;
    rep.signal_slope = slope;
    rep.noise_variance = at.variance;
    rep.signal_mean = at.mean;
    rep.phase_variance = at.variance / (slope * slope);
    rep.phi = config.phi;
    rep.phi_p = config.phi_p;
    rep.phi_c = config.phi_c;
    return rep;
}

SensitivityReport phase_variance(const InterferometerConfig& config, DetectionScheme scheme) {
    const InterferometerConfig c = configure(config, scheme);
    return is_homodyne(scheme) ? phase_variance_homodyne(c) : phase_variance_direct(c);
}

namespace closed_form {

double truncated(double eta, double r, double phi_p, double alpha2) {
    require_positive_seed(alpha2);
    check_unit_interval("eta", eta);
    const double sp = std::sin(phi_p);
    if (std::abs(sp) < 1e-12 || eta == 0.0) {
        throw SlopeZero("insensitive operating point (sin(phi_p) = 0 or total loss)");
    }
    const double sech2 = 1.0 / std::pow(std::cosh(r), 2);
    const double num = 2.0 * eta + (1.0 - 2.0 * eta) * sech2 - 2.0 * eta * sp * std::tanh(r);
    return num / (2.0 * eta * alpha2 * sp * sp);
}

double general(double eta, double r, double phi_p, double phi_c, double alpha2) {
    require_positive_seed(alpha2);
    check_unit_interval("eta", eta);
    const double sp = std::sin(phi_p);
    if (std::abs(sp) < 1e-12 || eta == 0.0) {
        throw SlopeZero("insensitive operating point (sin(phi_p) = 0 or total loss)");
    }
    const double sech2 = 1.0 / std::pow(std::cosh(r), 2);
    const double num =
        2.0 * eta + (1.0 - 2.0 * eta) * sech2 + 2.0 * eta * std::cos(phi_p + phi_c) * std::tanh(r);
    return num / (2.0 * alpha2 * eta * sp * sp);
}

double conjugate_only(double r, double alpha2) {
    require_positive_seed(alpha2);
    const double sh = std::sinh(2.0 * r);
    if (sh == 0.0) throw SlopeZero("conjugate detection carries no phase signal at r = 0");
    return 1.0 / (sh * sh * alpha2);
}

double dual_intensity(double r, double alpha2) {
    require_positive_seed(alpha2);
    const double sh = std::sinh(2.0 * r);
    if (sh == 0.0) throw SlopeZero("intensity detection carries no phase signal at r = 0");
    const double csch4 = 1.0 / std::pow(sh, 4);
    return csch4 * (2.0 * std::cosh(4.0 * r) + std::sqrt(std::cosh(8.0 * r)) - 1.0) / (2.0 * alpha2);
}

double internal_loss(double r, double eta_int, double alpha2) {
    require_positive_seed(alpha2);
    check_unit_interval("eta_int", eta_int);
    if (eta_int == 0.0) throw SlopeZero("total internal loss");
    const double t = std::tanh(r);
    return std::exp(-r) / std::cosh(r) * (1.0 + t - 2.0 * eta_int * t) / (2.0 * eta_int * alpha2);
}

double external_loss(double r, double eta_ext, double alpha2) {
    require_positive_seed(alpha2);
    check_unit_interval("eta_ext", eta_ext);
    if (eta_ext == 0.0) throw SlopeZero("total external loss");
    const double b = 1.0 + std::cosh(2.0 * r) + std::sinh(2.0 * r);
    return 2.0 / (eta_ext * alpha2 * b * b);
}

}  // namespace closed_form

double closed_form_sensitivity(ClosedForm formula, const ClosedFormParams& p) {
    switch (formula) {
        case ClosedForm::truncated: return closed_form::truncated(p.eta, p.r, p.phi_p, p.alpha2);
        case ClosedForm::general:
            return closed_form::general(p.eta, p.r, p.phi_p, p.phi_c, p.alpha2);
        case ClosedForm::conjugate_only: return closed_form::conjugate_only(p.r, p.alpha2);
        case ClosedForm::dual_intensity: return closed_form::dual_intensity(p.r, p.alpha2);
        case ClosedForm::internal_loss: return closed_form::internal_loss(p.r, p.eta, p.alpha2);
        case ClosedForm::external_loss: return closed_form::external_loss(p.r, p.eta, p.alpha2);
    }
    throw ValidationError("unknown closed form");
}

OperatingPoint optimal_operating_point(const InterferometerConfig& config, DetectionScheme scheme,
                                       const ScanOptions& options) {
    if (options.grid < 4) throw ValidationError("scan grid must have at least 4 points");
    const InterferometerConfig c = configure(config, scheme);
    c.validate();
    return is_homodyne(scheme) ? optimize_homodyne(c, options) : optimize_direct(c, options);
}

std::vector<Figure2Row> figure2_table(std::span<const double> gains,
                                      std::span<const DetectionScheme> schemes, double alpha2,
                                      Exec exec) {
    for (double g : gains) squeeze_from_gain(g);  // validates G >= 1 up front
    std::vector<Figure2Row> rows(gains.size());
    const int n = static_cast<int>(gains.size());

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int k = 0; k < n; ++k) {
        const double r = squeeze_from_gain(gains[k]);
        InterferometerConfig cfg = InterferometerConfig::equal_loss(r, 1.0, alpha2);
        Figure2Row row;
        row.gain = gains[k];
        for (DetectionScheme s : schemes) {
            Figure2Cell cell;
            cell.scheme = s;
            try {
                switch (s) {
                    case DetectionScheme::full_dual_homodyne:
                    case DetectionScheme::truncated_dual_homodyne:
                        cell.closed = alpha2 * closed_form::truncated(1.0, r, kPi / 2, alpha2);
                        break;
                    case DetectionScheme::full_conj_homodyne:
                    case DetectionScheme::full_conj_intensity:
                        cell.closed = alpha2 * closed_form::conjugate_only(r, alpha2);
                        break;
                    case DetectionScheme::full_dual_intensity:
                        cell.closed = alpha2 * closed_form::dual_intensity(r, alpha2);
                        break;
                }
            } catch (const SlopeZero&) {
            }
            try {
                ScanOptions opt;
                opt.exec = Exec::serial;
                cell.numeric = alpha2 * optimal_operating_point(cfg, s, opt).report.phase_variance;
            } catch (const SlopeZero&) {
            }
            row.cells.push_back(cell);
        }
        rows[k] = std::move(row);
    }
    return rows;
}

}  // namespace tsui
