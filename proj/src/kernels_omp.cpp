// OpenMP kernels. Same contracts as kernels_serial.cpp.

#include <cmath>
#include <limits>
#include <vector>

#include "tsui/detection.hpp"
#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"

namespace tsui::kernels::omp {

namespace {

struct TrigTable {
    std::vector<double> c;
    std::vector<double> s;
    explicit TrigTable(std::span<const double> a) : c(a.size()), s(a.size()) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            c[k] = std::cos(a[k]);
            s[k] = std::sin(a[k]);
        }
    }
};

}  // namespace

Landscape homodyne_landscape(const HomodyneInputs& in, std::span<const double> phi_p,
                             std::span<const double> phi_c) {
    const TrigTable tp(phi_p);
    const TrigTable tc(phi_c);
    const long np = static_cast<long>(phi_p.size());
    const long nc = static_cast<long>(phi_c.size());
    const double mean_norm = in.mean.norm();
    Landscape out(np, nc);

#pragma omp parallel for collapse(2) schedule(static)
    for (long i = 0; i < np; ++i) {
        for (long j = 0; j < nc; ++j) {
            Vec4 u(in.gain_p * tp.c[i], in.gain_p * tp.s[i], in.gain_c * tc.c[j], in.gain_c * tc.s[j]);
            const double slope = u.dot(in.dmean);
            const double var = u.dot(in.cov * u);
            out(i, j) = std::abs(slope) < slope_floor(u.norm() * mean_norm)
                            ? std::numeric_limits<double>::infinity()
                            : var / (slope * slope);
        }
    }
    return out;
}

Eigen::MatrixXd snri_map(double r, double eta, std::span<const double> phi_p,
                         std::span<const double> phi_c) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
    const TrigTable tp(phi_p);
    const TrigTable tc(phi_c);
    const long np = static_cast<long>(phi_p.size());
    const long nc = static_cast<long>(phi_c.size());
    const double t = std::tanh(r);
    const double sech2 = 1.0 / std::pow(std::cosh(r), 2);
    const double gain = gain_from_squeeze(r);
    const double base = 2.0 * eta + (1.0 - 2.0 * eta) * sech2;
    Eigen::MatrixXd out(np, nc);

#pragma omp parallel for schedule(static)
    for (long i = 0; i < np; ++i) {
        const double sp = tp.s[i];
        for (long j = 0; j < nc; ++j) {
            if (std::abs(sp) < 1e-12 || eta == 0.0) {
                out(i, j) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double cos_sum = tp.c[i] * tc.c[j] - sp * tc.s[j];
            // variance ratio to the coherent baseline 1 / (2 eta G |alpha|^2)
            const double ratio = (base + 2.0 * eta * cos_sum * t) * gain / (sp * sp);
            out(i, j) = -10.0 * std::log10(ratio);
        }
    }
    return out;
}

SampleMoments modulated_moments(const InterferometerConfig& cfg, std::span<const double> phases) {
    SampleMoments m;
    const long n = static_cast<long>(phases.size());
    m.mean.resize(phases.size());
    m.variance.resize(phases.size());
    const Vec4 u = homodyne_weights(cfg.phi_p, cfg.phi_c, cfg.gain_p, cfg.gain_c);
    cfg.validate();

#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        InterferometerConfig c = cfg;
        c.phi = phases[k];
        const Moments q = quadrature_stats(build_output_state(c), u);
        m.mean[k] = q.mean;
        m.variance[k] = q.variance;
    }
    return m;
}

void apply_sector_propagators(const std::vector<Eigen::MatrixXd>& propagators,
                              Eigen::MatrixXcd& amp) {
    const int w = static_cast<int>(amp.rows()) - 1;
    if (amp.cols() != amp.rows() || static_cast<int>(propagators.size()) != 2 * w + 1) {
        throw ValidationError("sector propagators do not match the amplitude tensor");
    }
    // Sectors touch disjoint amplitudes, so they can be updated independently.
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k <= 2 * w; ++k) {
        const int delta = k - w;
        const int n0p = delta > 0 ? delta : 0;
        const int n0c = delta > 0 ? 0 : -delta;
        const int len = w - std::abs(delta) + 1;
        const Eigen::MatrixXd& u = propagators[static_cast<std::size_t>(k)];
        if (u.size() == 0) continue;  // sector left untouched
        Eigen::VectorXd re(len);
        Eigen::VectorXd im(len);
        for (int m = 0; m < len; ++m) {
            re(m) = amp(n0p + m, n0c + m).real();
            im(m) = amp(n0p + m, n0c + m).imag();
        }
        const Eigen::VectorXd ore = u * re;
        const Eigen::VectorXd oim = u * im;
        for (int m = 0; m < len; ++m) amp(n0p + m, n0c + m) = {ore(m), oim(m)};
    }
}

}  // namespace tsui::kernels::omp
