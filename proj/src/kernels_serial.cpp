// Serial reference kernels. Straightforward loops that call the public per-point
// functions; the OpenMP versions in kernels_omp.cpp must agree with these.

#include <cmath>
#include <limits>

#include "tsui/detection.hpp"
#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"

namespace tsui::kernels {

double slope_floor(double signal_scale) { return 1e-12 + 1e-8 * signal_scale; }

namespace serial {

Landscape homodyne_landscape(const HomodyneInputs& in, std::span<const double> phi_p,
                             std::span<const double> phi_c) {
    Landscape out(static_cast<Eigen::Index>(phi_p.size()), static_cast<Eigen::Index>(phi_c.size()));
    for (std::size_t i = 0; i < phi_p.size(); ++i) {
        for (std::size_t j = 0; j < phi_c.size(); ++j) {
            const Vec4 u = homodyne_weights(phi_p[i], phi_c[j], in.gain_p, in.gain_c);
            const double slope = u.dot(in.dmean);
            const double var = u.dot(in.cov * u);
            out(i, j) = std::abs(slope) < slope_floor(u.norm() * in.mean.norm())
                            ? std::numeric_limits<double>::infinity()
                            : var / (slope * slope);
        }
    }
    return out;
}

Eigen::MatrixXd snri_map(double r, double eta, std::span<const double> phi_p,
                         std::span<const double> phi_c) {
    const double gain = gain_from_squeeze(r);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(phi_p.size()), static_cast<Eigen::Index>(phi_c.size()));
    for (std::size_t i = 0; i < phi_p.size(); ++i) {
        for (std::size_t j = 0; j < phi_c.size(); ++j) {
            try {
                // alpha2 cancels between the two variances; evaluate at 1.
                const double v = closed_form::general(eta, r, phi_p[i], phi_c[j], 1.0);
                const double coh = 1.0 / (2.0 * eta * gain);
                out(i, j) = -10.0 * std::log10(v / coh);
            } catch (const SlopeZero&) {
                out(i, j) = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return out;
}

SampleMoments modulated_moments(const InterferometerConfig& cfg, std::span<const double> phases) {
    SampleMoments m;
    m.mean.resize(phases.size());
    m.variance.resize(phases.size());
    const Vec4 u = homodyne_weights(cfg.phi_p, cfg.phi_c, cfg.gain_p, cfg.gain_c);
    InterferometerConfig c = cfg;
    for (std::size_t k = 0; k < phases.size(); ++k) {
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
    for (int k = 0; k <= 2 * w; ++k) {
        const int delta = k - w;  // n_p - n_c
        const int n0p = delta > 0 ? delta : 0;
        const int n0c = delta > 0 ? 0 : -delta;
        const int len = w - std::abs(delta) + 1;
        const Eigen::MatrixXd& u = propagators[static_cast<std::size_t>(k)];
        if (u.size() == 0) continue;  // sector left untouched
        Eigen::VectorXcd v(len);
        for (int m = 0; m < len; ++m) v(m) = amp(n0p + m, n0c + m);
        const Eigen::VectorXcd out = u.cast<std::complex<double>>() * v;
        for (int m = 0; m < len; ++m) amp(n0p + m, n0c + m) = out(m);
    }
}

}  // namespace serial
}  // namespace tsui::kernels
