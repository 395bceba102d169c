#include "tsui/snri.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tsui/detection.hpp"
#include "tsui/errors.hpp"
#include "tsui/kernels.hpp"

namespace tsui {

BaselineSpec BaselineSpec::make(double eta, double gain, double alpha2) {
    coherent_baseline(eta, gain, alpha2);  // validates
    return {eta, gain, alpha2, eta * gain * alpha2};
}

double coherent_baseline(double eta, double gain, double alpha2) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("coherent baseline needs eta in (0, 1]");
    if (!(gain >= 1.0) || !std::isfinite(gain)) throw ValidationError("coherent baseline needs G >= 1");
    if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) throw ValidationError("coherent baseline needs alpha2 > 0");
    return 1.0 / (2.0 * eta * gain * alpha2);
}

double sql_variance(double photons) {
    if (!(photons > 0.0) || !std::isfinite(photons)) throw ValidationError("SQL needs N > 0");
    return 1.0 / (2.0 * photons);
}

double sql_photons(double eta, double gain, double alpha2, SqlAccounting accounting) {
    const BaselineSpec b = BaselineSpec::make(eta, gain, alpha2);
    switch (accounting) {
        case SqlAccounting::probe_only: return b.detected_photons;
        case SqlAccounting::probe_and_conjugate: return eta * (2.0 * gain - 1.0) * alpha2;
    }
    return b.detected_photons;
}

double snri_db(double variance, double reference_variance) {
    if (!(variance > 0.0) || !(reference_variance > 0.0) || !std::isfinite(variance) ||
        !std::isfinite(reference_variance)) {
        throw ValidationError("SNRI needs finite positive variances");
    }
    return -10.0 * std::log10(variance / reference_variance);
}

std::vector<double> phase_grid(int points) {
    if (points < 2) throw ValidationError("phase grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        g[static_cast<std::size_t>(k)] = -std::numbers::pi + 2.0 * std::numbers::pi * k / (points - 1);
    }
    return g;
}

std::vector<SnriPoint> snri_scan_phip(double eta, double gain, double alpha2, double phi_c,
                                      int points) {
    const double r = squeeze_from_gain(gain);
    const double coh = coherent_baseline(eta, gain, alpha2);
    std::vector<SnriPoint> curve;
    curve.reserve(static_cast<std::size_t>(points));
    for (double p : phase_grid(points)) {
        SnriPoint pt;
        pt.phi_p = p;
        try {
            pt.snri_db = snri_db(closed_form::general(eta, r, p, phi_c, alpha2), coh);
        } catch (const SlopeZero&) {
        }
        curve.push_back(pt);
    }
    return curve;
}

std::optional<double> SnriMap::at(std::size_t i, std::size_t j) const {
    const double v = snri_db(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (std::isnan(v)) return std::nullopt;
    return v;
}

SnriMap::Peak SnriMap::peak() const {
    Peak p{-std::numeric_limits<double>::infinity(), 0, 0};
    for (Eigen::Index i = snri_db.rows() - 1; i >= 0; --i) {
        for (Eigen::Index j = snri_db.cols() - 1; j >= 0; --j) {
            const double v = snri_db(i, j);
            if (!std::isnan(v) && v > p.value) p = {v, static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
        }
    }
    return p;
}

SnriMap snri_map(double r, double eta, int points, Exec exec) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("SNRI map needs eta in (0, 1]");
    if (!std::isfinite(r)) throw ValidationError("SNRI map needs a finite r");
    SnriMap map;
    map.phi_p = phase_grid(points);
    map.phi_c = map.phi_p;
    map.snri_db = exec == Exec::parallel ? kernels::omp::snri_map(r, eta, map.phi_p, map.phi_c)
                                         : kernels::serial::snri_map(r, eta, map.phi_p, map.phi_c);

    const GaussianState out = build_output_state(InterferometerConfig::equal_loss(r, eta, 1.0));
    map.probe_signal.reserve(map.phi_p.size());
    map.conjugate_signal.reserve(map.phi_c.size());
    for (double p : map.phi_p) {
        map.probe_signal.push_back(quadrature_stats(out, homodyne_weights(p, 0.0, 1.0, 0.0)).mean);
    }
    for (double c : map.phi_c) {
        map.conjugate_signal.push_back(quadrature_stats(out, homodyne_weights(0.0, c, 0.0, 1.0)).mean);
    }
    return map;
}

}  // namespace tsui
